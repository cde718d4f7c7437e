// Runs every inference procedure on the October sulfur dioxide records.

#include <cstdio>

#include "wrec/wrec.hpp"

int main() {
  using namespace wrec;
  const RecordSample s({26, 27, 40, 41});

  const auto est = mle(s);
  std::printf("MLE: beta = %.4f, alpha = %.4f\n", est.beta_hat, est.alpha_hat);

  const auto exact = exact_ci_shape(s, 0.95);
  std::printf("exact 95%% CI for beta: (%.4f, %.4f)\n", exact.lower, exact.upper);

  const auto table = wstar_table(s.n(), wstar_probs_for(0.95), kDefaultWStarReps, 20140101);
  const auto wu = wu_ci_shape(s, 0.95, table);
  std::printf("Wu-Tseng 95%% CI for beta: (%.4f, %.4f)\n", wu.lower, wu.upper);

  const auto draws = draw_pivotal_t(s, kDefaultPivotalDraws, RngStream(20140101, 0));
  const auto gci = generalized_ci_scale(draws, 0.95);
  std::printf("generalized 95%% CI for alpha: (%.4f, %.4f)\n", gci.lower, gci.upper);
  const auto p = gpv_scale(draws, 5.0, Alternative::OneSidedUpper);
  std::printf("generalized p-value for alpha <= 5 vs alpha > 5: %.4f\n", p.p_value);

  for (const auto m : {RegionMethod::aj(1), RegionMethod::aj(2), RegionMethod::aj(3), RegionMethod::b()}) {
    const auto r = make_region(s, m, 0.95);
    std::printf("region %s: %.4f < beta < %.4f, area %.4f\n", m.label().c_str(), r.beta_lower(), r.beta_upper(),
                area(r).value);
  }
}
