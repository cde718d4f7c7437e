// Command-line front end for record-value inference on Weibull data.

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "wrec/wrec.hpp"

namespace {

using nlohmann::json;
using namespace wrec;

struct DataOptions {
  std::string data;
  std::string input;
  bool raw = false;
};

struct CommonOptions {
  DataOptions data;
  double level = 0.95;
  bool one_sided = false;
  bool json_out = false;
};

class data_error : public wrec::error {
 public:
  using wrec::error::error;
};

std::vector<double> parse_numbers(const std::string& text, const std::string& origin) {
  std::vector<double> out;
  std::string token;
  int line = 1;
  auto flush = [&] {
    if (token.empty()) return;
    double v = 0.0;
    const auto* first = token.data();
    const auto* last = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
      throw data_error(origin + ":" + std::to_string(line) + ": not a number: '" + token + "'");
    }
    out.push_back(v);
    token.clear();
  };
  for (char c : text) {
    if (c == ',' || c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ';') {
      flush();
      if (c == '\n') ++line;
    } else {
      token.push_back(c);
    }
  }
  flush();
  return out;
}

RecordSample load_records(const DataOptions& o) {
  std::string text;
  std::string origin;
  if (!o.data.empty()) {
    text = o.data;
    origin = "--data";
  } else if (!o.input.empty()) {
    std::ifstream in(o.input);
    if (!in) throw data_error("cannot read " + o.input);
    std::stringstream ss;
    ss << in.rdbuf();
    text = ss.str();
    origin = o.input;
  } else {
    throw CLI::RequiredError("--data or --input");
  }
  const auto values = parse_numbers(text, origin);
  if (o.raw) return extract_records(values);
  return RecordSample(values);
}

std::uint64_t env_u64(const char* name, std::uint64_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v, v + std::strlen(v), out);
  if (ec != std::errc() || *ptr != '\0') throw config_error(std::string(name) + " is not an unsigned integer");
  return out;
}

double env_double(const char* name, double fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  char* end = nullptr;
  const double out = std::strtod(v, &end);
  if (*end != '\0' || !(out > 0.0)) throw config_error(std::string(name) + " is not a positive number");
  return out;
}

void add_data(CLI::App* sub, DataOptions& o) {
  auto* d = sub->add_option("--data", o.data, "Records inline, comma or space separated");
  auto* i = sub->add_option("--input", o.input, "File with records, one per line or comma separated");
  d->excludes(i);
  sub->add_flag("--raw", o.raw, "Input is a raw series; extract its upper records first");
}

void add_common(CLI::App* sub, CommonOptions& o, bool with_sides) {
  add_data(sub, o.data);
  sub->add_option("--level", o.level, "Confidence level 1 - gamma")->check(CLI::Range(0.0, 1.0));
  sub->add_flag("--json", o.json_out, "Machine-readable JSON output");
  if (with_sides) {
    auto* one = sub->add_flag("--one-sided", o.one_sided, "One-sided alternative (parameter above the null)");
    auto* two = sub->add_flag("--two-sided", "Two-sided alternative (default)");
    one->excludes(two);
  }
}

json interval_json(const ConfidenceInterval& ci) {
  return {{"lower", ci.lower}, {"upper", ci.upper}, {"level", ci.level}, {"method", to_string(ci.method)}};
}

json region_json(const JointRegion& r) {
  return {{"method", r.method().label()}, {"level", r.level()},      {"beta_lower", r.beta_lower()},
          {"beta_upper", r.beta_upper()}, {"m_lo", r.m_lo()},        {"m_hi", r.m_hi()},
          {"last", r.last()}};
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(7) << x;
  return os.str();
}

void print(const json& j) { std::cout << j.dump(2) << '\n'; }

RegionMethod region_method(const std::string& name, int j) {
  if (name == "b") return RegionMethod::b();
  return RegionMethod::aj(j);
}

std::string pct(double level) {
  std::ostringstream os;
  os << level * 100 << '%';
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inference for Weibull parameters from upper record values"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "wrec 1.0.0");

  CommonOptions common;
  std::uint64_t seed = 20140101;
  std::size_t M = kDefaultPivotalDraws;
  int parallelism = 1;
  double beta0 = 1.0, alpha0 = 1.0;
  std::string method = "exact";
  std::uint64_t wstar_reps = kDefaultWStarReps;
  std::string wstar_cache;
  std::string out_path;
  std::string region_name = "b";
  int j = 1;
  double tolerance = kDefaultAreaTolerance;
  int points = 200;
  int table = 0;
  std::string config_path;
  std::optional<std::uint64_t> reps;

  auto* extract = app.add_subcommand("extract", "Print the upper records of a raw series");
  add_data(extract, common.data);
  extract->add_flag("--json", common.json_out, "JSON output");

  auto* fit = app.add_subcommand("fit", "Maximum likelihood estimates");
  add_common(fit, common, false);

  auto* ci_shape = app.add_subcommand("ci-shape", "Confidence interval for the shape beta");
  add_common(ci_shape, common, false);
  ci_shape->add_option("--method", method, "exact or wu")->check(CLI::IsMember({"exact", "wu"}));
  ci_shape->add_option("--wstar-reps", wstar_reps, "Replications for the W* percentile table")
      ->check(CLI::Range(std::uint64_t{1000}, std::uint64_t{100'000'000}));
  ci_shape->add_option("--wstar-table", wstar_cache, "W* table cache file (read if present, else written)");
  ci_shape->add_option("--seed", seed, "Master seed");

  auto* test_shape = app.add_subcommand("test-shape", "Exact test on beta");
  add_common(test_shape, common, true);
  test_shape->add_option("--beta0", beta0, "Null value of beta")->required()->check(CLI::PositiveNumber);

  auto* ci_scale = app.add_subcommand("ci-scale", "Generalized confidence interval for the scale alpha");
  add_common(ci_scale, common, false);
  ci_scale->add_option("--M", M, "Monte Carlo draws")->check(CLI::Range(std::size_t{1000}, std::size_t{1'000'000'000}));
  ci_scale->add_option("--seed", seed, "Master seed");
  ci_scale->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::Range(1, 1024));
  ci_scale->add_option("--out", out_path, "Write the pivotal draws as CSV");

  auto* test_scale = app.add_subcommand("test-scale", "Generalized p-value for alpha");
  add_common(test_scale, common, true);
  test_scale->add_option("--alpha0", alpha0, "Null value of alpha")->required()->check(CLI::PositiveNumber);
  test_scale->add_option("--M", M, "Monte Carlo draws")->check(CLI::Range(std::size_t{1000}, std::size_t{1'000'000'000}));
  test_scale->add_option("--seed", seed, "Master seed");
  test_scale->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::Range(1, 1024));

  auto add_region_opts = [&](CLI::App* sub) {
    add_common(sub, common, false);
    sub->add_option("--method", region_name, "b or aj")->check(CLI::IsMember({"b", "aj"}));
    sub->add_option("--j", j, "Index j for A_j")->check(CLI::PositiveNumber);
  };
  auto* region = app.add_subcommand("region", "Joint confidence region for (alpha, beta)");
  add_region_opts(region);
  auto* area_cmd = app.add_subcommand("area", "Area of a joint confidence region");
  add_region_opts(area_cmd);
  area_cmd->add_option("--tolerance", tolerance, "Absolute quadrature tolerance")->check(CLI::PositiveNumber);
  auto* boundary = app.add_subcommand("boundary", "Boundary polyline of a joint confidence region");
  add_region_opts(boundary);
  boundary->add_option("--points", points, "Number of beta grid points")->check(CLI::Range(2, 10'000'000));
  boundary->add_option("--out", out_path, "CSV output path (default stdout)");

  auto* simulate = app.add_subcommand("simulate", "Simulation study for table 1, 2 or 3");
  simulate->add_option("--table", table, "Table number")->required()->check(CLI::IsMember({1, 2, 3}));
  simulate->add_option("--config", config_path, "key = value configuration file");
  simulate->add_option("--reps", reps, "Replications per cell")->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1'000'000'000}));
  auto* sim_m = simulate->add_option("--M", M, "Pivotal draws per replication (table 1)")
                    ->check(CLI::Range(std::size_t{1000}, std::size_t{1'000'000'000}));
  auto* sim_seed = simulate->add_option("--seed", seed, "Master seed");
  auto* sim_par = simulate->add_option("--parallelism", parallelism, "Worker threads")->check(CLI::Range(1, 1024));
  simulate->add_option("--out", out_path, "Output file (.json for JSON, otherwise CSV)");
  simulate->add_flag("--json", common.json_out, "Print the report as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const auto* seed_opt = app.get_subcommands().front()->get_option_no_throw("--seed");
    const bool seed_given = seed_opt && seed_opt->count() > 0;
    if (!seed_given) seed = env_u64("WREC_SEED", seed);
    const double budget = env_double("WREC_BUDGET", kDefaultDrawBudget);
    const auto kind = common.one_sided ? Alternative::OneSidedUpper : Alternative::TwoSided;
    const double level = common.level;
    if (!(level > 0.0 && level < 1.0)) throw CLI::ValidationError("--level", "must lie strictly between 0 and 1");

    if (extract->parsed()) {
      const auto s = load_records(DataOptions{common.data.data, common.data.input, true});
      if (common.json_out) {
        print(json{{"records", std::vector<double>(s.values().begin(), s.values().end())}});
      } else {
        std::cout << std::setprecision(17);
        for (double r : s.values()) std::cout << r << '\n';
      }
    } else if (fit->parsed()) {
      const auto s = load_records(common.data);
      const auto est = mle(s);
      const auto st = sufficient_stats(s);
      if (common.json_out) {
        print({{"n", s.n()}, {"beta_hat", est.beta_hat}, {"alpha_hat", est.alpha_hat}, {"log_ratio_sum", st.log_ratio_sum}});
      } else {
        std::cout << "n = " << s.n() << "\nbeta_hat = " << fmt(est.beta_hat) << "\nalpha_hat = " << fmt(est.alpha_hat)
                  << "\nS = " << fmt(st.log_ratio_sum) << '\n';
      }
    } else if (ci_shape->parsed()) {
      const auto s = load_records(common.data);
      ConfidenceInterval ci;
      json extra;
      if (method == "exact") {
        ci = exact_ci_shape(s, level);
      } else {
        const auto probs = wstar_probs_for(level);
        std::optional<WStarTable> table_cache;
        if (!wstar_cache.empty() && std::ifstream(wstar_cache)) {
          auto loaded = load_wstar_table(wstar_cache);
          bool usable = loaded.n == s.n();
          for (double p : probs) usable = usable && loaded.percentiles.count(p);
          if (usable) table_cache = std::move(loaded);
        }
        if (!table_cache) {
          table_cache = wstar_table(s.n(), probs, wstar_reps, seed);
          if (!wstar_cache.empty()) save_wstar_table(*table_cache, wstar_cache);
        }
        ci = wu_ci_shape(s, level, *table_cache);
        extra = {{"wstar_reps", table_cache->reps}, {"seed", table_cache->seed}};
      }
      if (common.json_out) {
        auto j = interval_json(ci);
        j["parameter"] = "beta";
        if (!extra.is_null()) j.update(extra);
        print(j);
      } else {
        std::cout << to_string(ci.method) << ' ' << pct(level) << " CI for beta: (" << fmt(ci.lower) << ", "
                  << fmt(ci.upper) << ")\n";
      }
    } else if (test_shape->parsed()) {
      const auto s = load_records(common.data);
      const auto t = exact_test_shape(s, beta0, level, kind);
      if (common.json_out) {
        print({{"parameter", "beta"}, {"beta0", beta0}, {"statistic", t.statistic}, {"p_value", *t.p_value},
               {"reject", t.reject}, {"level", t.level}, {"hypotheses", to_string(t.hypotheses)}});
      } else {
        std::cout << "U0 = " << fmt(t.statistic) << ", p = " << fmt(*t.p_value) << " (" << to_string(t.hypotheses)
                  << "): " << (t.reject ? "reject" : "do not reject") << " beta = " << beta0 << " at "
                  << 1.0 - level << '\n';
      }
    } else if (ci_scale->parsed() || test_scale->parsed()) {
      const auto s = load_records(common.data);
      if (static_cast<double>(M) > budget) throw config_error("M exceeds WREC_BUDGET");
      const RngStream rng(seed, 0);
      const auto draws = draw_pivotal_t(s, M, rng, parallelism);
      if (ci_scale->parsed()) {
        const auto ci = generalized_ci_scale(draws, level);
        if (!out_path.empty()) {
          std::ofstream out(out_path);
          if (!out) throw wrec::error("cannot write " + out_path);
          write_draws_csv(out, draws);
        }
        if (common.json_out) {
          auto j = interval_json(ci);
          j["parameter"] = "alpha";
          j["M"] = M;
          j["seed"] = seed;
          print(j);
        } else {
          std::cout << to_string(ci.method) << ' ' << pct(level) << " CI for alpha: (" << fmt(ci.lower) << ", "
                    << fmt(ci.upper) << ")  [M = " << M << ", seed = " << seed << "]\n";
        }
      } else {
        const auto g = gpv_scale(draws, alpha0, kind);
        const bool reject = g.p_value < 1.0 - level;
        if (common.json_out) {
          print({{"parameter", "alpha"}, {"alpha0", alpha0}, {"p_value", g.p_value}, {"mc_se", g.mc_se},
                 {"reject", reject}, {"level", level}, {"hypotheses", to_string(g.hypotheses)}, {"M", M},
                 {"seed", seed}});
        } else {
          std::cout << "generalized p = " << fmt(g.p_value) << " (MC se " << fmt(g.mc_se) << ", "
                    << to_string(g.hypotheses) << "): " << (reject ? "reject" : "do not reject")
                    << " alpha = " << alpha0 << " at " << 1.0 - level << '\n';
        }
      }
    } else if (region->parsed() || area_cmd->parsed() || boundary->parsed()) {
      const auto s = load_records(common.data);
      const auto r = make_region(s, region_method(region_name, j), level);
      if (region->parsed()) {
        if (common.json_out) {
          print(region_json(r));
        } else {
          std::cout << r.method().label() << ' ' << pct(level) << " region: " << fmt(r.beta_lower()) << " < beta < "
                    << fmt(r.beta_upper()) << ", " << fmt(r.last()) << " * " << fmt(r.m_lo())
                    << "^(1/beta) < alpha < " << fmt(r.last()) << " * " << fmt(r.m_hi()) << "^(1/beta)\n";
        }
      } else if (area_cmd->parsed()) {
        const auto a = area(r, tolerance);
        if (common.json_out) {
          auto j = region_json(r);
          j["area"] = a.value;
          j["tolerance"] = a.abs_tolerance;
          j["evaluations"] = a.evaluations;
          print(j);
        } else {
          std::cout << r.method().label() << " area = " << fmt(a.value) << " (tolerance " << a.abs_tolerance << ")\n";
        }
      } else {
        const auto poly = boundary_polyline(r, points);
        if (out_path.empty()) {
          write_boundary_csv(std::cout, poly);
        } else {
          std::ofstream out(out_path);
          if (!out) throw wrec::error("cannot write " + out_path);
          write_boundary_csv(out, poly);
        }
      }
    } else if (simulate->parsed()) {
      const auto t = static_cast<Table>(table);
      auto cfg = default_config(t);
      if (!config_path.empty()) cfg = load_config(config_path, cfg);
      if (reps) cfg.reps = *reps;
      if (sim_m->count()) cfg.M = M;
      if (sim_seed->count() || std::getenv("WREC_SEED")) cfg.seed = seed;
      if (sim_par->count()) cfg.parallelism = parallelism;
      if (std::getenv("WREC_BUDGET")) cfg.budget = budget;
      validate(cfg, t);

      const bool json_file = out_path.size() >= 5 && out_path.substr(out_path.size() - 5) == ".json";
      std::ofstream csv;
      if (!out_path.empty() && !json_file) {
        csv.open(out_path);
        if (!csv) throw wrec::error("cannot write " + out_path);
        csv << kReportCsvHeader << '\n' << std::flush;
      }
      const auto report = run_table(t, cfg, [&](const SimulationCell& c) {
        std::cerr << "cell alpha=" << c.alpha << " beta=" << c.beta << " n=" << c.n << ' ' << c.method
                  << ": coverage " << fmt(c.coverage) << ", size " << fmt(c.expected_length_or_area) << std::endl;
        if (csv.is_open()) {
          write_csv_row(csv, c);
          csv.flush();
        }
      });
      if (json_file) {
        std::ofstream out(out_path);
        if (!out) throw wrec::error("cannot write " + out_path);
        out << to_json(report).dump(2) << '\n';
      }
      if (common.json_out) print(to_json(report));
      else if (out_path.empty()) write_csv(std::cout, report);
    }
  } catch (const config_error& e) {
    std::cerr << "wrec: " << e.what() << '\n';
    return 2;
  } catch (const CLI::ParseError& e) {
    std::cerr << "wrec: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "wrec: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
