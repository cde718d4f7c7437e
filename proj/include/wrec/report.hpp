#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

namespace wrec {

/// One (alpha, beta, n, method) cell of a simulation study.
/// For test-size cells `coverage` holds the empirical rejection rate.
struct SimulationCell {
  double alpha = 0.0;
  double beta = 0.0;
  int n = 0;
  std::string method;
  double coverage = 0.0;
  double coverage_se = 0.0;
  double expected_length_or_area = 0.0;
  double expected_length_or_area_se = 0.0;
  std::uint64_t reps = 0;

  friend bool operator==(const SimulationCell&, const SimulationCell&) = default;
};

struct SimulationReport {
  std::string table;
  std::uint64_t seed = 0;
  std::vector<SimulationCell> cells;

  friend bool operator==(const SimulationReport&, const SimulationReport&) = default;

  const SimulationCell* find(double alpha, double beta, int n, const std::string& method) const {
    for (const auto& c : cells) {
      if (c.alpha == alpha && c.beta == beta && c.n == n && c.method == method) return &c;
    }
    return nullptr;
  }
};

/// Running mean and sample standard error (Welford).
class MeanAccumulator {
 public:
  void add(double x) noexcept {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }
  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double standard_error() const noexcept {
    if (count_ < 2) return 0.0;
    return std::sqrt(m2_ / static_cast<double>(count_ - 1) / static_cast<double>(count_));
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

inline constexpr const char* kReportCsvHeader =
    "alpha,beta,n,method,coverage,coverage_se,expected_length_or_area,expected_length_or_area_se,reps";

inline void write_csv_row(std::ostream& out, const SimulationCell& c) {
  std::ostringstream row;
  row << std::setprecision(17) << c.alpha << ',' << c.beta << ',' << c.n << ',' << c.method << ',' << c.coverage << ','
      << c.coverage_se << ',' << c.expected_length_or_area << ',' << c.expected_length_or_area_se << ',' << c.reps;
  out << row.str() << '\n';
}

inline void write_csv(std::ostream& out, const SimulationReport& r) {
  out << kReportCsvHeader << '\n';
  for (const auto& c : r.cells) write_csv_row(out, c);
}

inline nlohmann::json to_json(const SimulationCell& c) {
  return {{"alpha", c.alpha},
          {"beta", c.beta},
          {"n", c.n},
          {"method", c.method},
          {"coverage", c.coverage},
          {"coverage_se", c.coverage_se},
          {"expected_length_or_area", c.expected_length_or_area},
          {"expected_length_or_area_se", c.expected_length_or_area_se},
          {"reps", c.reps}};
}

inline nlohmann::json to_json(const SimulationReport& r) {
  nlohmann::json j{{"schema", "wrec.simulation_report"}, {"version", 1}, {"table", r.table}, {"seed", r.seed}};
  auto& cells = j["cells"] = nlohmann::json::array();
  for (const auto& c : r.cells) cells.push_back(to_json(c));
  return j;
}

inline SimulationReport simulation_report_from_json(const nlohmann::json& j) {
  SimulationReport r;
  r.table = j.at("table").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& c : j.at("cells")) {
    r.cells.push_back({c.at("alpha").get<double>(), c.at("beta").get<double>(), c.at("n").get<int>(),
                       c.at("method").get<std::string>(), c.at("coverage").get<double>(),
                       c.at("coverage_se").get<double>(), c.at("expected_length_or_area").get<double>(),
                       c.at("expected_length_or_area_se").get<double>(), c.at("reps").get<std::uint64_t>()});
  }
  return r;
}

}  // namespace wrec
