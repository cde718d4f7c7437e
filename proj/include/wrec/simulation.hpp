#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "wrec/error.hpp"
#include "wrec/numeric.hpp"
#include "wrec/records.hpp"
#include "wrec/region.hpp"
#include "wrec/report.hpp"
#include "wrec/rng.hpp"
#include "wrec/scale.hpp"
#include "wrec/shape.hpp"

namespace wrec {

struct SimMethod {
  enum class Kind { GeneralizedPivotal, ExactChiSquare, WuTseng, RegionB, RegionA, RegionADefault };
  Kind kind = Kind::ExactChiSquare;
  int j = 0;

  /// Parses GP, E, W, B, A<j> and A* (the two default A_j for each n).
  static SimMethod parse(const std::string& tag) {
    if (tag == "GP") return {Kind::GeneralizedPivotal, 0};
    if (tag == "E") return {Kind::ExactChiSquare, 0};
    if (tag == "W") return {Kind::WuTseng, 0};
    if (tag == "B") return {Kind::RegionB, 0};
    if (tag == "A*") return {Kind::RegionADefault, 0};
    if (tag.size() > 1 && tag[0] == 'A') {
      try {
        std::size_t used = 0;
        const int j = std::stoi(tag.substr(1), &used);
        if (used == tag.size() - 1 && j >= 1) return {Kind::RegionA, j};
      } catch (const std::exception&) {
      }
    }
    throw config_error("unknown method tag '" + tag + "'");
  }

  std::string label() const {
    switch (kind) {
      case Kind::GeneralizedPivotal: return "GP";
      case Kind::ExactChiSquare: return "E";
      case Kind::WuTseng: return "W";
      case Kind::RegionB: return "B";
      case Kind::RegionA: return "A" + std::to_string(j);
      case Kind::RegionADefault: return "A*";
    }
    return "?";
  }
  friend bool operator==(const SimMethod&, const SimMethod&) = default;
};

struct SimulationConfig {
  std::vector<double> alphas{1.0};
  std::vector<double> betas{1.0};
  std::vector<int> ns{3};
  std::vector<SimMethod> methods;
  std::uint64_t reps = 2000;
  double level = 0.95;
  std::size_t M = kDefaultPivotalDraws;
  std::uint64_t seed = 20140101;
  int parallelism = 1;
  std::uint64_t wstar_reps = kDefaultWStarReps;
  double budget = kDefaultDrawBudget;  ///< per-cell ceiling on reps * M
  double area_tolerance = 1e-2;        ///< per-replicate quadrature tolerance for region areas
};

enum class Table { One = 1, Two = 2, Three = 3 };

/// Full parameter grids with small replication counts.
inline SimulationConfig default_config(Table t) {
  SimulationConfig cfg;
  cfg.betas = {0.5, 1.0, 1.2, 1.5, 2.0, 3.0, 5.0};
  switch (t) {
    case Table::One:
      cfg.alphas = {1.0, 2.0};
      cfg.ns = {3, 7, 9, 14};
      cfg.methods = {SimMethod::parse("GP")};
      break;
    case Table::Two:
      cfg.alphas = {1.0, 2.0};
      cfg.ns = {3, 7, 9, 14};
      cfg.methods = {SimMethod::parse("E"), SimMethod::parse("W")};
      break;
    case Table::Three:
      // n keeps its meaning of "n+1 records"; A_j needs j <= n.
      cfg.alphas = {1.0};
      cfg.ns = {4, 6, 9, 14, 29};
      cfg.methods = {SimMethod::parse("A*"), SimMethod::parse("B")};
      break;
  }
  return cfg;
}

namespace detail {

template <class T>
std::vector<T> parse_list(const std::string& text, T (*convert)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(convert(item.substr(b, e - b + 1)));
  }
  return out;
}

inline double to_double(const std::string& s) {
  std::size_t used = 0;
  const double v = std::stod(s, &used);
  if (used != s.size()) throw config_error("not a number: '" + s + "'");
  return v;
}
inline int to_int(const std::string& s) {
  std::size_t used = 0;
  const int v = std::stoi(s, &used);
  if (used != s.size()) throw config_error("not an integer: '" + s + "'");
  return v;
}
inline std::uint64_t to_u64(const std::string& s) {
  std::size_t used = 0;
  const auto v = std::stoull(s, &used);
  if (used != s.size() || s.front() == '-') throw config_error("not an unsigned integer: '" + s + "'");
  return v;
}
inline SimMethod to_method(const std::string& s) { return SimMethod::parse(s); }

inline std::uint64_t cell_tag(Table table, double alpha, double beta, int n) {
  std::uint64_t a = 0, b = 0;
  std::memcpy(&a, &alpha, sizeof a);
  std::memcpy(&b, &beta, sizeof b);
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(table));
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return splitmix64(h ^ static_cast<std::uint64_t>(n));
}

}  // namespace detail

/**
 * Reads `key = value` lines ('#' starts a comment). Keys mirror
 * SimulationConfig: alphas, betas, ns, methods (comma lists), reps, level, M,
 * seed, parallelism, wstar_reps, budget, area_tolerance. Unset keys keep the
 * values already in `base`.
 */
inline SimulationConfig parse_config(std::istream& in, SimulationConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw config_error("line " + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "alphas") base.alphas = detail::parse_list<double>(value, detail::to_double);
      else if (key == "betas") base.betas = detail::parse_list<double>(value, detail::to_double);
      else if (key == "ns") base.ns = detail::parse_list<int>(value, detail::to_int);
      else if (key == "methods") base.methods = detail::parse_list<SimMethod>(value, detail::to_method);
      else if (key == "reps") base.reps = detail::to_u64(value);
      else if (key == "level") base.level = detail::to_double(value);
      else if (key == "M") base.M = detail::to_u64(value);
      else if (key == "seed") base.seed = detail::to_u64(value);
      else if (key == "parallelism") base.parallelism = detail::to_int(value);
      else if (key == "wstar_reps") base.wstar_reps = detail::to_u64(value);
      else if (key == "budget") base.budget = detail::to_double(value);
      else if (key == "area_tolerance") base.area_tolerance = detail::to_double(value);
      else throw config_error("unknown key '" + key + "'");
    } catch (const config_error& e) {
      throw config_error("line " + std::to_string(lineno) + ": " + e.what());
    } catch (const std::exception&) {
      throw config_error("line " + std::to_string(lineno) + ": bad value for '" + key + "'");
    }
  }
  return base;
}

inline SimulationConfig load_config(const std::string& path, SimulationConfig base = {}) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot read config file " + path);
  return parse_config(in, std::move(base));
}

/// Validates the configuration for `table`; throws config_error before any work starts.
inline void validate(const SimulationConfig& cfg, Table table) {
  if (cfg.reps < 100) throw config_error("reps must be at least 100");
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) throw config_error("level must lie in (0, 1)");
  if (cfg.parallelism < 1) throw config_error("parallelism must be >= 1");
  if (cfg.alphas.empty() || cfg.betas.empty() || cfg.ns.empty()) throw config_error("empty parameter grid");
  for (double a : cfg.alphas) if (!(a > 0.0)) throw config_error("alphas must be positive");
  for (double b : cfg.betas) if (!(b > 0.0)) throw config_error("betas must be positive");
  for (int n : cfg.ns) if (n < 1) throw config_error("ns must be >= 1");
  if (cfg.methods.empty()) throw config_error("no methods selected");
  for (const auto& m : cfg.methods) {
    using K = SimMethod::Kind;
    const bool ok = table == Table::One ? m.kind == K::GeneralizedPivotal
                  : table == Table::Two ? (m.kind == K::ExactChiSquare || m.kind == K::WuTseng)
                                        : (m.kind == K::RegionB || m.kind == K::RegionA || m.kind == K::RegionADefault);
    if (!ok) throw config_error("method " + m.label() + " does not belong to table " + std::to_string(static_cast<int>(table)));
    if (m.kind == K::RegionA) {
      for (int n : cfg.ns) if (m.j > n) throw config_error("A" + std::to_string(m.j) + " needs n >= j");
    }
  }
  if (table == Table::One) {
    if (cfg.M < kMinPivotalDraws) throw config_error("M must be at least 1000");
    if (static_cast<double>(cfg.reps) * static_cast<double>(cfg.M) > cfg.budget) {
      throw config_error("reps * M exceeds the per-cell budget");
    }
  }
  if (table == Table::Two && cfg.wstar_reps < 1000) throw config_error("wstar_reps must be at least 1000");
  if (table == Table::Three && !(cfg.area_tolerance > 0.0)) throw config_error("area_tolerance must be positive");
}

using CellCallback = std::function<void(const SimulationCell&)>;

namespace detail {

struct Tally {
  std::vector<char> covered;
  std::vector<double> size;
  explicit Tally(std::size_t reps) : covered(reps), size(reps) {}

  SimulationCell finish(double alpha, double beta, int n, std::string method) const {
    MeanAccumulator cov, len;
    for (std::size_t r = 0; r < covered.size(); ++r) {
      cov.add(covered[r] ? 1.0 : 0.0);
      len.add(size[r]);
    }
    return {alpha, beta, n, std::move(method), cov.mean(), cov.standard_error(), len.mean(), len.standard_error(),
            covered.size()};
  }
};

inline void emit(SimulationReport& report, SimulationCell cell, const CellCallback& on_cell) {
  if (on_cell) on_cell(cell);
  report.cells.push_back(std::move(cell));
}

}  // namespace detail

/// Coverage and expected length of the generalized CI for alpha.
/// Replication r of a cell uses stream (cell seed, r); its M draws come from splits of that stream.
inline SimulationReport run_table1(const SimulationConfig& cfg, const CellCallback& on_cell = {}) {
  validate(cfg, Table::One);
  SimulationReport report{"table1", cfg.seed, {}};
  for (double alpha : cfg.alphas) {
    for (int n : cfg.ns) {
      for (double beta : cfg.betas) {
        const std::uint64_t cell_seed = derive_seed(cfg.seed, detail::cell_tag(Table::One, alpha, beta, n));
        detail::Tally tally(cfg.reps);
        parallel_for(cfg.reps, cfg.parallelism, [&](std::size_t r) {
          RngStream rng(cell_seed, r);
          const auto sample = simulate_records_direct(alpha, beta, n, rng);
          const auto ci = generalized_ci_scale(draw_pivotal_t(sample, cfg.M, rng), cfg.level);
          tally.covered[r] = ci.contains(alpha);
          tally.size[r] = ci.length();
        });
        detail::emit(report, tally.finish(alpha, beta, n, "GP"), on_cell);
      }
    }
  }
  return report;
}

/// Exact (E) and Wu-Tseng (W) intervals for beta on the same simulated samples.
/// One W* table per n, seeded from derive_seed(seed, n).
inline SimulationReport run_table2(const SimulationConfig& cfg, const CellCallback& on_cell = {}) {
  validate(cfg, Table::Two);
  SimulationReport report{"table2", cfg.seed, {}};
  std::map<int, WStarTable> tables;
  for (const auto& m : cfg.methods) {
    if (m.kind != SimMethod::Kind::WuTseng) continue;
    for (int n : cfg.ns) {
      if (!tables.contains(n)) {
        tables.emplace(n, wstar_table(n, wstar_probs_for(cfg.level), cfg.wstar_reps,
                                      derive_seed(cfg.seed, 0x5753000000ULL + static_cast<std::uint64_t>(n)),
                                      cfg.parallelism));
      }
    }
  }
  for (double alpha : cfg.alphas) {
    for (int n : cfg.ns) {
      for (double beta : cfg.betas) {
        const std::uint64_t cell_seed = derive_seed(cfg.seed, detail::cell_tag(Table::Two, alpha, beta, n));
        std::vector<detail::Tally> tallies(cfg.methods.size(), detail::Tally(cfg.reps));
        parallel_for(cfg.reps, cfg.parallelism, [&](std::size_t r) {
          RngStream rng(cell_seed, r);
          const auto sample = simulate_records_direct(alpha, beta, n, rng);
          for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
            const auto ci = cfg.methods[k].kind == SimMethod::Kind::WuTseng
                                ? wu_ci_shape(sample, cfg.level, tables.at(n))
                                : exact_ci_shape(sample, cfg.level);
            tallies[k].covered[r] = ci.contains(beta);
            tallies[k].size[r] = ci.length();
          }
        });
        for (std::size_t k = 0; k < cfg.methods.size(); ++k) {
          detail::emit(report, tallies[k].finish(alpha, beta, n, cfg.methods[k].label()), on_cell);
        }
      }
    }
  }
  return report;
}

/// Coverage of the true (alpha, beta) and expected area for joint regions.
inline SimulationReport run_table3(const SimulationConfig& cfg, const CellCallback& on_cell = {}) {
  validate(cfg, Table::Three);
  SimulationReport report{"table3", cfg.seed, {}};
  for (double alpha : cfg.alphas) {
    for (int n : cfg.ns) {
      std::vector<RegionMethod> regions;
      for (const auto& m : cfg.methods) {
        auto add = [&](RegionMethod rm) {
          if (std::find(regions.begin(), regions.end(), rm) == regions.end()) regions.push_back(rm);
        };
        if (m.kind == SimMethod::Kind::RegionB) add(RegionMethod::b());
        else if (m.kind == SimMethod::Kind::RegionA) add(RegionMethod::aj(m.j));
        else for (int j : default_aj_indices(n)) add(RegionMethod::aj(j));
      }
      for (double beta : cfg.betas) {
        const std::uint64_t cell_seed = derive_seed(cfg.seed, detail::cell_tag(Table::Three, alpha, beta, n));
        std::vector<detail::Tally> tallies(regions.size(), detail::Tally(cfg.reps));
        parallel_for(cfg.reps, cfg.parallelism, [&](std::size_t r) {
          RngStream rng(cell_seed, r);
          const auto sample = simulate_records_direct(alpha, beta, n, rng);
          for (std::size_t k = 0; k < regions.size(); ++k) {
            const auto region = make_region(sample, regions[k], cfg.level);
            tallies[k].covered[r] = region.contains(alpha, beta);
            tallies[k].size[r] = area(region, cfg.area_tolerance).value;
          }
        });
        for (std::size_t k = 0; k < regions.size(); ++k) {
          detail::emit(report, tallies[k].finish(alpha, beta, n, regions[k].label()), on_cell);
        }
      }
    }
  }
  return report;
}

inline SimulationReport run_table(Table t, const SimulationConfig& cfg, const CellCallback& on_cell = {}) {
  switch (t) {
    case Table::One: return run_table1(cfg, on_cell);
    case Table::Two: return run_table2(cfg, on_cell);
    case Table::Three: return run_table3(cfg, on_cell);
  }
  throw config_error("unknown table");
}

}  // namespace wrec
