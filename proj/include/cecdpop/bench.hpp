#pragma once

#include <algorithm>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "cecdpop/error.hpp"
#include "cecdpop/generators.hpp"
#include "cecdpop/solver.hpp"

namespace cecdpop {

// One point of a sweep. For the rlfa family `d` is the frequency count and
// `separations` the set s is drawn from; hard_fraction is unused.
struct SweepPoint {
  std::string family = "random";
  std::size_t n = 10;
  std::size_t d = 5;
  double density = 0.5;
  double hard_fraction = 0.5;
  std::vector<int> separations{3, 4};
};

struct BenchOptions {
  std::size_t instances = 30;
  std::uint64_t base_seed = 0;
  std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
  bool shapes_only = false;
  std::size_t table_budget = kDefaultTableBudget;
  std::size_t round_limit = 0;
};

// Instance s of sweep point i is generated with seed base + 1000 * i + s.
inline std::uint64_t instance_seed(const BenchOptions& o, std::size_t point_index, std::size_t s) {
  return o.base_seed + 1000 * static_cast<std::uint64_t>(point_index) + s;
}

inline DcopInstance generate_point(const SweepPoint& p, std::uint64_t seed) {
  if (p.family == "random") {
    RandomDcopConfig c;
    c.n = p.n;
    c.d = p.d;
    c.density = p.density;
    c.hard_fraction = p.hard_fraction;
    c.seed = seed;
    return gen_random(c);
  }
  if (p.family == "rlfa") {
    RlfaConfig c;
    c.n = p.n;
    c.freqs = p.d;
    c.separations = p.separations;
    c.density = p.density;
    c.seed = seed;
    return gen_rlfa(c);
  }
  throw InvalidConfig("unknown family '" + p.family + "'");
}

struct BenchRow {
  SweepPoint point;
  Algorithm algo = Algorithm::Dpop;
  std::size_t instances = 0;
  std::size_t completed = 0;   // runs that stayed within budget
  std::size_t timeouts = 0;    // budget or round guard exceeded
  std::size_t infeasible = 0;  // runs that proved infeasibility
  double mean_messages = 0;
  double mean_entries = 0;
  double mean_max_entries = 0;
  double mean_rounds = 0;
  double mean_util_entries = 0;
  // max over instances of ac messages / (d * |X|); negative when no AC ran.
  double ac_c1 = -1;
  std::size_t max_cec_entries = 0;
  double mean_millis = 0;

  static constexpr const char* kCsvHeader =
      "family,n,d,density,hard_fraction,algo,instances,completed,timeouts,infeasible,status,"
      "mean_messages,mean_entries,mean_max_entries,mean_rounds,mean_util_entries,ac_c1,max_cec_entries,"
      "mean_millis,replicates";

  // Everything but the last two columns is a pure function of the flags.
  std::string csv() const {
    std::ostringstream os;
    os << std::fixed << std::setprecision(3);
    os << point.family << ',' << point.n << ',' << point.d << ',' << point.density << ','
       << (point.family == "random" ? point.hard_fraction : 1.0) << ',' << to_string(algo) << ','
       << instances << ',' << completed << ',' << timeouts << ',' << infeasible << ','
       << (timeouts ? "timeout" : "ok") << ',' << mean_messages << ',' << mean_entries << ','
       << mean_max_entries << ',' << mean_rounds << ',' << mean_util_entries << ',';
    if (ac_c1 >= 0) os << std::setprecision(4) << ac_c1 << std::setprecision(3);
    os << ',' << max_cec_entries << ',' << mean_millis << ',' << completed;
    return os.str();
  }
};

// Runs every algorithm on the point's instance batch.
inline std::vector<BenchRow> run_point(const SweepPoint& point, std::size_t point_index, const BenchOptions& o) {
  std::vector<BenchRow> rows(o.algorithms.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    rows[k].point = point;
    rows[k].algo = o.algorithms[k];
  }
  SolveOptions so;
  so.table_budget = o.table_budget;
  so.round_limit = o.round_limit;
  so.shapes_only = o.shapes_only;
  for (std::size_t s = 0; s < o.instances; ++s) {
    const auto p = generate_point(point, instance_seed(o, point_index, s));
    const double scale = static_cast<double>(p.max_domain_size() * p.num_variables());
    for (auto& row : rows) {
      ++row.instances;
      const auto t0 = std::chrono::steady_clock::now();
      SolveResult r;
      try {
        r = solve(p, row.algo, so);
      } catch (const BudgetExceeded&) {
        ++row.timeouts;
        continue;
      } catch (const RoundLimitExceeded&) {
        ++row.timeouts;
        continue;
      }
      const std::chrono::duration<double, std::milli> dt = std::chrono::steady_clock::now() - t0;
      ++row.completed;
      if (r.solved && !r.feasible) ++row.infeasible;
      const auto total = r.metrics.total();
      row.mean_messages += static_cast<double>(total.messages);
      row.mean_entries += static_cast<double>(total.entries);
      row.mean_max_entries += static_cast<double>(total.max_entries);
      row.mean_rounds += static_cast<double>(total.rounds);
      row.mean_util_entries += static_cast<double>(r.metrics.phase_or_empty("util").entries);
      row.mean_millis += dt.count();
      if (const auto* ac = r.metrics.find("ac")) {
        row.ac_c1 = std::max(row.ac_c1, static_cast<double>(ac->messages) / scale);
      }
      row.max_cec_entries = std::max(row.max_cec_entries, r.metrics.phase_or_empty("cec").max_entries);
    }
  }
  for (auto& row : rows) {
    if (row.completed == 0) continue;
    const auto c = static_cast<double>(row.completed);
    row.mean_messages /= c;
    row.mean_entries /= c;
    row.mean_max_entries /= c;
    row.mean_rounds /= c;
    row.mean_util_entries /= c;
    row.mean_millis /= c;
  }
  return rows;
}

}  // namespace cecdpop
