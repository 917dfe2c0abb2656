#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cecdpop/consistency.hpp"
#include "cecdpop/error.hpp"
#include "cecdpop/instance.hpp"
#include "cecdpop/propagation.hpp"
#include "cecdpop/pseudotree.hpp"
#include "cecdpop/simulator.hpp"
#include "cecdpop/view.hpp"

namespace cecdpop {

enum class Algorithm { Dpop, BfsDpop, AcDpop, CecDpop };

inline constexpr std::array<Algorithm, 4> kAllAlgorithms = {Algorithm::Dpop, Algorithm::BfsDpop,
                                                            Algorithm::AcDpop, Algorithm::CecDpop};

inline const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Dpop: return "dpop";
    case Algorithm::BfsDpop: return "bfs-dpop";
    case Algorithm::AcDpop: return "ac-dpop";
    case Algorithm::CecDpop: return "cec-dpop";
  }
  return "?";
}

inline Algorithm parse_algorithm(const std::string& name) {
  for (auto a : kAllAlgorithms) {
    if (name == to_string(a)) return a;
  }
  throw InvalidConfig("unknown algorithm '" + name + "'");
}

struct SolveOptions {
  std::uint64_t order_seed = 0;
  std::size_t round_limit = 0;
  std::size_t table_budget = kDefaultTableBudget;
  // Drop single values that occur in no surviving pair of a reduced cross
  // edge. Pair masks are applied either way.
  bool prune_domains = true;
  // Run the consistency phases for real but account UTIL by shape only; the
  // result then carries metrics and no solution.
  bool shapes_only = false;
  Transcript* transcript = nullptr;
};

struct SolveResult {
  // False for shape-only runs that reached the UTIL phase.
  bool solved = true;
  bool feasible = false;
  Utility utility = 0;
  Assignment assignment;
  Metrics metrics;
  // Values surviving all consistency phases, summed over variables.
  std::size_t surviving_values = 0;
};

namespace detail {

inline void merge_phase(Metrics& into, const PhaseMetrics& p) {
  for (auto& q : into.phases) {
    if (q.phase == p.phase) {
      q.messages += p.messages;
      q.entries += p.entries;
      q.max_entries = std::max(q.max_entries, p.max_entries);
      // Components run side by side.
      q.rounds = std::max(q.rounds, p.rounds);
      q.millis += p.millis;
      return;
    }
  }
  into.phases.push_back(p);
}

inline SolveResult solve_connected(const DcopInstance& p, Algorithm algo, const SolveOptions& opts) {
  SolveResult result;
  RunOptions run{opts.order_seed, opts.round_limit, p.max_domain_size(), opts.transcript};
  const auto graph = ConstraintGraph::of(p);
  const auto root = choose_root(graph);
  const auto tree = algo == Algorithm::Dpop ? build_dfs_tree(graph, root) : build_bfs_tree(graph, root);

  auto domains = full_domains(p);
  std::map<Edge, ConsistencyMatrix> masks;
  const bool consistency = (algo == Algorithm::AcDpop || algo == Algorithm::CecDpop) &&
                           !p.hard_constraints().empty();
  auto count = [&] {
    result.surviving_values = 0;
    for (const auto& d : domains) result.surviving_values += d.size();
  };
  if (consistency) {
    auto ac = enforce_arc_consistency(p, run);
    result.metrics.phases.push_back(ac.metrics);
    domains = std::move(ac.domains);
    count();
    if (ac.wiped_out) return result;
  }
  if (consistency && algo == Algorithm::CecDpop) {
    const LcaIndex lca(tree);
    const auto cross = cross_edge_sets(tree, lca);
    auto paths = construct_paths(tree, cross, run);
    result.metrics.phases.push_back(paths.metrics);
    auto cec = propagate_cec(p, tree, domains, paths.next, cross, run);
    result.metrics.phases.push_back(cec.metrics);
    if (opts.prune_domains) {
      auto pruned = apply_pruning(domains, cec.reduced);
      domains = std::move(pruned.domains);
      masks = std::move(pruned.pair_masks);
      count();
      if (pruned.infeasible) return result;
    } else {
      masks = std::move(cec.reduced);
    }
  }
  count();

  const auto view = make_view(p, domains, masks);
  const auto plan = plan_elimination(tree, graph);
  const PropagationSetup setup{&tree, &view, &plan, opts.table_budget, opts.shapes_only};
  const auto util = util_phase(setup, run);
  result.metrics.phases.push_back(util.metrics);
  if (opts.shapes_only) {
    result.solved = false;
    return result;
  }
  if (util.optimum == kInfeasible) return result;
  const auto value = value_phase(setup, util, run);
  result.metrics.phases.push_back(value.metrics);
  if (value.infeasible) return result;
  result.feasible = true;
  result.utility = util.optimum;
  result.assignment = to_assignment(p, view, value.positions);
  return result;
}

// The sub-instance induced by `vars` (ascending), with ids renumbered.
inline DcopInstance induced(const DcopInstance& p, const std::vector<VarId>& vars) {
  std::vector<int> local(p.num_variables(), -1);
  std::vector<std::vector<Value>> domains;
  for (std::size_t k = 0; k < vars.size(); ++k) {
    local[static_cast<std::size_t>(vars[k])] = static_cast<int>(k);
    domains.push_back(p.domain(vars[k]));
  }
  std::vector<SoftConstraint> soft;
  std::vector<HardConstraint> hard;
  for (auto s : p.soft_constraints()) {
    if (local[static_cast<std::size_t>(s.first)] < 0) continue;
    s.first = local[static_cast<std::size_t>(s.first)];
    s.second = local[static_cast<std::size_t>(s.second)];
    soft.push_back(std::move(s));
  }
  for (auto h : p.hard_constraints()) {
    if (local[static_cast<std::size_t>(h.first)] < 0) continue;
    h.first = local[static_cast<std::size_t>(h.first)];
    h.second = local[static_cast<std::size_t>(h.second)];
    hard.push_back(std::move(h));
  }
  return DcopInstance(std::move(domains), std::move(soft), std::move(hard));
}

}  // namespace detail

// Runs one pipeline end to end on the simulator. Disconnected instances are
// solved per component and the results combined.
inline SolveResult solve(const DcopInstance& p, Algorithm algo, const SolveOptions& opts = {}) {
  const auto components = ConstraintGraph::of(p).components();
  if (components.size() == 1) return detail::solve_connected(p, algo, opts);
  SolveResult total;
  total.feasible = true;
  total.assignment.assign(p.num_variables(), 0);
  for (const auto& vars : components) {
    const auto sub = detail::induced(p, vars);
    auto r = detail::solve_connected(sub, algo, opts);
    for (const auto& ph : r.metrics.phases) detail::merge_phase(total.metrics, ph);
    total.surviving_values += r.surviving_values;
    total.solved = total.solved && r.solved;
    if (!r.feasible) {
      total.feasible = false;
      continue;
    }
    total.utility += r.utility;
    for (std::size_t k = 0; k < vars.size(); ++k) total.assignment[static_cast<std::size_t>(vars[k])] = r.assignment[k];
  }
  if (!total.feasible) {
    total.utility = 0;
    total.assignment.clear();
  }
  return total;
}

}  // namespace cecdpop
