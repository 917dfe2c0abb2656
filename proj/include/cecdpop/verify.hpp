#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cecdpop/consistency.hpp"
#include "cecdpop/error.hpp"
#include "cecdpop/instance.hpp"
#include "cecdpop/oracle.hpp"
#include "cecdpop/pseudotree.hpp"
#include "cecdpop/solver.hpp"

namespace cecdpop {

enum class CheckStatus { Pass, Fail, Skip };

inline const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "PASS";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Skip: return "SKIP";
  }
  return "?";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t oracle_budget = oracle::kDefaultBudget;
  // Extra shuffled processing orders for the arc-consistency comparison.
  std::size_t order_seeds = 10;
};

inline std::string describe_domains(const DomainSets& d) {
  std::ostringstream os;
  for (std::size_t x = 0; x < d.size(); ++x) {
    os << 'x' << x << "={";
    for (std::size_t k = 0; k < d[x].size(); ++k) os << (k ? "," : "") << d[x][k];
    os << '}';
  }
  return os.str();
}

// Every solver pipeline against the exhaustive optimum.
inline CheckResult check_optimality(const DcopInstance& p, const VerifyOptions& o = {}) {
  CheckResult r{"optimality", CheckStatus::Pass, ""};
  oracle::OracleResult truth;
  try {
    truth = oracle::brute_force_solve(p, o.oracle_budget);
  } catch (const BudgetExceeded& e) {
    return {r.name, CheckStatus::Skip, e.what()};
  }
  for (auto algo : kAllAlgorithms) {
    const auto s = solve(p, algo);
    std::ostringstream why;
    if (s.feasible != truth.optimum.has_value()) {
      why << to_string(algo) << ": feasible=" << s.feasible << " oracle=" << truth.optimum.has_value();
    } else if (s.feasible && s.utility != *truth.optimum) {
      why << to_string(algo) << ": utility " << s.utility << " oracle " << *truth.optimum;
    } else if (s.feasible && evaluate(p, s.assignment) != Evaluation{s.utility}) {
      why << to_string(algo) << ": assignment does not evaluate to reported utility";
    }
    if (!why.str().empty()) return {r.name, CheckStatus::Fail, why.str()};
  }
  r.detail = truth.optimum ? "optimum " + std::to_string(*truth.optimum) : "infeasible";
  return r;
}

inline CheckResult check_arc_consistency(const DcopInstance& p, const VerifyOptions& o = {}) {
  const auto truth = oracle::centralized_ac3(p);
  for (std::uint64_t seed = 0; seed <= o.order_seeds; ++seed) {
    RunOptions run;
    run.order_seed = seed;
    const auto got = enforce_arc_consistency(p, run);
    if (got.domains != truth.domains) {
      return {"arc-consistency", CheckStatus::Fail,
              "seed " + std::to_string(seed) + ": " + describe_domains(got.domains) + " vs " +
                  describe_domains(truth.domains)};
    }
  }
  return {"arc-consistency", CheckStatus::Pass, ""};
}

// Everything CeC needs on a connected instance, computed the way the
// CeC-DPOP pipeline does.
struct CecRun {
  PseudoTree tree;
  DomainSets ac_domains;
  bool wiped_out = false;
  CecResult cec;
};

inline CecRun run_cec(const DcopInstance& p, const RunOptions& run = {}) {
  const auto graph = ConstraintGraph::of(p);
  CecRun r{build_bfs_tree(graph, choose_root(graph)), {}, false, {}};
  auto ac = enforce_arc_consistency(p, run);
  r.ac_domains = std::move(ac.domains);
  r.wiped_out = ac.wiped_out;
  if (r.wiped_out) return r;
  const LcaIndex lca(r.tree);
  const auto cross = cross_edge_sets(r.tree, lca);
  const auto paths = construct_paths(r.tree, cross, run);
  r.cec = propagate_cec(p, r.tree, r.ac_domains, paths.next, cross, run);
  return r;
}

// Surviving pair set of a reduced matrix, as original positions.
inline std::set<std::pair<std::size_t, std::size_t>> surviving_pairs(const ConsistencyMatrix& m,
                                                                     const std::vector<std::size_t>& rows,
                                                                     const std::vector<std::size_t>& cols) {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (m.get(i, j)) out.emplace(rows[i], cols[j]);
    }
  }
  return out;
}

inline CheckResult check_cec_exactness(const DcopInstance& p, const VerifyOptions& o = {}) {
  CheckResult r{"cec-exactness", CheckStatus::Pass, ""};
  if (!ConstraintGraph::of(p).connected()) return {r.name, CheckStatus::Skip, "disconnected"};
  const auto run = run_cec(p);
  if (run.wiped_out) return {r.name, CheckStatus::Skip, "arc consistency wipe-out"};
  std::size_t checked = 0;
  for (const auto& e : run.tree.edges_of(EdgeClass::Cross)) {
    const auto it = run.cec.reduced.find(e);
    if (it == run.cec.reduced.end()) return {r.name, CheckStatus::Fail, "no reduced matrix for a cross edge"};
    std::set<std::pair<std::size_t, std::size_t>> want;
    try {
      want = oracle::path_pair_oracle(p, run.ac_domains, run.tree, e, o.oracle_budget);
    } catch (const BudgetExceeded& ex) {
      return {r.name, CheckStatus::Skip, ex.what()};
    }
    const auto got = surviving_pairs(it->second, run.ac_domains[static_cast<std::size_t>(e.a)],
                                     run.ac_domains[static_cast<std::size_t>(e.b)]);
    if (got != want) {
      return {r.name, CheckStatus::Fail,
              "x" + std::to_string(e.a) + "-x" + std::to_string(e.b) + ": " + std::to_string(got.size()) +
                  " pairs vs oracle " + std::to_string(want.size())};
    }
    ++checked;
  }
  r.detail = std::to_string(checked) + " cross edges";
  return r;
}

// No value or pair removed by the consistency phases occurs in a feasible
// assignment.
inline CheckResult check_pruning_soundness(const DcopInstance& p, const VerifyOptions& o = {}) {
  CheckResult r{"pruning-soundness", CheckStatus::Pass, ""};
  if (!ConstraintGraph::of(p).connected()) return {r.name, CheckStatus::Skip, "disconnected"};
  const auto run = run_cec(p);
  PruningResult pruned;
  if (run.wiped_out) {
    pruned.domains = run.ac_domains;
    pruned.infeasible = true;
  } else {
    pruned = apply_pruning(run.ac_domains, run.cec.reduced);
  }
  std::string bad;
  try {
    oracle::for_each_feasible(
        p,
        [&](const std::vector<std::size_t>& pos, Utility) {
          if (!bad.empty()) return;
          if (pruned.infeasible) {
            bad = "feasible assignment exists but pruning reported infeasible";
            return;
          }
          for (std::size_t x = 0; x < pos.size(); ++x) {
            const auto& d = pruned.domains[x];
            if (!std::binary_search(d.begin(), d.end(), pos[x])) {
              bad = "x" + std::to_string(x) + " value position " + std::to_string(pos[x]) + " pruned";
              return;
            }
          }
          for (const auto& [e, m] : pruned.pair_masks) {
            const auto& da = pruned.domains[static_cast<std::size_t>(e.a)];
            const auto& db = pruned.domains[static_cast<std::size_t>(e.b)];
            const auto i = std::lower_bound(da.begin(), da.end(), pos[static_cast<std::size_t>(e.a)]) - da.begin();
            const auto j = std::lower_bound(db.begin(), db.end(), pos[static_cast<std::size_t>(e.b)]) - db.begin();
            if (!m.get(static_cast<std::size_t>(i), static_cast<std::size_t>(j))) {
              bad = "pair on x" + std::to_string(e.a) + "-x" + std::to_string(e.b) + " pruned";
              return;
            }
          }
        },
        o.oracle_budget);
  } catch (const BudgetExceeded& ex) {
    return {r.name, CheckStatus::Skip, ex.what()};
  }
  if (!bad.empty()) return {r.name, CheckStatus::Fail, bad};
  return r;
}

inline std::vector<CheckResult> verify_instance(const DcopInstance& p, const VerifyOptions& o = {}) {
  return {check_optimality(p, o), check_arc_consistency(p, o), check_cec_exactness(p, o),
          check_pruning_soundness(p, o)};
}

}  // namespace cecdpop
