#pragma once

// Exhaustive reference implementations. Nothing here calls into the solver
// code paths; only the instance type is shared.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cecdpop/error.hpp"
#include "cecdpop/instance.hpp"
#include "cecdpop/pseudotree.hpp"

namespace cecdpop::oracle {

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

struct OracleResult {
  std::optional<Utility> optimum;
  Assignment best;
  std::uint64_t optimal_count = 0;
};

inline bool pair_allowed(const DcopInstance& p, const HardConstraint& h, std::size_t iu, std::size_t iv) {
  return h.relation.allows(p.domain(h.first)[iu], p.domain(h.second)[iv], iu, iv);
}

inline long double space_size(const DcopInstance& p) {
  long double v = 1;
  for (const auto& d : p.domains()) v *= static_cast<long double>(d.size());
  return v;
}

// Calls fn(positions, utility) for every feasible total assignment, in
// lexicographic order of domain positions.
inline void for_each_feasible(const DcopInstance& p,
                              const std::function<void(const std::vector<std::size_t>&, Utility)>& fn,
                              std::uint64_t budget = kDefaultBudget) {
  if (space_size(p) > static_cast<long double>(budget)) {
    throw BudgetExceeded("oracle: search space exceeds budget " + std::to_string(budget));
  }
  const auto n = p.num_variables();
  std::vector<std::size_t> pos(n, 0);
  while (true) {
    bool ok = true;
    for (const auto& h : p.hard_constraints()) {
      if (!pair_allowed(p, h, pos[static_cast<std::size_t>(h.first)], pos[static_cast<std::size_t>(h.second)])) {
        ok = false;
        break;
      }
    }
    if (ok) {
      Utility u = 0;
      for (const auto& s : p.soft_constraints()) {
        const auto cols = p.domain(s.second).size();
        u += s.utilities[pos[static_cast<std::size_t>(s.first)] * cols + pos[static_cast<std::size_t>(s.second)]];
      }
      fn(pos, u);
    }
    std::size_t k = n;
    for (;;) {
      if (k == 0) return;
      --k;
      if (++pos[k] < p.domains()[k].size()) break;
      pos[k] = 0;
    }
  }
}

inline OracleResult brute_force_solve(const DcopInstance& p, std::uint64_t budget = kDefaultBudget) {
  OracleResult r;
  for_each_feasible(
      p,
      [&](const std::vector<std::size_t>& pos, Utility u) {
        if (!r.optimum || u > *r.optimum) {
          r.optimum = u;
          r.optimal_count = 1;
          r.best.assign(pos.size(), 0);
          for (std::size_t x = 0; x < pos.size(); ++x) r.best[x] = p.domains()[x][pos[x]];
        } else if (u == *r.optimum) {
          ++r.optimal_count;
        }
      },
      budget);
  return r;
}

struct Ac3Result {
  // Surviving positions per variable, ascending.
  std::vector<std::vector<std::size_t>> domains;
  bool wiped_out = false;
};

// Classical AC-3 over the hard constraints.
inline Ac3Result centralized_ac3(const DcopInstance& p) {
  const auto n = p.num_variables();
  std::vector<std::vector<bool>> alive(n);
  for (std::size_t x = 0; x < n; ++x) alive[x].assign(p.domains()[x].size(), true);
  // Arc (h, forward): revise h.first against h.second when forward.
  std::deque<std::pair<std::size_t, bool>> queue;
  const auto& hard = p.hard_constraints();
  for (std::size_t k = 0; k < hard.size(); ++k) {
    queue.emplace_back(k, true);
    queue.emplace_back(k, false);
  }
  while (!queue.empty()) {
    const auto [k, forward] = queue.front();
    queue.pop_front();
    const auto& h = hard[k];
    const auto x = static_cast<std::size_t>(forward ? h.first : h.second);
    const auto y = static_cast<std::size_t>(forward ? h.second : h.first);
    bool removed = false;
    for (std::size_t i = 0; i < alive[x].size(); ++i) {
      if (!alive[x][i]) continue;
      bool support = false;
      for (std::size_t j = 0; j < alive[y].size() && !support; ++j) {
        if (alive[y][j]) support = forward ? pair_allowed(p, h, i, j) : pair_allowed(p, h, j, i);
      }
      if (!support) {
        alive[x][i] = false;
        removed = true;
      }
    }
    if (!removed) continue;
    for (std::size_t q = 0; q < hard.size(); ++q) {
      if (q == k) continue;
      // Arcs (z, x) need another look.
      if (static_cast<std::size_t>(hard[q].second) == x) queue.emplace_back(q, true);
      if (static_cast<std::size_t>(hard[q].first) == x) queue.emplace_back(q, false);
    }
  }
  Ac3Result r;
  r.domains.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t i = 0; i < alive[x].size(); ++i) {
      if (alive[x][i]) r.domains[x].push_back(i);
    }
    r.wiped_out = r.wiped_out || r.domains[x].empty();
  }
  return r;
}

// Value pairs (positions into the original domains, cross.a then cross.b) of
// a cross edge that extend to an assignment of both tree paths up to their
// common ancestor, using the given per-variable candidate positions and only
// the hard constraints on those tree hops and on the cross edge itself.
inline std::set<std::pair<std::size_t, std::size_t>> path_pair_oracle(
    const DcopInstance& p, const std::vector<std::vector<std::size_t>>& candidates, const PseudoTree& tree,
    Edge cross, std::uint64_t budget = kDefaultBudget) {
  // Ancestor chains by walking parents.
  auto chain = [&](VarId x) {
    std::vector<VarId> up{x};
    while (up.back() != tree.root()) up.push_back(tree.parent(up.back()));
    return up;
  };
  auto ua = chain(cross.a);
  auto ub = chain(cross.b);
  VarId top = kNoVar;
  for (auto v : ua) {
    if (std::find(ub.begin(), ub.end(), v) != ub.end()) {
      top = v;
      break;
    }
  }
  ua.erase(std::find(ua.begin(), ua.end(), top) + 1, ua.end());
  ub.erase(std::find(ub.begin(), ub.end(), top) + 1, ub.end());

  std::vector<VarId> vars(ua.begin(), ua.end());
  for (auto v : ub) {
    if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(v);
  }
  std::vector<std::pair<VarId, VarId>> hops;
  for (std::size_t k = 0; k + 1 < ua.size(); ++k) hops.emplace_back(ua[k], ua[k + 1]);
  for (std::size_t k = 0; k + 1 < ub.size(); ++k) hops.emplace_back(ub[k], ub[k + 1]);
  hops.emplace_back(cross.a, cross.b);
  std::vector<const HardConstraint*> gates;
  for (const auto& [x, y] : hops) {
    for (const auto& h : p.hard_constraints()) {
      if ((h.first == x && h.second == y) || (h.first == y && h.second == x)) gates.push_back(&h);
    }
  }

  long double vol = 1;
  for (auto v : vars) vol *= static_cast<long double>(candidates[static_cast<std::size_t>(v)].size());
  if (vol > static_cast<long double>(budget)) throw BudgetExceeded("path oracle: enumeration exceeds budget");

  std::set<std::pair<std::size_t, std::size_t>> out;
  for (auto v : vars) {
    if (candidates[static_cast<std::size_t>(v)].empty()) return out;
  }
  std::vector<std::size_t> k(vars.size(), 0);
  std::vector<std::size_t> at(p.num_variables(), 0);
  while (true) {
    for (std::size_t i = 0; i < vars.size(); ++i) {
      at[static_cast<std::size_t>(vars[i])] = candidates[static_cast<std::size_t>(vars[i])][k[i]];
    }
    bool ok = true;
    for (const auto* h : gates) {
      if (!pair_allowed(p, *h, at[static_cast<std::size_t>(h->first)], at[static_cast<std::size_t>(h->second)])) {
        ok = false;
        break;
      }
    }
    if (ok) out.emplace(at[static_cast<std::size_t>(cross.a)], at[static_cast<std::size_t>(cross.b)]);
    std::size_t i = vars.size();
    for (;;) {
      if (i == 0) return out;
      --i;
      if (++k[i] < candidates[static_cast<std::size_t>(vars[i])].size()) break;
      k[i] = 0;
    }
  }
}

}  // namespace cecdpop::oracle
