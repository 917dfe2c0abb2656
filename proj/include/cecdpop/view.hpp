#pragma once

#include <cstddef>
#include <map>
#include <numeric>
#include <vector>

#include "cecdpop/instance.hpp"
#include "cecdpop/matrix.hpp"
#include "cecdpop/pseudotree.hpp"
#include "cecdpop/util_table.hpp"

namespace cecdpop {

// An instance restricted to surviving domain values. Each constrained pair is
// folded into one table over the surviving positions: soft utility (0 when
// the pair has no soft constraint) where the pair is allowed, Infeasible where
// a hard constraint or a pair mask forbids it.
struct ProblemView {
  // Per variable, surviving positions into the original domain, ascending.
  std::vector<std::vector<std::size_t>> kept;
  std::map<Edge, UtilTable> functions;

  std::size_t extent(VarId x) const { return kept[static_cast<std::size_t>(x)].size(); }

  std::size_t entries() const {
    std::size_t n = 0;
    for (const auto& k : kept) n += k.size();
    return n;
  }
};

// `masks` are oriented Edge.a -> Edge.b over the kept positions.
inline ProblemView make_view(const DcopInstance& p, std::vector<std::vector<std::size_t>> kept,
                             const std::map<Edge, ConsistencyMatrix>& masks = {}) {
  ProblemView view;
  view.kept = std::move(kept);
  auto table_for = [&](Edge e) -> UtilTable& {
    auto it = view.functions.find(e);
    if (it == view.functions.end()) {
      it = view.functions.emplace(e, UtilTable({e.a, e.b}, {view.extent(e.a), view.extent(e.b)}, 0)).first;
    }
    return it->second;
  };
  for (const auto& s : p.soft_constraints()) {
    const auto e = Edge::of(s.first, s.second);
    auto& t = table_for(e);
    const auto cols = p.domain(s.second).size();
    const auto& ka = view.kept[static_cast<std::size_t>(e.a)];
    const auto& kb = view.kept[static_cast<std::size_t>(e.b)];
    for (std::size_t i = 0; i < ka.size(); ++i) {
      for (std::size_t j = 0; j < kb.size(); ++j) {
        const auto [pf, ps] = s.first == e.a ? std::pair{ka[i], kb[j]} : std::pair{kb[j], ka[i]};
        t.values()[i * kb.size() + j] = s.utilities[pf * cols + ps];
      }
    }
  }
  for (const auto& h : p.hard_constraints()) {
    const auto e = Edge::of(h.first, h.second);
    auto& t = table_for(e);
    const auto& ka = view.kept[static_cast<std::size_t>(e.a)];
    const auto& kb = view.kept[static_cast<std::size_t>(e.b)];
    const auto& da = p.domain(e.a);
    const auto& db = p.domain(e.b);
    for (std::size_t i = 0; i < ka.size(); ++i) {
      for (std::size_t j = 0; j < kb.size(); ++j) {
        const bool ok = h.first == e.a ? h.relation.allows(da[ka[i]], db[kb[j]], ka[i], kb[j])
                                       : h.relation.allows(db[kb[j]], da[ka[i]], kb[j], ka[i]);
        if (!ok) t.values()[i * kb.size() + j] = kInfeasible;
      }
    }
  }
  for (const auto& [e, mask] : masks) {
    auto& t = table_for(e);
    if (mask.rows() != view.extent(e.a) || mask.cols() != view.extent(e.b)) {
      throw DimensionMismatch("pair mask does not match surviving domains");
    }
    for (std::size_t i = 0; i < mask.rows(); ++i) {
      for (std::size_t j = 0; j < mask.cols(); ++j) {
        if (!mask.get(i, j)) t.values()[i * mask.cols() + j] = kInfeasible;
      }
    }
  }
  return view;
}

inline ProblemView identity_view(const DcopInstance& p) {
  std::vector<std::vector<std::size_t>> kept(p.num_variables());
  for (std::size_t x = 0; x < kept.size(); ++x) {
    kept[x].resize(p.domains()[x].size());
    std::iota(kept[x].begin(), kept[x].end(), std::size_t{0});
  }
  return make_view(p, std::move(kept));
}

}  // namespace cecdpop
