#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cecdpop/error.hpp"
#include "cecdpop/instance.hpp"
#include "cecdpop/matrix.hpp"
#include "cecdpop/pseudotree.hpp"
#include "cecdpop/simulator.hpp"
#include "cecdpop/view.hpp"

namespace cecdpop {

// Per variable, surviving positions into the original domain, ascending.
using DomainSets = std::vector<std::vector<std::size_t>>;

inline DomainSets full_domains(const DcopInstance& p) {
  DomainSets d(p.num_variables());
  for (std::size_t x = 0; x < d.size(); ++x) {
    d[x].resize(p.domains()[x].size());
    std::iota(d[x].begin(), d[x].end(), std::size_t{0});
  }
  return d;
}

inline const HardConstraint* find_hard(const DcopInstance& p, VarId x, VarId y) {
  for (const auto& h : p.hard_constraints()) {
    if ((h.first == x && h.second == y) || (h.first == y && h.second == x)) return &h;
  }
  return nullptr;
}

// M_xy over the given surviving positions; all ones when no hard constraint
// links x and y.
inline ConsistencyMatrix pair_matrix(const DcopInstance& p, VarId x, VarId y,
                                     const std::vector<std::size_t>& dom_x,
                                     const std::vector<std::size_t>& dom_y) {
  const auto* h = find_hard(p, x, y);
  if (!h) return ConsistencyMatrix::ones(dom_x.size(), dom_y.size());
  const auto& vx = p.domain(x);
  const auto& vy = p.domain(y);
  ConsistencyMatrix m(dom_x.size(), dom_y.size());
  for (std::size_t i = 0; i < dom_x.size(); ++i) {
    for (std::size_t j = 0; j < dom_y.size(); ++j) {
      const bool ok = h->first == x ? h->relation.allows(vx[dom_x[i]], vy[dom_y[j]], dom_x[i], dom_y[j])
                                    : h->relation.allows(vy[dom_y[j]], vx[dom_x[i]], dom_y[j], dom_x[i]);
      m.set(i, j, ok);
    }
  }
  return m;
}

// Figure-style 0/1 grid labelled with the surviving values of x (rows) and y.
inline std::string dump_matrix(const DcopInstance& p, VarId x, VarId y, const ConsistencyMatrix& m,
                               const std::vector<std::size_t>& dom_x, const std::vector<std::size_t>& dom_y) {
  std::vector<int> rows;
  std::vector<int> cols;
  for (auto i : dom_x) rows.push_back(p.domain(x)[i]);
  for (auto j : dom_y) cols.push_back(p.domain(y)[j]);
  return m.to_grid(rows, cols);
}

// ---------------------------------------------------------------------------
// Distributed arc consistency.

class ArcConsistencyAgent {
 public:
  ArcConsistencyAgent(const DcopInstance& p, VarId self) : self_(self) {
    const auto full = full_domains(p);
    domain_ = full[static_cast<std::size_t>(self)];
    for (const auto& h : p.hard_constraints()) {
      if (h.first != self && h.second != self) continue;
      const auto other = h.first == self ? h.second : h.first;
      neighbors_.push_back({other, full[static_cast<std::size_t>(other)],
                            pair_matrix(p, self, other, domain_, full[static_cast<std::size_t>(other)])});
    }
    std::sort(neighbors_.begin(), neighbors_.end(),
              [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
  }

  void step(std::span<const Envelope> inbox, Outbox& out) {
    if (!started_) {
      started_ = true;
      for (const auto& nb : neighbors_) enqueue(nb.id);
    }
    for (const auto& e : inbox) {
      const auto* msg = std::get_if<ConsistencyMsg>(&e.payload);
      if (!msg) throw ProtocolError("arc consistency: unexpected message");
      auto& nb = neighbor(e.from);
      // UPDATE_MATRIX: drop the columns of values the sender deleted.
      std::vector<std::size_t> keep_rows(domain_.size());
      std::iota(keep_rows.begin(), keep_rows.end(), std::size_t{0});
      std::vector<std::size_t> keep_cols;
      for (std::size_t c = 0; c < nb.view.size(); ++c) {
        if (std::binary_search(msg->domain.begin(), msg->domain.end(), nb.view[c])) keep_cols.push_back(c);
      }
      nb.matrix = nb.matrix.submatrix(keep_rows, keep_cols);
      nb.view = msg->domain;
      enqueue(e.from);
    }
    std::set<VarId> causes;
    while (!update_list_.empty()) {
      const auto j = update_list_.front();
      update_list_.pop_front();
      auto& nb = neighbor(j);
      std::vector<std::size_t> unsupported;
      for (std::size_t r = 0; r < domain_.size(); ++r) {
        if (nb.matrix.row_empty(r)) unsupported.push_back(r);
      }
      if (unsupported.empty()) continue;
      causes.insert(j);
      for (auto it = unsupported.rbegin(); it != unsupported.rend(); ++it) {
        domain_.erase(domain_.begin() + static_cast<std::ptrdiff_t>(*it));
        for (auto& other : neighbors_) other.matrix.erase_row(*it);
      }
    }
    if (causes.empty()) return;
    for (const auto& nb : neighbors_) {
      // Values removed because of h_ij alone have no support in D_j, so x_j
      // need not hear about them.
      const bool only_this = causes.size() == 1 && *causes.begin() == nb.id;
      if (!only_this) out.send(nb.id, ConsistencyMsg{domain_});
    }
  }

  bool done() const { return update_list_.empty(); }
  const std::vector<std::size_t>& domain() const { return domain_; }

 private:
  struct Neighbor {
    VarId id;
    std::vector<std::size_t> view;  // last known domain of the neighbor
    ConsistencyMatrix matrix;       // rows: domain_, cols: view
  };

  Neighbor& neighbor(VarId id) {
    for (auto& nb : neighbors_) {
      if (nb.id == id) return nb;
    }
    throw ProtocolError("arc consistency: message from a non-neighbor");
  }

  void enqueue(VarId j) {
    if (std::find(update_list_.begin(), update_list_.end(), j) == update_list_.end()) update_list_.push_back(j);
  }

  VarId self_;
  bool started_ = false;
  std::vector<std::size_t> domain_;
  std::vector<Neighbor> neighbors_;
  std::deque<VarId> update_list_;
};

struct ArcConsistencyResult {
  DomainSets domains;
  bool wiped_out = false;
  PhaseMetrics metrics;
};

inline ArcConsistencyResult enforce_arc_consistency(const DcopInstance& p, const RunOptions& opts = {}) {
  std::vector<ArcConsistencyAgent> agents;
  agents.reserve(p.num_variables());
  for (std::size_t x = 0; x < p.num_variables(); ++x) agents.emplace_back(p, static_cast<VarId>(x));
  auto run_opts = opts;
  run_opts.max_domain = p.max_domain_size();
  ArcConsistencyResult result;
  result.metrics = run_phase("ac", agents, run_opts);
  for (const auto& a : agents) {
    result.domains.push_back(a.domain());
    result.wiped_out = result.wiped_out || a.domain().empty();
  }
  return result;
}

// ---------------------------------------------------------------------------
// Cross edges and path construction.

struct CrossEdge {
  VarId partner = kNoVar;
  VarId lca = kNoVar;
  // The owner composes the reduced matrix and carries the cross-edge
  // constraint in UTIL; it is the deeper endpoint (ties: larger id).
  bool owner = false;
};

// CE_i for every agent.
inline std::vector<std::vector<CrossEdge>> cross_edge_sets(const PseudoTree& tree, const LcaIndex& lca) {
  std::vector<std::vector<CrossEdge>> sets(tree.size());
  for (const auto& e : tree.edges_of(EdgeClass::Cross)) {
    const auto l = lca.lca(e.a, e.b);
    if (l == e.a || l == e.b) throw ProtocolError("cross edge whose LCA is an endpoint");
    const auto own = constraint_owner(tree, e);
    sets[static_cast<std::size_t>(e.a)].push_back({e.b, l, own == e.a});
    sets[static_cast<std::size_t>(e.b)].push_back({e.a, l, own == e.b});
  }
  return sets;
}

// (x_l, x_c): continue toward child x_c for cross edges whose LCA is x_l.
// An empty child marks the agent itself as an endpoint of such an edge.
struct NextEntry {
  VarId lca = kNoVar;
  std::optional<VarId> child;
  friend bool operator==(const NextEntry&, const NextEntry&) = default;
};

struct NextList {
  std::vector<NextEntry> entries;
  std::size_t cnt_next = 0;
};

class PathAgent {
 public:
  PathAgent(const PseudoTree& tree, VarId self, const std::vector<CrossEdge>& cross)
      : self_(self), parent_(self == tree.root() ? kNoVar : tree.parent(self)),
        num_children_(tree.children(self).size()) {
    for (const auto& ce : cross) {
      if (std::find(own_lcas_.begin(), own_lcas_.end(), ce.lca) == own_lcas_.end()) own_lcas_.push_back(ce.lca);
    }
    std::sort(own_lcas_.begin(), own_lcas_.end());
  }

  void step(std::span<const Envelope> inbox, Outbox& out) {
    if (!started_) {
      started_ = true;
      for (auto l : own_lcas_) {
        add({l, std::nullopt});
        if (parent_ != kNoVar) out.send(parent_, NextUpdateMsg{l});
        sent_.insert(l);
      }
      if (own_lcas_.empty() && parent_ != kNoVar) out.send(parent_, NextUpdateMsg{std::nullopt});
    }
    for (const auto& e : inbox) {
      if (const auto* m = std::get_if<NextUpdateMsg>(&e.payload)) {
        if (m->lca) add({*m->lca, e.from});
      } else if (std::holds_alternative<CompleteMsg>(e.payload)) {
        ++next_.cnt_next;
      } else {
        throw ProtocolError("path construction: unexpected message");
      }
    }
    if (!completed_ && next_.cnt_next >= num_children_) {
      for (const auto& entry : next_.entries) {
        if (entry.lca == self_ || !entry.child) continue;
        if (sent_.insert(entry.lca).second && parent_ != kNoVar) out.send(parent_, NextUpdateMsg{entry.lca});
      }
      if (parent_ != kNoVar) out.send(parent_, CompleteMsg{});
      completed_ = true;
    }
  }

  bool done() const { return completed_; }
  const NextList& next() const { return next_; }

 private:
  void add(NextEntry entry) {
    if (std::find(next_.entries.begin(), next_.entries.end(), entry) == next_.entries.end()) {
      next_.entries.push_back(entry);
    }
  }

  VarId self_;
  VarId parent_;
  std::size_t num_children_;
  std::vector<VarId> own_lcas_;
  std::set<VarId> sent_;
  NextList next_;
  bool started_ = false;
  bool completed_ = false;
};

struct PathResult {
  std::vector<NextList> next;
  PhaseMetrics metrics;
};

inline PathResult construct_paths(const PseudoTree& tree, const std::vector<std::vector<CrossEdge>>& cross,
                                  const RunOptions& opts = {}) {
  std::vector<PathAgent> agents;
  agents.reserve(tree.size());
  for (std::size_t x = 0; x < tree.size(); ++x) {
    agents.emplace_back(tree, static_cast<VarId>(x), cross[x]);
  }
  PathResult result;
  result.metrics = run_phase("paths", agents, opts);
  for (const auto& a : agents) result.next.push_back(a.next());
  return result;
}

// ---------------------------------------------------------------------------
// Cross-edge consistency propagation.

class CecAgent {
 public:
  CecAgent(const DcopInstance& p, const PseudoTree& tree, const DomainSets& domains, VarId self,
           NextList next, std::vector<CrossEdge> cross)
      : self_(self), is_root_(self == tree.root()), children_(tree.children(self)),
        next_(std::move(next)), cross_(std::move(cross)),
        size_(domains[static_cast<std::size_t>(self)].size()) {
    if (!is_root_) {
      parent_ = tree.parent(self);
      to_parent_ = pair_matrix(p, self, parent_, domains[static_cast<std::size_t>(self)],
                               domains[static_cast<std::size_t>(parent_)]);
    }
    for (const auto& ce : cross_) {
      if (ce.owner) {
        direct_.emplace(ce.partner, pair_matrix(p, self, ce.partner, domains[static_cast<std::size_t>(self)],
                                                domains[static_cast<std::size_t>(ce.partner)]));
      }
    }
  }

  void step(std::span<const Envelope> inbox, Outbox& out) {
    for (const auto& e : inbox) {
      const auto* m = std::get_if<CecMsg>(&e.payload);
      if (!m) throw ProtocolError("CeC: unexpected message");
      if (m->across) {
        if (!m->matrix || !m->lca) throw ProtocolError("CeC: empty cross-edge matrix");
        from_partner_.insert_or_assign(e.from, *m->matrix);
      } else {
        if (e.from != parent_) throw ProtocolError("CeC: tree message from a non-parent");
        heard_parent_ = true;
        if (m->lca && m->matrix) from_parent_.insert_or_assign(*m->lca, *m->matrix);
      }
    }
    if (!forwarded_ && (is_root_ || heard_parent_)) forward(out);
    if (forwarded_) {
      for (const auto& ce : cross_) {
        if (!ce.owner || reduced_.contains(ce.partner)) continue;
        const auto it = from_partner_.find(ce.partner);
        if (it == from_partner_.end()) continue;
        const auto m_lj = transpose(it->second);
        reduced_.emplace(ce.partner, hadamard(bool_matmul(path_.at(ce.lca), m_lj), direct_.at(ce.partner)));
      }
    }
  }

  bool done() const {
    if (!forwarded_) return false;
    for (const auto& ce : cross_) {
      if (ce.owner && !reduced_.contains(ce.partner)) return false;
    }
    return true;
  }

  // Reduced M_ij for cross edges this agent owns, keyed by partner.
  const std::map<VarId, ConsistencyMatrix>& reduced() const { return reduced_; }
  // M_il toward every LCA this agent lies under.
  const std::map<VarId, ConsistencyMatrix>& path_matrices() const { return path_; }

 private:
  const ConsistencyMatrix& toward(VarId l) {
    auto it = path_.find(l);
    if (it != path_.end()) return it->second;
    if (l == self_) return path_.emplace(l, ConsistencyMatrix::identity(size_)).first->second;
    const auto from = from_parent_.find(l);
    if (from == from_parent_.end()) {
      throw ProtocolError("CeC: x" + std::to_string(self_) + " has no M_pl for l=x" + std::to_string(l));
    }
    return path_.emplace(l, bool_matmul(to_parent_, from->second)).first->second;
  }

  void forward(Outbox& out) {
    std::set<VarId> served;
    for (const auto& entry : next_.entries) {
      const auto& m = toward(entry.lca);
      if (entry.child) {
        out.send(*entry.child, CecMsg{entry.lca, m, false});
        served.insert(*entry.child);
      }
    }
    for (auto c : children_) {
      if (!served.contains(c)) out.send(c, CecMsg{std::nullopt, std::nullopt, false});
    }
    for (const auto& ce : cross_) {
      if (!ce.owner) out.send(ce.partner, CecMsg{ce.lca, toward(ce.lca), true});
    }
    forwarded_ = true;
  }

  VarId self_;
  bool is_root_;
  VarId parent_ = kNoVar;
  std::vector<VarId> children_;
  NextList next_;
  std::vector<CrossEdge> cross_;
  std::size_t size_;
  ConsistencyMatrix to_parent_;
  std::map<VarId, ConsistencyMatrix> direct_;
  std::map<VarId, ConsistencyMatrix> from_parent_;
  std::map<VarId, ConsistencyMatrix> from_partner_;
  std::map<VarId, ConsistencyMatrix> path_;
  std::map<VarId, ConsistencyMatrix> reduced_;
  bool heard_parent_ = false;
  bool forwarded_ = false;
};

struct CecResult {
  // Reduced matrix per cross edge, oriented Edge.a -> Edge.b over the domains
  // CeC ran on.
  std::map<Edge, ConsistencyMatrix> reduced;
  std::vector<std::map<VarId, ConsistencyMatrix>> path_matrices;
  PhaseMetrics metrics;
};

inline CecResult propagate_cec(const DcopInstance& p, const PseudoTree& tree, const DomainSets& domains,
                               const std::vector<NextList>& next,
                               const std::vector<std::vector<CrossEdge>>& cross, const RunOptions& opts = {}) {
  std::vector<CecAgent> agents;
  agents.reserve(tree.size());
  for (std::size_t x = 0; x < tree.size(); ++x) {
    agents.emplace_back(p, tree, domains, static_cast<VarId>(x), next[x], cross[x]);
  }
  CecResult result;
  result.metrics = run_phase("cec", agents, opts);
  for (std::size_t x = 0; x < agents.size(); ++x) {
    for (const auto& [partner, m] : agents[x].reduced()) {
      const auto self = static_cast<VarId>(x);
      const auto e = Edge::of(self, partner);
      result.reduced.emplace(e, e.a == self ? m : transpose(m));
    }
    result.path_matrices.push_back(agents[x].path_matrices());
  }
  return result;
}

// ---------------------------------------------------------------------------
// Pruning.

struct PruningResult {
  DomainSets domains;
  // Surviving pairs per cross edge over `domains`, oriented Edge.a -> Edge.b.
  std::map<Edge, ConsistencyMatrix> pair_masks;
  bool infeasible = false;
};

// Drops values that appear in no surviving pair of some reduced cross-edge
// matrix, to a fixpoint, and re-indexes the matrices to the smaller domains.
inline PruningResult apply_pruning(const DomainSets& domains, const std::map<Edge, ConsistencyMatrix>& reduced) {
  PruningResult r{domains, reduced, false};
  for (bool changed = true; changed;) {
    changed = false;
    // Positions (into the current r.domains[x]) that still have a pair somewhere.
    std::vector<std::vector<bool>> alive(r.domains.size());
    for (std::size_t x = 0; x < alive.size(); ++x) alive[x].assign(r.domains[x].size(), true);
    for (const auto& [e, m] : r.pair_masks) {
      for (std::size_t i = 0; i < m.rows(); ++i) {
        if (m.row_empty(i)) alive[static_cast<std::size_t>(e.a)][i] = false;
      }
      for (std::size_t j = 0; j < m.cols(); ++j) {
        if (m.col_empty(j)) alive[static_cast<std::size_t>(e.b)][j] = false;
      }
    }
    std::vector<std::vector<std::size_t>> keep(alive.size());
    for (std::size_t x = 0; x < alive.size(); ++x) {
      for (std::size_t k = 0; k < alive[x].size(); ++k) {
        if (alive[x][k]) keep[x].push_back(k);
      }
      if (keep[x].size() == alive[x].size()) continue;
      changed = true;
      std::vector<std::size_t> next;
      for (auto k : keep[x]) next.push_back(r.domains[x][k]);
      r.domains[x] = std::move(next);
    }
    if (!changed) break;
    for (auto& [e, m] : r.pair_masks) {
      m = m.submatrix(keep[static_cast<std::size_t>(e.a)], keep[static_cast<std::size_t>(e.b)]);
    }
  }
  for (const auto& d : r.domains) r.infeasible = r.infeasible || d.empty();
  return r;
}

inline ProblemView pruned_view(const DcopInstance& p, const PruningResult& r) {
  return make_view(p, r.domains, r.pair_masks);
}

}  // namespace cecdpop
