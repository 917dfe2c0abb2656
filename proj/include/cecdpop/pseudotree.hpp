#pragma once

#include <algorithm>
#include <cstddef>
#include <deque>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cecdpop/error.hpp"
#include "cecdpop/instance.hpp"

namespace cecdpop {

// Unordered variable pair stored with first < second.
struct Edge {
  VarId a = kNoVar;
  VarId b = kNoVar;

  static Edge of(VarId x, VarId y) { return x < y ? Edge{x, y} : Edge{y, x}; }
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

// Primal graph of the binary constraints. Adjacency lists are ascending.
class ConstraintGraph {
 public:
  ConstraintGraph() = default;

  ConstraintGraph(std::size_t n, std::vector<Edge> edges) : adj_(n) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (const auto& e : edges) {
      if (e.a < 0 || e.b >= static_cast<VarId>(n) || e.a == e.b) {
        throw InvalidInstance("graph edge out of range");
      }
      adj_[static_cast<std::size_t>(e.a)].push_back(e.b);
      adj_[static_cast<std::size_t>(e.b)].push_back(e.a);
    }
    for (auto& list : adj_) std::sort(list.begin(), list.end());
    edges_ = std::move(edges);
  }

  static ConstraintGraph of(const DcopInstance& p) {
    std::vector<Edge> edges;
    for (const auto& s : p.soft_constraints()) edges.push_back(Edge::of(s.first, s.second));
    for (const auto& h : p.hard_constraints()) edges.push_back(Edge::of(h.first, h.second));
    return ConstraintGraph(p.num_variables(), std::move(edges));
  }

  std::size_t size() const { return adj_.size(); }
  const std::vector<VarId>& neighbors(VarId x) const { return adj_.at(static_cast<std::size_t>(x)); }
  std::size_t degree(VarId x) const { return neighbors(x).size(); }
  const std::vector<Edge>& edges() const { return edges_; }

  bool connected() const {
    if (adj_.empty()) return true;
    std::vector<bool> seen(adj_.size(), false);
    std::vector<VarId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const auto x = stack.back();
      stack.pop_back();
      for (auto y : neighbors(x)) {
        if (!seen[static_cast<std::size_t>(y)]) {
          seen[static_cast<std::size_t>(y)] = true;
          ++count;
          stack.push_back(y);
        }
      }
    }
    return count == adj_.size();
  }

  // Components as ascending variable lists, ordered by smallest member.
  std::vector<std::vector<VarId>> components() const {
    std::vector<int> comp(adj_.size(), -1);
    std::vector<std::vector<VarId>> out;
    for (std::size_t s = 0; s < adj_.size(); ++s) {
      if (comp[s] != -1) continue;
      out.emplace_back();
      std::vector<VarId> stack{static_cast<VarId>(s)};
      comp[s] = static_cast<int>(out.size() - 1);
      while (!stack.empty()) {
        const auto x = stack.back();
        stack.pop_back();
        out.back().push_back(x);
        for (auto y : neighbors(x)) {
          if (comp[static_cast<std::size_t>(y)] == -1) {
            comp[static_cast<std::size_t>(y)] = comp[s];
            stack.push_back(y);
          }
        }
      }
      std::sort(out.back().begin(), out.back().end());
    }
    return out;
  }

 private:
  std::vector<std::vector<VarId>> adj_;
  std::vector<Edge> edges_;
};

// Highest degree, ties broken by the smallest id.
inline VarId choose_root(const ConstraintGraph& g) {
  if (g.size() == 0) throw InvalidInstance("empty graph has no root");
  VarId best = 0;
  for (VarId x = 1; x < static_cast<VarId>(g.size()); ++x) {
    if (g.degree(x) > g.degree(best)) best = x;
  }
  return best;
}

enum class TreeKind { Dfs, Bfs };
enum class EdgeClass { Tree, Back, Cross };

inline const char* to_string(EdgeClass c) {
  switch (c) {
    case EdgeClass::Tree: return "tree";
    case EdgeClass::Back: return "back";
    case EdgeClass::Cross: return "cross";
  }
  return "?";
}

// Rooted spanning tree of a connected constraint graph together with the
// classification of every graph edge.
class PseudoTree {
 public:
  PseudoTree() = default;

  PseudoTree(TreeKind kind, VarId root, std::vector<VarId> parent, const ConstraintGraph& g)
      : kind_(kind), root_(root), parent_(std::move(parent)) {
    const auto n = parent_.size();
    children_.assign(n, {});
    for (std::size_t x = 0; x < n; ++x) {
      if (static_cast<VarId>(x) != root_) {
        children_[static_cast<std::size_t>(parent_[x])].push_back(static_cast<VarId>(x));
      }
    }
    for (auto& c : children_) std::sort(c.begin(), c.end());
    level_.assign(n, 0);
    enter_.assign(n, 0);
    exit_.assign(n, 0);
    order_.clear();
    // Iterative preorder for levels and ancestor intervals.
    int clock = 0;
    std::vector<std::pair<VarId, std::size_t>> stack{{root_, 0}};
    enter_[static_cast<std::size_t>(root_)] = clock++;
    order_.push_back(root_);
    while (!stack.empty()) {
      auto& [x, next] = stack.back();
      const auto& kids = children_[static_cast<std::size_t>(x)];
      if (next < kids.size()) {
        const auto c = kids[next++];
        level_[static_cast<std::size_t>(c)] = level_[static_cast<std::size_t>(x)] + 1;
        enter_[static_cast<std::size_t>(c)] = clock++;
        order_.push_back(c);
        stack.emplace_back(c, 0);
      } else {
        exit_[static_cast<std::size_t>(x)] = clock++;
        stack.pop_back();
      }
    }
    for (const auto& e : g.edges()) {
      EdgeClass cls;
      if (parent_[static_cast<std::size_t>(e.a)] == e.b || parent_[static_cast<std::size_t>(e.b)] == e.a) {
        cls = EdgeClass::Tree;
      } else if (is_ancestor(e.a, e.b) || is_ancestor(e.b, e.a)) {
        cls = EdgeClass::Back;
      } else {
        cls = EdgeClass::Cross;
      }
      edge_class_.emplace(e, cls);
    }
  }

  TreeKind kind() const { return kind_; }
  VarId root() const { return root_; }
  std::size_t size() const { return parent_.size(); }
  VarId parent(VarId x) const { return parent_.at(static_cast<std::size_t>(x)); }
  const std::vector<VarId>& children(VarId x) const { return children_.at(static_cast<std::size_t>(x)); }
  int level(VarId x) const { return level_.at(static_cast<std::size_t>(x)); }
  // Preorder, root first.
  const std::vector<VarId>& preorder() const { return order_; }
  const std::map<Edge, EdgeClass>& edge_classes() const { return edge_class_; }

  bool contains(VarId x) const { return x >= 0 && static_cast<std::size_t>(x) < parent_.size(); }

  int depth() const {
    int d = 0;
    for (auto l : level_) d = std::max(d, l);
    return d;
  }

  // True when a is an ancestor of b or a == b.
  bool is_ancestor(VarId a, VarId b) const {
    const auto ia = static_cast<std::size_t>(a);
    const auto ib = static_cast<std::size_t>(b);
    return enter_[ia] <= enter_[ib] && exit_[ib] <= exit_[ia];
  }

  EdgeClass classify(VarId x, VarId y) const {
    const auto it = edge_class_.find(Edge::of(x, y));
    if (it == edge_class_.end()) throw UnknownVariable("not a graph edge");
    return it->second;
  }

  std::vector<Edge> edges_of(EdgeClass cls) const {
    std::vector<Edge> out;
    for (const auto& [e, c] : edge_class_) {
      if (c == cls) out.push_back(e);
    }
    return out;
  }

  // Tree path from x up to its ancestor `top`, both inclusive.
  std::vector<VarId> path_up(VarId x, VarId top) const {
    if (!is_ancestor(top, x)) throw UnknownVariable("path_up: not an ancestor");
    std::vector<VarId> path{x};
    while (x != top) {
      x = parent(x);
      path.push_back(x);
    }
    return path;
  }

 private:
  TreeKind kind_ = TreeKind::Bfs;
  VarId root_ = kNoVar;
  std::vector<VarId> parent_;
  std::vector<std::vector<VarId>> children_;
  std::vector<int> level_;
  std::vector<int> enter_;
  std::vector<int> exit_;
  std::vector<VarId> order_;
  std::map<Edge, EdgeClass> edge_class_;
};

namespace detail {
inline void check_tree_input(const ConstraintGraph& g, VarId root) {
  if (root < 0 || static_cast<std::size_t>(root) >= g.size()) throw UnknownVariable("root not in graph");
  if (!g.connected()) throw DisconnectedGraph("constraint graph is not connected");
}
}  // namespace detail

// Level-order traversal; neighbors visited in ascending id.
inline PseudoTree build_bfs_tree(const ConstraintGraph& g, VarId root) {
  detail::check_tree_input(g, root);
  std::vector<VarId> parent(g.size(), kNoVar);
  std::vector<bool> seen(g.size(), false);
  std::deque<VarId> queue{root};
  seen[static_cast<std::size_t>(root)] = true;
  while (!queue.empty()) {
    const auto x = queue.front();
    queue.pop_front();
    for (auto y : g.neighbors(x)) {
      if (!seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = true;
        parent[static_cast<std::size_t>(y)] = x;
        queue.push_back(y);
      }
    }
  }
  return PseudoTree(TreeKind::Bfs, root, std::move(parent), g);
}

// Depth-first traversal; neighbors visited in ascending id.
inline PseudoTree build_dfs_tree(const ConstraintGraph& g, VarId root) {
  detail::check_tree_input(g, root);
  std::vector<VarId> parent(g.size(), kNoVar);
  std::vector<bool> seen(g.size(), false);
  std::vector<std::pair<VarId, std::size_t>> stack{{root, 0}};
  seen[static_cast<std::size_t>(root)] = true;
  while (!stack.empty()) {
    auto& [x, next] = stack.back();
    const auto& nb = g.neighbors(x);
    if (next < nb.size()) {
      const auto y = nb[next++];
      if (!seen[static_cast<std::size_t>(y)]) {
        seen[static_cast<std::size_t>(y)] = true;
        parent[static_cast<std::size_t>(y)] = x;
        stack.emplace_back(y, 0);
      }
    } else {
      stack.pop_back();
    }
  }
  return PseudoTree(TreeKind::Dfs, root, std::move(parent), g);
}

// Lowest common ancestor via Euler tour and a sparse-table range minimum over
// tour levels. O(n log n) build, O(1) query.
class LcaIndex {
 public:
  LcaIndex() = default;

  explicit LcaIndex(const PseudoTree& tree) : first_(tree.size(), 0) {
    if (tree.size() == 0) return;
    std::vector<std::pair<VarId, std::size_t>> stack{{tree.root(), 0}};
    first_[static_cast<std::size_t>(tree.root())] = 0;
    tour_.push_back(tree.root());
    while (!stack.empty()) {
      auto& [x, next] = stack.back();
      const auto& kids = tree.children(x);
      if (next < kids.size()) {
        const auto c = kids[next++];
        first_[static_cast<std::size_t>(c)] = tour_.size();
        tour_.push_back(c);
        stack.emplace_back(c, 0);
      } else {
        stack.pop_back();
        if (!stack.empty()) tour_.push_back(stack.back().first);
      }
    }
    level_.reserve(tour_.size());
    for (auto x : tour_) level_.push_back(tree.level(x));
    const auto m = tour_.size();
    std::size_t logs = 1;
    while ((std::size_t{1} << logs) <= m) ++logs;
    table_.assign(logs, std::vector<std::size_t>(m));
    for (std::size_t i = 0; i < m; ++i) table_[0][i] = i;
    for (std::size_t k = 1; k < logs; ++k) {
      const std::size_t half = std::size_t{1} << (k - 1);
      for (std::size_t i = 0; i + (std::size_t{1} << k) <= m; ++i) {
        table_[k][i] = shallower(table_[k - 1][i], table_[k - 1][i + half]);
      }
    }
  }

  VarId lca(VarId x, VarId y) const {
    if (x < 0 || y < 0 || static_cast<std::size_t>(x) >= first_.size() ||
        static_cast<std::size_t>(y) >= first_.size()) {
      throw UnknownVariable("lca: variable not in tree");
    }
    auto lo = first_[static_cast<std::size_t>(x)];
    auto hi = first_[static_cast<std::size_t>(y)];
    if (lo > hi) std::swap(lo, hi);
    std::size_t k = 0;
    while ((std::size_t{2} << k) <= hi - lo + 1) ++k;
    return tour_[shallower(table_[k][lo], table_[k][hi + 1 - (std::size_t{1} << k)])];
  }

 private:
  std::size_t shallower(std::size_t i, std::size_t j) const { return level_[i] <= level_[j] ? i : j; }

  std::vector<std::size_t> first_;
  std::vector<VarId> tour_;
  std::vector<int> level_;
  std::vector<std::vector<std::size_t>> table_;
};

// Where each binary constraint is aggregated and where each variable is
// projected out during the UTIL phase.
//
// Tree and back edges are owned by the lower endpoint. A cross edge is owned
// by the deeper endpoint (ties: larger id), which carries the other endpoint in
// its messages; that variable is then projected out at the LCA of itself and
// every owner that carries it, instead of at its own node.
struct EliminationPlan {
  std::vector<VarId> eliminated_at;            // variable -> node that projects it
  std::vector<std::vector<Edge>> owned;        // node -> constraint pairs it joins
  std::vector<std::vector<VarId>> dims;        // node -> joined table dims (sorted)
  std::vector<std::vector<VarId>> eliminated;  // node -> variables projected there
  std::vector<std::vector<VarId>> separator;   // node -> UTIL message dims (sorted)
};

inline VarId constraint_owner(const PseudoTree& tree, Edge e) {
  const auto cls = tree.classify(e.a, e.b);
  if (cls != EdgeClass::Cross) return tree.is_ancestor(e.a, e.b) ? e.b : e.a;
  if (tree.level(e.a) != tree.level(e.b)) return tree.level(e.a) > tree.level(e.b) ? e.a : e.b;
  return std::max(e.a, e.b);
}

inline EliminationPlan plan_elimination(const PseudoTree& tree, const ConstraintGraph& g) {
  const auto n = tree.size();
  const LcaIndex lca(tree);
  EliminationPlan plan;
  plan.eliminated_at.resize(n);
  plan.owned.assign(n, {});
  plan.dims.assign(n, {});
  plan.eliminated.assign(n, {});
  plan.separator.assign(n, {});
  for (std::size_t x = 0; x < n; ++x) plan.eliminated_at[x] = static_cast<VarId>(x);
  for (const auto& e : g.edges()) {
    const auto owner = constraint_owner(tree, e);
    plan.owned[static_cast<std::size_t>(owner)].push_back(e);
    const auto other = owner == e.a ? e.b : e.a;
    if (tree.classify(e.a, e.b) == EdgeClass::Cross) {
      auto& at = plan.eliminated_at[static_cast<std::size_t>(other)];
      at = lca.lca(at, owner);
    }
  }
  // Post-order: children before parents.
  const auto& pre = tree.preorder();
  for (auto it = pre.rbegin(); it != pre.rend(); ++it) {
    const auto x = *it;
    auto& dims = plan.dims[static_cast<std::size_t>(x)];
    dims.push_back(x);
    for (const auto& e : plan.owned[static_cast<std::size_t>(x)]) {
      dims.push_back(e.a);
      dims.push_back(e.b);
    }
    for (auto c : tree.children(x)) {
      const auto& sep = plan.separator[static_cast<std::size_t>(c)];
      dims.insert(dims.end(), sep.begin(), sep.end());
    }
    std::sort(dims.begin(), dims.end());
    dims.erase(std::unique(dims.begin(), dims.end()), dims.end());
    for (auto v : dims) {
      if (plan.eliminated_at[static_cast<std::size_t>(v)] == x) {
        plan.eliminated[static_cast<std::size_t>(x)].push_back(v);
      } else {
        plan.separator[static_cast<std::size_t>(x)].push_back(v);
      }
    }
  }
  return plan;
}

// Variables indexing the UTIL message x sends to its parent.
inline std::vector<VarId> separator(const PseudoTree& tree, const DcopInstance& p, VarId x) {
  if (!tree.contains(x)) throw UnknownVariable("separator: variable not in tree");
  return plan_elimination(tree, ConstraintGraph::of(p)).separator[static_cast<std::size_t>(x)];
}

// Graphviz export: tree edges solid, back edges dotted, cross edges dashed.
inline std::string to_dot(const PseudoTree& tree) {
  std::ostringstream os;
  os << "graph pseudotree {\n";
  for (auto x : tree.preorder()) os << "  x" << x << " [label=\"x" << x << "\"];\n";
  for (const auto& [e, cls] : tree.edge_classes()) {
    os << "  x" << e.a << " -- x" << e.b;
    if (cls == EdgeClass::Back) os << " [style=dotted]";
    if (cls == EdgeClass::Cross) os << " [style=dashed]";
    os << ";\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace cecdpop
