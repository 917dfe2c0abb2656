#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cecdpop/error.hpp"
#include "cecdpop/instance.hpp"
#include "cecdpop/pseudotree.hpp"
#include "cecdpop/simulator.hpp"
#include "cecdpop/util_table.hpp"
#include "cecdpop/view.hpp"

namespace cecdpop {

inline constexpr std::size_t kDefaultTableBudget = std::size_t{1} << 26;

// Context shared by the UTIL and VALUE agents of one run.
struct PropagationSetup {
  const PseudoTree* tree = nullptr;
  const ProblemView* view = nullptr;
  const EliminationPlan* plan = nullptr;
  std::size_t budget = kDefaultTableBudget;
  // Send separator shapes only: message counts and entries are exact, but no
  // table is built and no optimum is known.
  bool shapes_only = false;
};

class UtilAgent {
 public:
  UtilAgent(const PropagationSetup& s, VarId self) : s_(&s), self_(self) {}

  void step(std::span<const Envelope> inbox, Outbox& out) {
    for (const auto& e : inbox) {
      const auto* m = std::get_if<UtilMsg>(&e.payload);
      if (!m) throw ProtocolError("UTIL: unexpected message");
      if (!s_->shapes_only && !m->table) throw ProtocolError("UTIL: message without a table");
      if (m->table) received_.push_back(*m->table);
      ++heard_;
    }
    const auto& tree = *s_->tree;
    if (sent_ || heard_ < tree.children(self_).size()) return;
    const auto& plan = *s_->plan;
    const auto idx = static_cast<std::size_t>(self_);
    if (s_->shapes_only) {
      const auto& sep = plan.separator[idx];
      std::vector<std::size_t> extents;
      for (auto v : sep) extents.push_back(s_->view->extent(v));
      if (self_ != tree.root()) out.send(tree.parent(self_), UtilMsg{sep, std::move(extents), std::nullopt});
      sent_ = true;
      return;
    }
    std::vector<const UtilTable*> inputs;
    for (const auto& e : plan.owned[idx]) inputs.push_back(&s_->view->functions.at(e));
    for (const auto& t : received_) inputs.push_back(&t);
    const auto& dims = plan.dims[idx];
    std::vector<std::size_t> extents;
    for (auto v : dims) extents.push_back(s_->view->extent(v));
    projection_ = join_project(inputs, dims, extents, plan.eliminated[idx], s_->budget);
    received_.clear();
    received_.shrink_to_fit();
    if (self_ != tree.root()) {
      const auto& t = projection_.table;
      out.send(tree.parent(self_), UtilMsg{t.dims(), t.extents(), t});
    }
    sent_ = true;
  }

  bool done() const { return sent_; }
  const Projection& projection() const { return projection_; }

 private:
  const PropagationSetup* s_;
  VarId self_;
  std::vector<UtilTable> received_;
  std::size_t heard_ = 0;
  Projection projection_;
  bool sent_ = false;
};

struct UtilResult {
  // Per node: separator table plus argmax over the variables projected there.
  std::vector<Projection> caches;
  // Optimum at the root; kInfeasible when no feasible assignment exists.
  Utility optimum = kInfeasible;
  PhaseMetrics metrics;
};

inline UtilResult util_phase(const PropagationSetup& s, const RunOptions& opts = {}) {
  std::vector<UtilAgent> agents;
  agents.reserve(s.tree->size());
  for (std::size_t x = 0; x < s.tree->size(); ++x) agents.emplace_back(s, static_cast<VarId>(x));
  UtilResult r;
  r.metrics = run_phase("util", agents, opts);
  if (s.shapes_only) return r;
  for (auto& a : agents) r.caches.push_back(a.projection());
  const auto& root_table = r.caches[static_cast<std::size_t>(s.tree->root())].table;
  if (root_table.size() != 1) throw ProtocolError("UTIL: root table is not a scalar");
  r.optimum = root_table.values()[0];
  return r;
}

class ValueAgent {
 public:
  ValueAgent(const PropagationSetup& s, const Projection& cache, VarId self)
      : s_(&s), cache_(&cache), self_(self) {}

  void step(std::span<const Envelope> inbox, Outbox& out) {
    const auto& tree = *s_->tree;
    std::optional<std::vector<std::pair<VarId, std::size_t>>> context;
    if (!decided_ && self_ == tree.root()) context.emplace();
    for (const auto& e : inbox) {
      const auto* m = std::get_if<ValueMsg>(&e.payload);
      if (!m || e.from != tree.parent(self_)) throw ProtocolError("VALUE: unexpected message");
      context = m->context;
    }
    if (decided_ || !context) return;
    decide(*context);
    const auto& plan = *s_->plan;
    for (auto c : tree.children(self_)) {
      std::vector<std::pair<VarId, std::size_t>> part;
      for (auto v : plan.separator[static_cast<std::size_t>(c)]) part.emplace_back(v, lookup(v));
      out.send(c, ValueMsg{std::move(part)});
    }
  }

  bool done() const { return decided_; }
  // Values chosen here for the variables projected at this node.
  const std::vector<std::pair<VarId, std::size_t>>& decisions() const { return decisions_; }
  bool infeasible() const { return infeasible_; }

 private:
  void decide(const std::vector<std::pair<VarId, std::size_t>>& context) {
    known_ = context;
    const auto& table = cache_->table;
    std::vector<std::size_t> index;
    for (auto d : table.dims()) index.push_back(lookup(d));
    const auto flat = cache_->argmax[table.offset(index)];
    decided_ = true;
    if (flat < 0) {
      infeasible_ = true;
      if (self_ != s_->tree->root()) throw ProtocolError("VALUE: infeasible context below the root");
      return;
    }
    auto rest = static_cast<std::size_t>(flat);
    std::vector<std::size_t> pos(cache_->eliminated.size());
    for (std::size_t k = pos.size(); k-- > 0;) {
      pos[k] = rest % cache_->eliminated_extents[k];
      rest /= cache_->eliminated_extents[k];
    }
    for (std::size_t k = 0; k < pos.size(); ++k) {
      decisions_.emplace_back(cache_->eliminated[k], pos[k]);
      known_.emplace_back(cache_->eliminated[k], pos[k]);
    }
  }

  std::size_t lookup(VarId v) const {
    for (const auto& [x, p] : known_) {
      if (x == v) return p;
    }
    throw ProtocolError("VALUE: x" + std::to_string(v) + " missing from context of x" + std::to_string(self_));
  }

  const PropagationSetup* s_;
  const Projection* cache_;
  VarId self_;
  std::vector<std::pair<VarId, std::size_t>> known_;
  std::vector<std::pair<VarId, std::size_t>> decisions_;
  bool decided_ = false;
  bool infeasible_ = false;
};

struct ValueResult {
  bool infeasible = false;
  // Per variable, position in the view's surviving domain.
  std::vector<std::size_t> positions;
  PhaseMetrics metrics;
};

inline ValueResult value_phase(const PropagationSetup& s, const UtilResult& util, const RunOptions& opts = {}) {
  std::vector<ValueAgent> agents;
  agents.reserve(s.tree->size());
  for (std::size_t x = 0; x < s.tree->size(); ++x) {
    agents.emplace_back(s, util.caches[x], static_cast<VarId>(x));
  }
  ValueResult r;
  r.metrics = run_phase("value", agents, opts);
  r.positions.assign(s.tree->size(), 0);
  std::vector<bool> seen(s.tree->size(), false);
  for (const auto& a : agents) {
    r.infeasible = r.infeasible || a.infeasible();
    for (const auto& [x, p] : a.decisions()) {
      r.positions[static_cast<std::size_t>(x)] = p;
      seen[static_cast<std::size_t>(x)] = true;
    }
  }
  if (!r.infeasible && std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw ProtocolError("VALUE: some variable was never assigned");
  }
  return r;
}

// Original domain values for the positions chosen in a view.
inline Assignment to_assignment(const DcopInstance& p, const ProblemView& view,
                                const std::vector<std::size_t>& positions) {
  Assignment a(positions.size());
  for (std::size_t x = 0; x < positions.size(); ++x) {
    a[x] = p.domain(static_cast<VarId>(x))[view.kept[x][positions[x]]];
  }
  return a;
}

}  // namespace cecdpop
