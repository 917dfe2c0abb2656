#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cecdpop/error.hpp"
#include "cecdpop/matrix.hpp"

namespace cecdpop {

using VarId = int;
using AgentId = int;
using Value = int;
using Utility = std::int64_t;

inline constexpr VarId kNoVar = -1;

// Outcome of evaluating an assignment or solving an instance: nullopt means
// some hard constraint is violated (or no feasible assignment exists).
using Evaluation = std::optional<Utility>;

enum class RelationKind { LessThan, GreaterThan, Equal, MinSeparation, Explicit };

// Relation of a hard constraint between (first, second). Explicit relations
// carry a 0/1 matrix over positions of the original domains.
struct Relation {
  RelationKind kind = RelationKind::Equal;
  int separation = 0;
  ConsistencyMatrix bits;

  static Relation less_than() { return {RelationKind::LessThan, 0, {}}; }
  static Relation greater_than() { return {RelationKind::GreaterThan, 0, {}}; }
  static Relation equal() { return {RelationKind::Equal, 0, {}}; }
  static Relation min_separation(int s) { return {RelationKind::MinSeparation, s, {}}; }
  static Relation explicit_matrix(ConsistencyMatrix m) {
    return {RelationKind::Explicit, 0, std::move(m)};
  }

  // u, v are values; iu, iv their positions in the original domains.
  bool allows(Value u, Value v, std::size_t iu, std::size_t iv) const {
    switch (kind) {
      case RelationKind::LessThan: return u < v;
      case RelationKind::GreaterThan: return u > v;
      case RelationKind::Equal: return u == v;
      case RelationKind::MinSeparation: return std::abs(u - v) > separation;
      case RelationKind::Explicit: return bits.get(iu, iv);
    }
    return false;
  }

  friend bool operator==(const Relation& a, const Relation& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == RelationKind::MinSeparation) return a.separation == b.separation;
    if (a.kind == RelationKind::Explicit) return a.bits == b.bits;
    return true;
  }
};

struct SoftConstraint {
  VarId first = kNoVar;
  VarId second = kNoVar;
  // Row-major |D_first| x |D_second| table over original domain positions.
  std::vector<Utility> utilities;

  friend bool operator==(const SoftConstraint&, const SoftConstraint&) = default;
};

struct HardConstraint {
  VarId first = kNoVar;
  VarId second = kNoVar;
  Relation relation;

  friend bool operator==(const HardConstraint&, const HardConstraint&) = default;
};

// Boolean matrix of (u,v) pairs allowed by the relation, over the given
// domains (values, not positions).
inline ConsistencyMatrix matrix_from_relation(const Relation& relation,
                                              const std::vector<Value>& domain_i,
                                              const std::vector<Value>& domain_j) {
  if (relation.kind == RelationKind::Explicit &&
      (relation.bits.rows() != domain_i.size() || relation.bits.cols() != domain_j.size())) {
    throw DimensionMismatch("explicit relation does not match domain sizes");
  }
  ConsistencyMatrix m(domain_i.size(), domain_j.size());
  for (std::size_t a = 0; a < domain_i.size(); ++a) {
    for (std::size_t b = 0; b < domain_j.size(); ++b) {
      m.set(a, b, relation.allows(domain_i[a], domain_j[b], a, b));
    }
  }
  return m;
}

// Total map variable -> value (by variable id).
using Assignment = std::vector<Value>;

// The tuple <A, X, D, F, alpha> restricted to binary constraints. Validated on
// construction and immutable afterwards.
class DcopInstance {
 public:
  DcopInstance() = default;

  DcopInstance(std::size_t num_agents, std::vector<std::vector<Value>> domains,
               std::vector<AgentId> owner, std::vector<SoftConstraint> soft,
               std::vector<HardConstraint> hard)
      : num_agents_(num_agents), domains_(std::move(domains)), owner_(std::move(owner)),
        soft_(std::move(soft)), hard_(std::move(hard)) {
    validate();
  }

  // One agent per variable.
  DcopInstance(std::vector<std::vector<Value>> domains, std::vector<SoftConstraint> soft,
               std::vector<HardConstraint> hard)
      : DcopInstance(domains.size(), domains, identity_owner(domains.size()), std::move(soft),
                     std::move(hard)) {}

  std::size_t num_variables() const { return domains_.size(); }
  std::size_t num_agents() const { return num_agents_; }
  const std::vector<Value>& domain(VarId x) const { return domains_.at(static_cast<std::size_t>(x)); }
  const std::vector<std::vector<Value>>& domains() const { return domains_; }
  const std::vector<AgentId>& owner() const { return owner_; }
  const std::vector<SoftConstraint>& soft_constraints() const { return soft_; }
  const std::vector<HardConstraint>& hard_constraints() const { return hard_; }

  std::size_t max_domain_size() const {
    std::size_t d = 0;
    for (const auto& dom : domains_) d = std::max(d, dom.size());
    return d;
  }

  std::optional<std::size_t> index_of(VarId x, Value v) const {
    const auto& dom = domain(x);
    const auto it = std::find(dom.begin(), dom.end(), v);
    if (it == dom.end()) return std::nullopt;
    return static_cast<std::size_t>(it - dom.begin());
  }

  // Consistency matrix of a hard constraint, oriented first -> second, over the
  // original domains.
  ConsistencyMatrix matrix(const HardConstraint& h) const {
    return matrix_from_relation(h.relation, domain(h.first), domain(h.second));
  }

  friend bool operator==(const DcopInstance&, const DcopInstance&) = default;

 private:
  static std::vector<AgentId> identity_owner(std::size_t n) {
    std::vector<AgentId> owner(n);
    for (std::size_t i = 0; i < n; ++i) owner[i] = static_cast<AgentId>(i);
    return owner;
  }

  void check_scope(VarId a, VarId b, const char* what) const {
    const auto n = static_cast<VarId>(domains_.size());
    if (a < 0 || b < 0 || a >= n || b >= n) {
      throw InvalidInstance(std::string(what) + " constraint scope references unknown variable");
    }
    if (a == b) throw InvalidInstance(std::string(what) + " constraint must be binary");
  }

  void validate() const {
    if (domains_.size() < num_agents_) throw InvalidInstance("fewer variables than agents");
    for (std::size_t x = 0; x < domains_.size(); ++x) {
      if (domains_[x].empty()) {
        throw InvalidInstance("variable " + std::to_string(x) + " has an empty domain");
      }
      auto sorted = domains_[x];
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw InvalidInstance("variable " + std::to_string(x) + " has duplicate values");
      }
    }
    if (owner_.size() != domains_.size()) throw InvalidInstance("owner map is not total");
    std::vector<bool> used(num_agents_, false);
    for (auto a : owner_) {
      if (a < 0 || static_cast<std::size_t>(a) >= num_agents_) {
        throw InvalidInstance("owner map references unknown agent");
      }
      used[static_cast<std::size_t>(a)] = true;
    }
    if (std::find(used.begin(), used.end(), false) != used.end()) {
      throw InvalidInstance("owner map is not onto");
    }
    std::set<std::pair<VarId, VarId>> seen;
    for (const auto& s : soft_) {
      check_scope(s.first, s.second, "soft");
      if (!seen.insert(std::minmax(s.first, s.second)).second) {
        throw InvalidInstance("more than one soft constraint on a variable pair");
      }
      if (s.utilities.size() != domain(s.first).size() * domain(s.second).size()) {
        throw InvalidInstance("soft table size does not match domains");
      }
    }
    seen.clear();
    for (const auto& h : hard_) {
      check_scope(h.first, h.second, "hard");
      if (!seen.insert(std::minmax(h.first, h.second)).second) {
        throw InvalidInstance("more than one hard constraint on a variable pair");
      }
      if (h.relation.kind == RelationKind::Explicit &&
          (h.relation.bits.rows() != domain(h.first).size() ||
           h.relation.bits.cols() != domain(h.second).size())) {
        throw InvalidInstance("explicit matrix does not match domains");
      }
    }
  }

  std::size_t num_agents_ = 0;
  std::vector<std::vector<Value>> domains_;
  std::vector<AgentId> owner_;
  std::vector<SoftConstraint> soft_;
  std::vector<HardConstraint> hard_;
};

// Hard constraints gate feasibility; soft constraints are summed.
inline Evaluation evaluate(const DcopInstance& instance, const Assignment& assignment) {
  if (assignment.size() != instance.num_variables()) {
    throw ValueOutOfDomain("assignment is not total");
  }
  std::vector<std::size_t> pos(assignment.size());
  for (std::size_t x = 0; x < assignment.size(); ++x) {
    const auto idx = instance.index_of(static_cast<VarId>(x), assignment[x]);
    if (!idx) {
      throw ValueOutOfDomain("value " + std::to_string(assignment[x]) + " not in domain of x" +
                             std::to_string(x));
    }
    pos[x] = *idx;
  }
  for (const auto& h : instance.hard_constraints()) {
    const auto a = static_cast<std::size_t>(h.first);
    const auto b = static_cast<std::size_t>(h.second);
    if (!h.relation.allows(assignment[a], assignment[b], pos[a], pos[b])) return std::nullopt;
  }
  Utility total = 0;
  for (const auto& s : instance.soft_constraints()) {
    const auto a = static_cast<std::size_t>(s.first);
    const auto b = static_cast<std::size_t>(s.second);
    total += s.utilities[pos[a] * instance.domain(s.second).size() + pos[b]];
  }
  return total;
}

}  // namespace cecdpop
