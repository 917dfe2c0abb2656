#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cecdpop/error.hpp"
#include "cecdpop/instance.hpp"

namespace cecdpop {

inline constexpr Utility kInfeasible = std::numeric_limits<Utility>::min();

inline Utility add_utility(Utility a, Utility b) {
  return (a == kInfeasible || b == kInfeasible) ? kInfeasible : a + b;
}

// Dense hypercube of utilities over a sorted list of variables. Entries are
// row-major (last dim fastest) over positions in the current domains.
class UtilTable {
 public:
  UtilTable() : values_(1, 0) {}

  UtilTable(std::vector<VarId> dims, std::vector<std::size_t> extents, Utility fill = 0)
      : dims_(std::move(dims)), extents_(std::move(extents)) {
    if (dims_.size() != extents_.size()) throw DimensionMismatch("dims/extents length differ");
    if (!std::is_sorted(dims_.begin(), dims_.end()) ||
        std::adjacent_find(dims_.begin(), dims_.end()) != dims_.end()) {
      throw DimensionMismatch("table dims must be strictly ascending");
    }
    values_.assign(volume(extents_), fill);
  }

  UtilTable(std::vector<VarId> dims, std::vector<std::size_t> extents, std::vector<Utility> values)
      : UtilTable(std::move(dims), std::move(extents)) {
    if (values.size() != values_.size()) throw DimensionMismatch("table value count mismatch");
    values_ = std::move(values);
  }

  static std::size_t volume(std::span<const std::size_t> extents) {
    std::size_t v = 1;
    for (auto e : extents) v *= e;
    return v;
  }

  const std::vector<VarId>& dims() const { return dims_; }
  const std::vector<std::size_t>& extents() const { return extents_; }
  const std::vector<Utility>& values() const { return values_; }
  std::vector<Utility>& values() { return values_; }
  std::size_t size() const { return values_.size(); }

  // Position of x in dims, or -1.
  int axis(VarId x) const {
    const auto it = std::lower_bound(dims_.begin(), dims_.end(), x);
    return (it != dims_.end() && *it == x) ? static_cast<int>(it - dims_.begin()) : -1;
  }

  std::vector<std::size_t> strides() const {
    std::vector<std::size_t> s(dims_.size(), 1);
    for (std::size_t k = dims_.size(); k-- > 1;) s[k - 1] = s[k] * extents_[k];
    return s;
  }

  std::size_t offset(std::span<const std::size_t> index) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < dims_.size(); ++k) off = off * extents_[k] + index[k];
    return off;
  }

  Utility at(std::span<const std::size_t> index) const { return values_[offset(index)]; }

  friend bool operator==(const UtilTable&, const UtilTable&) = default;

 private:
  std::vector<VarId> dims_;
  std::vector<std::size_t> extents_;
  std::vector<Utility> values_;
};

// Result of joining tables and projecting out a set of variables: the
// projected table plus, per entry, the flattened index of the maximizing
// joint assignment of the eliminated variables (-1 when all infeasible).
struct Projection {
  UtilTable table;
  std::vector<VarId> eliminated;
  std::vector<std::size_t> eliminated_extents;
  std::vector<std::int64_t> argmax;
};

// Joins `inputs` over `dims` (which must cover every input dim) and maximizes
// over `eliminated` (a subset of dims) in one pass. Throws BudgetExceeded when
// the joined hypercube is larger than `budget` entries.
inline Projection join_project(std::span<const UtilTable* const> inputs, const std::vector<VarId>& dims,
                               const std::vector<std::size_t>& extents,
                               const std::vector<VarId>& eliminated, std::size_t budget) {
  const auto nd = dims.size();
  {
    long double vol = 1;
    for (auto e : extents) vol *= static_cast<long double>(e);
    if (vol > static_cast<long double>(budget)) {
      throw BudgetExceeded("joined table of " + std::to_string(static_cast<double>(vol)) +
                           " entries exceeds budget " + std::to_string(budget));
    }
  }
  std::vector<VarId> kept;
  std::vector<std::size_t> kept_extents;
  std::vector<bool> is_elim(nd, false);
  for (std::size_t k = 0; k < nd; ++k) {
    if (std::binary_search(eliminated.begin(), eliminated.end(), dims[k])) {
      is_elim[k] = true;
    } else {
      kept.push_back(dims[k]);
      kept_extents.push_back(extents[k]);
    }
  }
  Projection out{UtilTable(kept, kept_extents, kInfeasible), {}, {}, {}};
  for (std::size_t k = 0; k < nd; ++k) {
    if (is_elim[k]) {
      out.eliminated.push_back(dims[k]);
      out.eliminated_extents.push_back(extents[k]);
    }
  }
  out.argmax.assign(out.table.size(), -1);

  // Per-input strides expressed over `dims` (zero where the input lacks a dim).
  const auto ni = inputs.size();
  std::vector<std::vector<std::size_t>> in_stride(ni, std::vector<std::size_t>(nd, 0));
  for (std::size_t t = 0; t < ni; ++t) {
    const auto& tab = *inputs[t];
    const auto s = tab.strides();
    for (std::size_t a = 0; a < tab.dims().size(); ++a) {
      const auto it = std::lower_bound(dims.begin(), dims.end(), tab.dims()[a]);
      if (it == dims.end() || *it != tab.dims()[a]) throw DimensionMismatch("input dim not in join dims");
      const auto k = static_cast<std::size_t>(it - dims.begin());
      if (extents[k] != tab.extents()[a]) throw DimensionMismatch("extent mismatch in join");
      in_stride[t][k] = s[a];
    }
  }
  std::vector<std::size_t> out_stride(nd, 0);
  std::vector<std::size_t> elim_stride(nd, 0);
  {
    std::size_t so = 1;
    std::size_t se = 1;
    for (std::size_t k = nd; k-- > 0;) {
      if (is_elim[k]) {
        elim_stride[k] = se;
        se *= extents[k];
      } else {
        out_stride[k] = so;
        so *= extents[k];
      }
    }
  }

  std::vector<std::size_t> idx(nd, 0);
  std::vector<std::size_t> off(ni, 0);
  std::size_t out_off = 0;
  std::size_t elim_off = 0;
  const std::size_t total = UtilTable::volume(extents);
  auto& values = out.table.values();
  for (std::size_t step = 0; step < total; ++step) {
    Utility sum = 0;
    for (std::size_t t = 0; t < ni; ++t) {
      const auto v = inputs[t]->values()[off[t]];
      if (v == kInfeasible) {
        sum = kInfeasible;
        break;
      }
      sum += v;
    }
    if (sum != kInfeasible && sum > values[out_off]) {
      values[out_off] = sum;
      out.argmax[out_off] = static_cast<std::int64_t>(elim_off);
    }
    // Mixed-radix increment, last dim fastest.
    for (std::size_t k = nd; k-- > 0;) {
      if (++idx[k] < extents[k]) {
        for (std::size_t t = 0; t < ni; ++t) off[t] += in_stride[t][k];
        out_off += out_stride[k];
        elim_off += elim_stride[k];
        break;
      }
      idx[k] = 0;
      const auto back = extents[k] - 1;
      for (std::size_t t = 0; t < ni; ++t) off[t] -= in_stride[t][k] * back;
      out_off -= out_stride[k] * back;
      elim_off -= elim_stride[k] * back;
    }
  }
  return out;
}

namespace detail {
inline void union_dims(const UtilTable& a, const UtilTable& b, std::vector<VarId>& dims,
                       std::vector<std::size_t>& extents) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.dims().size() || j < b.dims().size()) {
    if (j == b.dims().size() || (i < a.dims().size() && a.dims()[i] < b.dims()[j])) {
      dims.push_back(a.dims()[i]);
      extents.push_back(a.extents()[i++]);
    } else if (i == a.dims().size() || b.dims()[j] < a.dims()[i]) {
      dims.push_back(b.dims()[j]);
      extents.push_back(b.extents()[j++]);
    } else {
      if (a.extents()[i] != b.extents()[j]) throw DimensionMismatch("join: extent mismatch");
      dims.push_back(a.dims()[i]);
      extents.push_back(a.extents()[i]);
      ++i;
      ++j;
    }
  }
}
}  // namespace detail

// Pointwise sum over the union of dims; Infeasible absorbs.
inline UtilTable join(const UtilTable& a, const UtilTable& b) {
  std::vector<VarId> dims;
  std::vector<std::size_t> extents;
  detail::union_dims(a, b, dims, extents);
  const UtilTable* inputs[] = {&a, &b};
  return join_project(inputs, dims, extents, {}, std::numeric_limits<std::size_t>::max()).table;
}

inline UtilTable join(std::span<const UtilTable> tables) {
  UtilTable acc;
  for (const auto& t : tables) acc = join(acc, t);
  return acc;
}

// Max over x's axis, with the argmax position of x per remaining entry.
inline Projection project(const UtilTable& table, VarId x) {
  if (table.axis(x) < 0) throw UnknownVariable("project: x" + std::to_string(x) + " not in table");
  const UtilTable* inputs[] = {&table};
  return join_project(inputs, table.dims(), table.extents(), {x}, std::numeric_limits<std::size_t>::max());
}

}  // namespace cecdpop
