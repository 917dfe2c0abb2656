#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "cecdpop/error.hpp"
#include "cecdpop/instance.hpp"
#include "cecdpop/pseudotree.hpp"

namespace cecdpop {

struct RandomDcopConfig {
  std::size_t n = 10;
  std::size_t d = 5;
  double density = 0.5;
  double hard_fraction = 0.5;
  Utility utility_lo = 0;
  Utility utility_hi = 100;
  std::uint64_t seed = 0;
};

struct RlfaConfig {
  std::size_t n = 10;
  std::size_t freqs = 10;
  std::vector<int> separations{3, 4};
  double density = 0.5;
  std::uint64_t seed = 0;
};

namespace detail {

// Unbiased draw in [0, n). The standard distributions are not portable across
// library implementations, the engine is.
inline std::uint64_t draw(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return r % n;
}

template <class T>
void shuffle(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[draw(rng, i)]);
}

inline std::size_t edge_count(std::size_t n, double density) {
  if (n == 0) throw InvalidConfig("n must be positive");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidConfig("density must lie in (0, 1]");
  const auto m = static_cast<std::size_t>(std::llround(density * static_cast<double>(n * (n - 1)) / 2.0));
  if (m + 1 < n) throw InvalidConfig("density too low for a connected graph");
  return m;
}

// Random spanning tree plus uniformly chosen extra edges, ascending.
inline std::vector<Edge> random_graph(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::vector<VarId> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<VarId>(i);
  shuffle(perm, rng);
  std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
  std::vector<Edge> edges;
  for (std::size_t k = 1; k < n; ++k) {
    const auto e = Edge::of(perm[k], perm[draw(rng, k)]);
    adj[static_cast<std::size_t>(e.a)][static_cast<std::size_t>(e.b)] = true;
    edges.push_back(e);
  }
  std::vector<Edge> rest;
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      if (!adj[a][b]) rest.push_back({static_cast<VarId>(a), static_cast<VarId>(b)});
    }
  }
  shuffle(rest, rng);
  rest.resize(m - edges.size());
  edges.insert(edges.end(), rest.begin(), rest.end());
  std::sort(edges.begin(), edges.end());
  return edges;
}

inline std::vector<std::vector<Value>> value_range(std::size_t n, std::size_t d) {
  std::vector<Value> dom(d);
  for (std::size_t v = 0; v < d; ++v) dom[v] = static_cast<Value>(v);
  return std::vector<std::vector<Value>>(n, dom);
}

}  // namespace detail

// Hard and soft constraints go on disjoint edges; round(hard_fraction * m) of
// the edges are hard, each lt, gt or eq with equal probability.
inline DcopInstance gen_random(const RandomDcopConfig& c) {
  if (c.d == 0) throw InvalidConfig("d must be positive");
  if (!(c.hard_fraction >= 0.0 && c.hard_fraction <= 1.0)) throw InvalidConfig("hard_fraction must lie in [0, 1]");
  if (c.utility_lo > c.utility_hi) throw InvalidConfig("empty utility range");
  const auto m = detail::edge_count(c.n, c.density);
  std::mt19937_64 rng(c.seed);
  const auto edges = detail::random_graph(c.n, m, rng);
  std::vector<std::size_t> order(edges.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  detail::shuffle(order, rng);
  const auto num_hard = static_cast<std::size_t>(std::llround(c.hard_fraction * static_cast<double>(m)));
  std::vector<bool> hard_edge(edges.size(), false);
  for (std::size_t k = 0; k < num_hard; ++k) hard_edge[order[k]] = true;

  std::vector<SoftConstraint> soft;
  std::vector<HardConstraint> hard;
  const auto span = static_cast<std::uint64_t>(c.utility_hi - c.utility_lo) + 1;
  for (std::size_t k = 0; k < edges.size(); ++k) {
    const auto& e = edges[k];
    if (hard_edge[k]) {
      static const Relation kinds[] = {Relation::less_than(), Relation::greater_than(), Relation::equal()};
      hard.push_back({e.a, e.b, kinds[detail::draw(rng, 3)]});
    } else {
      std::vector<Utility> table(c.d * c.d);
      for (auto& u : table) u = c.utility_lo + static_cast<Utility>(detail::draw(rng, span));
      soft.push_back({e.a, e.b, std::move(table)});
    }
  }
  return DcopInstance(detail::value_range(c.n, c.d), std::move(soft), std::move(hard));
}

// Transmitters over frequencies 0..F-1. Every edge carries |f_i - f_j| > s
// with s drawn from the separation set, plus a soft table 2(F-1) - f_i - f_j
// that rewards low frequencies.
inline DcopInstance gen_rlfa(const RlfaConfig& c) {
  if (c.freqs == 0) throw InvalidConfig("freqs must be positive");
  if (c.separations.empty()) throw InvalidConfig("empty separation set");
  for (auto s : c.separations) {
    if (s < 0) throw InvalidConfig("separations must be nonnegative");
  }
  const auto m = detail::edge_count(c.n, c.density);
  std::mt19937_64 rng(c.seed);
  const auto edges = detail::random_graph(c.n, m, rng);
  std::vector<SoftConstraint> soft;
  std::vector<HardConstraint> hard;
  const auto f = static_cast<Utility>(c.freqs);
  for (const auto& e : edges) {
    const auto s = c.separations[detail::draw(rng, c.separations.size())];
    hard.push_back({e.a, e.b, Relation::min_separation(s)});
    std::vector<Utility> table(c.freqs * c.freqs);
    for (std::size_t a = 0; a < c.freqs; ++a) {
      for (std::size_t b = 0; b < c.freqs; ++b) {
        table[a * c.freqs + b] = 2 * (f - 1) - static_cast<Utility>(a) - static_cast<Utility>(b);
      }
    }
    soft.push_back({e.a, e.b, std::move(table)});
  }
  return DcopInstance(detail::value_range(c.n, c.freqs), std::move(soft), std::move(hard));
}

}  // namespace cecdpop
