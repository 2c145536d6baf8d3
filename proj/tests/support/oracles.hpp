#pragma once

// Generators and brute-force references shared by the unit tests and the
// acceptance harness.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "dmatch/linprog.hpp"
#include "dmatch/matching.hpp"
#include "dmatch/rng.hpp"

namespace dmatch::testing {

// Random standard-form LP with up to 6 rows and 10 columns. Every fourth
// one gets an arbitrary right-hand side (often infeasible); the others are
// feasible by construction and bounded through a sum(x) = K row. Small
// integer coefficients make degenerate vertices common.
inline lp::StandardFormLp random_lp(std::uint64_t seed, std::size_t index) {
  CounterRng rng(seed, 0x7000 + index);
  const std::size_t m = 2 + rng.next() % 5;
  const std::size_t n = m + 1 + rng.next() % (11 - m);
  lp::StandardFormLp lp(m, n);
  std::vector<double> x0(n);
  for (double& v : x0) v = (rng.uniform() < 0.4) ? 0.0 : std::floor(rng.uniform(0.0, 4.0));
  for (std::size_t r = 0; r + 1 < m; ++r)
    for (std::size_t k = 0; k < n; ++k)
      lp.a(r, k) = std::floor(rng.uniform(-2.0, 3.0));
  for (std::size_t k = 0; k < n; ++k) lp.a(m - 1, k) = 1.0;
  for (std::size_t r = 0; r < m; ++r) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += lp.a(r, k) * x0[k];
    lp.b(r) = s;
  }
  if (index % 4 == 3) lp.b(rng.next() % m) += std::floor(rng.uniform(-5.0, 5.0));
  for (std::size_t k = 0; k < n; ++k) lp.c(k) = std::floor(rng.uniform(-3.0, 4.0));
  return lp;
}

struct OracleVerdict {
  bool feasible = false;
  double best = 0.0;
};

inline OracleVerdict vertex_oracle(const lp::StandardFormLp& lp) {
  OracleVerdict v;
  for (const auto& sol : lp::enumerate_vertices(lp)) {
    if (!v.feasible || sol.objective > v.best) v.best = sol.objective;
    v.feasible = true;
  }
  return v;
}

// Random simple graph on up to max_vertices vertices with weights drawn
// from a few integer levels (ties) or continuous values.
inline std::vector<WeightedEdge> random_graph(std::uint64_t seed, std::size_t index,
                                              std::size_t max_vertices, std::size_t& vertices) {
  CounterRng rng(seed, 0x8000 + index);
  vertices = 1 + rng.next() % max_vertices;
  const double density = rng.uniform(0.2, 1.0);
  const bool integral = index % 2 == 0;
  std::vector<WeightedEdge> edges;
  for (std::size_t u = 0; u < vertices; ++u)
    for (std::size_t v = u + 1; v < vertices; ++v) {
      if (rng.uniform() > density) continue;
      const double w = integral ? std::floor(rng.uniform(-2.0, 8.0)) : rng.uniform(-1.0, 5.0);
      edges.push_back({u, v, w});
    }
  return edges;
}

inline bool is_valid_matching(std::size_t n, const MatchingResult& m) {
  std::vector<int> seen(n, 0);
  for (auto [a, b] : m.pairs) {
    if (a >= n || b >= n || a == b) return false;
    if (seen[a]++ || seen[b]++) return false;
  }
  return true;
}

// Weight of a matching recomputed from the edge list, summing the matched
// edges in sorted pair order so equal matchings give bit-identical totals.
inline double canonical_weight(const std::vector<WeightedEdge>& edges, const MatchingResult& m) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (auto [a, b] : m.pairs) pairs.emplace_back(std::min(a, b), std::max(a, b));
  std::sort(pairs.begin(), pairs.end());
  double total = 0.0;
  for (auto [a, b] : pairs) {
    double w = -std::numeric_limits<double>::infinity();
    for (const auto& e : edges)
      if (std::min(e.u, e.v) == a && std::max(e.u, e.v) == b) w = std::max(w, e.weight);
    total += w;
  }
  return total;
}

}  // namespace dmatch::testing
