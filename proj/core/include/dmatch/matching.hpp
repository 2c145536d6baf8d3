#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dmatch {

struct WeightedEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  double weight = 0.0;
};

struct MatchingResult {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // u < v
  double total_weight = 0.0;
};

// Exact maximum-weight matching (not necessarily perfect) on a general
// graph. Non-positive edges are dropped first; the remaining weights are
// rescaled to 64-bit integers and solved with the primal-dual blossom
// method, so the optimum is exact up to the rounding of that rescaling
// (relative 2^-40 of the largest weight).
MatchingResult max_weight_matching(std::size_t num_vertices, const std::vector<WeightedEdge>& edges);

// Same algorithm on integer weights. Returns mate[v] (or -1). Exposed for
// tests that need exact ties.
std::vector<long> max_weight_matching_int(std::size_t num_vertices,
                                          const std::vector<std::size_t>& eu,
                                          const std::vector<std::size_t>& ev,
                                          const std::vector<std::int64_t>& w);

// Exhaustive search over all matchings; limited to 20 vertices.
MatchingResult max_weight_matching_brute(std::size_t num_vertices,
                                         const std::vector<WeightedEdge>& edges);

}  // namespace dmatch
