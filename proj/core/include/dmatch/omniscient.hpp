#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "dmatch/instance.hpp"
#include "dmatch/matching.hpp"
#include "dmatch/simulate.hpp"

namespace dmatch {

// Agents of a trace are the vertices; a and b are adjacent when their
// presence intervals intersect. The weight is r[type of the earlier
// arriver][type of the later arriver].
struct OverlapGraph {
  std::size_t num_vertices = 0;
  std::vector<WeightedEdge> edges;  // u arrived before v
};

// Sweep over arrivals keeping the agents still present. Throws
// kDuplicateTimes when two arrival times coincide.
OverlapGraph build_overlap_graph(const Trace& trace, const Instance& instance);

// Maximum-weight matching solved separately on each connected component of
// the positive-weight subgraph.
MatchingResult max_weight_matching(const OverlapGraph& graph);

struct OffEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::vector<double> replications;  // total weight / horizon per run
};

// Replication k samples its trace with seed derived from (seed, k).
// Replications run in parallel.
OffEstimate estimate_off(const Instance& instance, double horizon, std::size_t replications,
                         std::uint64_t seed);

std::uint64_t replication_seed(std::uint64_t seed, std::size_t replication);

// agent_a,agent_b,weight rows then a "total,,<weight>" line.
void write_matching_csv(std::ostream& os, const OverlapGraph& graph,
                        const MatchingResult& matching);

}  // namespace dmatch
