#include "dmatch/omniscient.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

#include "dmatch/error.hpp"
#include "dmatch/parallel.hpp"
#include "dmatch/rng.hpp"

namespace dmatch {

OverlapGraph build_overlap_graph(const Trace& trace, const Instance& instance) {
  std::vector<std::size_t> order(trace.events.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return trace.events[a].arrival < trace.events[b].arrival;
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    if (trace.events[order[k]].arrival == trace.events[order[k - 1]].arrival) {
      throw Error(ErrorCode::kDuplicateTimes, "two agents share an arrival time");
    }
  }

  OverlapGraph g;
  g.num_vertices = trace.events.size();
  std::vector<std::size_t> present;  // vertex ids, pruned lazily
  for (std::size_t v : order) {
    const TraceEvent& later = trace.events[v];
    std::size_t keep = 0;
    for (std::size_t u : present) {
      const TraceEvent& earlier = trace.events[u];
      if (earlier.departure < later.arrival) continue;
      present[keep++] = u;
      g.edges.push_back({u, v, instance.reward(earlier.type, later.type)});
    }
    present.resize(keep);
    present.push_back(v);
  }
  return g;
}

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

}  // namespace

MatchingResult max_weight_matching(const OverlapGraph& graph) {
  const std::size_t n = graph.num_vertices;
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (const auto& e : graph.edges) {
    if (!(e.weight > 0.0)) continue;
    parent[find_root(parent, e.u)] = find_root(parent, e.v);
  }

  // Group vertices and edges by component, relabelling locally.
  std::vector<std::size_t> comp_of(n), local(n), comp_size;
  std::vector<std::size_t> comp_index(n, static_cast<std::size_t>(-1));
  std::vector<std::vector<std::size_t>> vertices;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t root = find_root(parent, v);
    if (comp_index[root] == static_cast<std::size_t>(-1)) {
      comp_index[root] = vertices.size();
      vertices.emplace_back();
    }
    comp_of[v] = comp_index[root];
    local[v] = vertices[comp_of[v]].size();
    vertices[comp_of[v]].push_back(v);
  }
  std::vector<std::vector<WeightedEdge>> edges(vertices.size());
  for (const auto& e : graph.edges) {
    if (!(e.weight > 0.0)) continue;
    edges[comp_of[e.u]].push_back({local[e.u], local[e.v], e.weight});
  }

  MatchingResult out;
  for (std::size_t c = 0; c < vertices.size(); ++c) {
    if (edges[c].empty()) continue;
    const MatchingResult part = max_weight_matching(vertices[c].size(), edges[c]);
    for (auto [a, b] : part.pairs) {
      std::size_t u = vertices[c][a], v = vertices[c][b];
      if (u > v) std::swap(u, v);
      out.pairs.emplace_back(u, v);
    }
    out.total_weight += part.total_weight;
  }
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

std::uint64_t replication_seed(std::uint64_t seed, std::size_t replication) {
  return CounterRng(seed, streams::kReplicationBase).at(replication);
}

OffEstimate estimate_off(const Instance& instance, double horizon, std::size_t replications,
                         std::uint64_t seed) {
  if (!(horizon > 0.0)) throw Error(ErrorCode::kDegenerateHorizon, "horizon must be positive");
  if (replications == 0) throw Error(ErrorCode::kInvalidArgument, "need at least one replication");
  OffEstimate out;
  out.replications.assign(replications, 0.0);
  if (!instance.has_positive_reward()) return out;
  parallel_for(replications, [&](std::size_t k) {
    const Trace trace = sample_trace(instance, horizon, replication_seed(seed, k));
    const OverlapGraph g = build_overlap_graph(trace, instance);
    out.replications[k] = max_weight_matching(g).total_weight / horizon;
  });
  const Estimate e = mean_and_se(out.replications);
  out.mean = e.mean;
  out.se = e.se;
  return out;
}

void write_matching_csv(std::ostream& os, const OverlapGraph& graph,
                        const MatchingResult& matching) {
  std::map<std::pair<std::size_t, std::size_t>, double> weight;
  for (const auto& e : graph.edges) weight[{std::min(e.u, e.v), std::max(e.u, e.v)}] = e.weight;
  os << "agent_a,agent_b,weight\n";
  char buf[64];
  for (auto [a, b] : matching.pairs) {
    std::snprintf(buf, sizeof buf, "%.12g", weight.at({a, b}));
    os << a << ',' << b << ',' << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.12g", matching.total_weight);
  os << "total,," << buf << '\n';
}

}  // namespace dmatch
