#include <sstream>

#include "doctest.h"
#include "dmatch/error.hpp"
#include "dmatch/experiments.hpp"
#include "dmatch/omniscient.hpp"

using namespace dmatch;

namespace {

Trace make_trace(std::vector<std::tuple<TypeIndex, double, double>> agents) {
  Trace t;
  for (auto [type, a, d] : agents) t.events.push_back({t.events.size(), type, a, d});
  t.horizon = 100.0;
  return t;
}

const Instance kOneType = make_instance({1}, {1}, {{1}});

}  // namespace

TEST_CASE("overlap graph edges") {
  CHECK(build_overlap_graph(make_trace({{0, 0, 2}, {0, 1, 3}}), kOneType).edges.size() == 1);
  CHECK(build_overlap_graph(make_trace({{0, 0, 1}, {0, 2, 3}}), kOneType).edges.empty());
  CHECK(build_overlap_graph(make_trace({{0, 0, 5}, {0, 1, 5}, {0, 2, 5}}), kOneType).edges.size() == 3);
  // Touching endpoints count as overlapping (closed intervals).
  CHECK(build_overlap_graph(make_trace({{0, 0, 1}, {0, 1, 2}}), kOneType).edges.size() == 1);
}

TEST_CASE("duplicate arrival times are rejected") {
  CHECK_THROWS_AS(build_overlap_graph(make_trace({{0, 1, 2}, {0, 1, 3}}), kOneType), Error);
}

TEST_CASE("edge weights follow arrival order") {
  const Instance asym = make_instance({1, 1}, {1, 1}, {{0, 1}, {0, 0}});
  // Type 0 first, then type 1: weight r[0][1] = 1.
  auto g = build_overlap_graph(make_trace({{0, 0, 2}, {1, 1, 3}}), asym);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].weight == 1.0);
  // Type 1 first: weight r[1][0] = 0.
  g = build_overlap_graph(make_trace({{1, 0, 2}, {0, 1, 3}}), asym);
  REQUIRE(g.edges.size() == 1);
  CHECK(g.edges[0].weight == 0.0);
  CHECK(max_weight_matching(g).total_weight == 0.0);
}

TEST_CASE("component decomposition equals the whole-graph solve") {
  const Instance inst = random_instance(3, 4);
  const Trace t = sample_trace(inst, 300.0, 6);
  const OverlapGraph g = build_overlap_graph(t, inst);
  const MatchingResult split = max_weight_matching(g);
  const MatchingResult whole = max_weight_matching(g.num_vertices, g.edges);
  CHECK(split.total_weight == doctest::Approx(whole.total_weight).epsilon(1e-12));
}

TEST_CASE("omniscient value is monotone in rewards on a fixed trace") {
  const Instance base = random_instance(3, 40);
  const Trace t = sample_trace(base, 200.0, 2);
  const double v0 = max_weight_matching(build_overlap_graph(t, base)).total_weight;
  for (TypeIndex i = 0; i < 3; ++i) {
    RawInstance raw = base.raw();
    raw.r[i][(i + 1) % 3] += 1.0;
    const Instance up = validate(raw);
    CHECK(max_weight_matching(build_overlap_graph(t, up)).total_weight >= v0 - 1e-12);
  }
}

TEST_CASE("estimate_off") {
  const Instance neg = make_instance({1, 1}, {1, 1}, {{-1, -1}, {-1, -1}});
  CHECK(estimate_off(neg, 100.0, 10, 1).mean == 0.0);
  const OffEstimate a = estimate_off(kOneType, 200.0, 10, 3);
  const OffEstimate b = estimate_off(kOneType, 200.0, 10, 3);
  CHECK(a.replications == b.replications);
  CHECK(a.replications.size() == 10);
  CHECK(a.se > 0.0);
  CHECK_THROWS_AS(estimate_off(kOneType, 0.0, 10, 3), Error);
}

TEST_CASE("matching CSV export") {
  const Trace t = make_trace({{0, 0, 2}, {0, 1, 3}, {0, 4, 5}});
  const OverlapGraph g = build_overlap_graph(t, kOneType);
  std::ostringstream os;
  write_matching_csv(os, g, max_weight_matching(g));
  CHECK(os.str() == "agent_a,agent_b,weight\n0,1,1\ntotal,,1\n");
}
