#include "doctest.h"
#include "dmatch/matching.hpp"
#include "support/oracles.hpp"

using namespace dmatch;

TEST_CASE("small hand-checked graphs") {
  CHECK(max_weight_matching(3, {{0, 1, 3}, {1, 2, 2}, {0, 2, 2}}).total_weight == 3.0);
  CHECK(max_weight_matching(3, {{0, 1, 1}, {1, 2, 1}}).total_weight == 1.0);
  CHECK(max_weight_matching(0, {}).total_weight == 0.0);
  CHECK(max_weight_matching(4, {}).pairs.empty());
  // A path where the middle edge is heavier than either end but lighter than both.
  const auto m = max_weight_matching(4, {{0, 1, 2}, {1, 2, 3}, {2, 3, 2}});
  CHECK(m.total_weight == 4.0);
  CHECK(m.pairs.size() == 2);
}

TEST_CASE("non-positive edges never enter the matching") {
  const auto m = max_weight_matching(4, {{0, 1, -1}, {2, 3, 0}, {1, 2, 0.5}});
  CHECK(m.total_weight == doctest::Approx(0.5));
  CHECK(m.pairs.size() == 1);
}

TEST_CASE("odd cycles need blossoms") {
  // Pentagon with a pendant: the optimum uses the pendant edge plus two
  // cycle edges, which requires shrinking the odd cycle.
  std::vector<WeightedEdge> e{{0, 1, 5}, {1, 2, 5}, {2, 3, 5}, {3, 4, 5}, {4, 0, 5}, {0, 5, 6}};
  const auto m = max_weight_matching(6, e);
  CHECK(m.total_weight == 16.0);
  CHECK(max_weight_matching_brute(6, e).total_weight == 16.0);
}

TEST_CASE("integer interface returns mates") {
  const auto mate = max_weight_matching_int(4, {0, 1, 2}, {1, 2, 3}, {2, 3, 2});
  CHECK(mate == std::vector<long>{1, 0, 3, 2});
}

TEST_CASE("blossom equals brute force on random graphs") {
  for (std::size_t k = 0; k < 150; ++k) {
    CAPTURE(k);
    std::size_t n = 0;
    const auto edges = testing::random_graph(5, k, 12, n);
    const auto fast = max_weight_matching(n, edges);
    const auto slow = max_weight_matching_brute(n, edges);
    CHECK(testing::is_valid_matching(n, fast));
    CHECK(testing::canonical_weight(edges, fast) == testing::canonical_weight(edges, slow));
  }
}
