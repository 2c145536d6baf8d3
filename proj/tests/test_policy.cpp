#include "doctest.h"
#include "dmatch/error.hpp"
#include "dmatch/policy.hpp"

using namespace dmatch;

TEST_CASE("greedy policy picks the most preferred present type") {
  const GreedyPolicy p({{2, 0}, {}, {1}});
  const std::size_t counts_a[] = {1, 0, 1};
  CHECK(p.decide(0, counts_a) == TypeIndex{2});
  const std::size_t counts_b[] = {1, 0, 0};
  CHECK(p.decide(0, counts_b) == TypeIndex{0});
  const std::size_t none[] = {0, 3, 0};
  CHECK_FALSE(p.decide(0, none).has_value());
  CHECK_FALSE(p.decide(1, counts_a).has_value());
  CHECK(p.prefixes(0) == std::vector<TypeSet>{0b100, 0b101});
}

TEST_CASE("invalid preference lists are rejected") {
  CHECK_THROWS_AS(GreedyPolicy(std::vector<std::vector<TypeIndex>>{{0, 0}}), Error);
  CHECK_THROWS_AS(GreedyPolicy(std::vector<std::vector<TypeIndex>>{{1}}), Error);
}

TEST_CASE("counterexample policy rule") {
  const Instance inst = counterexample_instance(0.01);
  CHECK(inst.lambda(2) == doctest::Approx(100.0));
  CHECK(inst.reward(1, 2) == 1.0);
  const CounterexamplePolicy p = counterexample_policy(0.01);
  const std::size_t blocked[] = {1, 1, 1};
  CHECK_FALSE(p.decide(1, blocked).has_value());
  const std::size_t open[] = {0, 1, 1};
  CHECK(p.decide(1, open) == TypeIndex{2});
  CHECK(p.decide(2, open) == TypeIndex{1});
  CHECK_FALSE(p.decide(0, open).has_value());
  CHECK_THROWS_AS(counterexample_policy(0.5), Error);
}

TEST_CASE("ADJ pairs consecutive agents whose intervals chain") {
  // 0 overlaps 1 and 1 leaves before 2 arrives: (0, 1) matched.
  // 2 overlaps 3 but 3 is still present when 4 arrives: unmatched.
  const double t[] = {0.0, 1.0, 3.0, 4.0, 5.0};
  const double d[] = {1.5, 2.0, 4.5, 6.0, 7.0};
  const auto pairs = adj_matching(t, d);
  REQUIRE(pairs.size() == 1);
  CHECK(pairs[0] == std::pair<std::size_t, std::size_t>{0, 1});
}

TEST_CASE("ADJ closed forms") {
  CHECK(adj_match_rate_exact(1.0) == doctest::Approx(0.25));
  CHECK(adj_match_rate_exact(3.0) == doctest::Approx(0.1875));
  CHECK(adj_value_exact(1.0) == doctest::Approx(1.25));
  CHECK(1.0 / adj_value_exact(1.0) == doctest::Approx(0.8));
}

TEST_CASE("ADJ simulation matches the closed form") {
  const AdjEstimate e = adj_match_rate(1.0, 2e4, 3);
  CHECK(std::abs(e.x11 - 0.25) <= 4.0 * e.x11_se);
  CHECK(e.value == doctest::Approx(1.0 + e.x11));
}
