#include <cmath>

#include "doctest.h"
#include "dmatch/error.hpp"
#include "dmatch/instance.hpp"

using namespace dmatch;

TEST_CASE("validate fills default ids and keeps values") {
  const Instance inst = make_instance({0.5, 1.5}, {1.0, 2.0}, {{1.0, 2.0}, {3.0, 4.0}});
  CHECK(inst.num_types() == 2);
  CHECK(inst.type_ids() == std::vector<std::string>{"1", "2"});
  CHECK(inst.reward(1, 0) == 3.0);
  CHECK(inst.load(0b11) == doctest::Approx(0.5 + 0.75));
  CHECK(inst.total_arrival_rate() == doctest::Approx(2.0));
}

TEST_CASE("validate reports every violation at once") {
  RawInstance raw;
  raw.lambda = {1.0, -1.0};
  raw.mu = {0.0, 1.0};
  raw.r = {{1.0, NAN}, {0.0, 1.0}};
  try {
    validate(raw);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.has(ErrorCode::kNonPositiveRate));
    CHECK(e.has(ErrorCode::kNonFiniteReward));
    CHECK(e.violations().size() >= 3);
  }
}

TEST_CASE("dimension mismatch and empty instances are rejected") {
  RawInstance raw;
  raw.lambda = {1.0, 1.0};
  raw.mu = {1.0};
  raw.r = {{1.0, 1.0}, {1.0, 1.0}};
  CHECK_THROWS_AS(validate(raw), ValidationError);
  CHECK_THROWS_AS(RewardMatrix(std::vector<std::vector<double>>{{1.0, 2.0}}), Error);
}

TEST_CASE("gamma is (1 - e^-x)/x and stable near zero") {
  CHECK(gamma_of_load(1.0) == doctest::Approx(1.0 - std::exp(-1.0)));
  CHECK(gamma_of_load(1e-12) == doctest::Approx(1.0));
  CHECK(gamma_of_load(0.0) == 1.0);
  CHECK(gamma_of_load(50.0) == doctest::Approx(1.0 / 50.0));
  const Instance inst = make_instance({1.0, 2.0}, {1.0, 1.0}, {{0, 0}, {0, 0}});
  CHECK(gamma(inst, 0b11) == doctest::Approx((1.0 - std::exp(-3.0)) / 3.0));
  CHECK_THROWS_AS(gamma(inst, 0), Error);
}

TEST_CASE("gamma is decreasing in the load") {
  double prev = gamma_of_load(1e-6);
  for (double x = 0.01; x < 20.0; x *= 1.5) {
    const double g = gamma_of_load(x);
    CHECK(g < prev);
    CHECK(g > 0.0);
    prev = g;
  }
}

TEST_CASE("bipartite detection") {
  const Instance path = make_instance({1, 1, 1}, {1, 1, 1}, {{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
  const auto parts = is_bipartite(path);
  REQUIRE(parts.has_value());
  CHECK((parts->side1 | parts->side2) == 0b111);
  CHECK((parts->side1 & parts->side2) == 0);

  const Instance triangle = make_instance({1, 1, 1}, {1, 1, 1}, {{0, 1, 1}, {0, 0, 1}, {0, 0, 0}});
  CHECK_FALSE(is_bipartite(triangle).has_value());
  const Instance loop = make_instance({1}, {1}, {{1}});
  CHECK_FALSE(is_bipartite(loop).has_value());
}

TEST_CASE("departure classes") {
  CHECK(has_homogeneous_departures(make_instance({1, 1}, {2, 2}, {{1, 1}, {1, 1}})) ==
        DepartureClass::kGlobalHomogeneous);
  CHECK(has_homogeneous_departures(make_instance({1, 1}, {2, 3}, {{0, 1}, {1, 0}})) ==
        DepartureClass::kBipartiteHomogeneous);
  CHECK(has_homogeneous_departures(make_instance({1, 1}, {2, 3}, {{1, 1}, {1, 0}})) ==
        DepartureClass::kHeterogeneous);
}

TEST_CASE("match sets") {
  MatchSet m = MatchSet::all(3);
  CHECK(m.size() == 9);
  m.erase(1, 2);
  CHECK_FALSE(m.contains(1, 2));
  CHECK(m.contains(2, 1));
  CHECK(m.sources(2) == 0b101);
  const auto pairs = m.pairs();
  CHECK(pairs.size() == 8);
  CHECK(std::is_sorted(pairs.begin(), pairs.end()));
  CHECK(acceptable_sources(m, 2) == std::vector<TypeIndex>{0, 2});
}
