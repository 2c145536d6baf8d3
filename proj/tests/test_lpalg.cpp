#include <cmath>

#include "doctest.h"
#include "dmatch/error.hpp"
#include "dmatch/experiments.hpp"
#include "dmatch/lpalg.hpp"
#include "support/oracles.hpp"

using namespace dmatch;

namespace {

// One type, lambda = mu = 1, r = 1: n + 2x = 1 and x = (1 - e^-1) n.
double one_type_value() {
  const double g = 1.0 - std::exp(-1.0);
  return g / (1.0 + 2.0 * g);
}

}  // namespace

TEST_CASE("one-type instance by hand") {
  const Instance inst = make_instance({1}, {1}, {{1}});
  const SuitabilityResult res = suitability_finder(inst);
  CHECK(res.solution.primal.objective == doctest::Approx(one_type_value()).epsilon(1e-10));
  CHECK(res.solution.primal.objective == doctest::Approx(0.27918).epsilon(1e-4));
  CHECK(res.report.suitable);
  CHECK(res.history.size() == 1);
  const GreedyPolicy p = extract_prefix_policy(res.report);
  CHECK(p.preferences(0) == std::vector<TypeIndex>{0});
  CHECK(res.solution.dual.v[0] == doctest::Approx(one_type_value()));
}

TEST_CASE("layout of the program") {
  const Instance inst = make_instance({1, 2}, {1, 1}, {{1, 1}, {1, 1}});
  const AlgProgram prog = build_lp_alg(inst, MatchSet::all(2));
  CHECK(prog.layout.pairs.size() == 4);
  CHECK(prog.layout.subsets.size() == 6);
  CHECK(prog.lp.rows() == 8);
  CHECK(prog.lp.cols() == 2 + 4 + 6);
  // x_00 takes two units out of type 0's balance row.
  CHECK(prog.lp.a(0, prog.layout.x_col(0)) == 2.0);
  CHECK(prog.lp.b(1) == 2.0);
}

TEST_CASE("too many sources") {
  std::vector<double> ones(17, 1.0);
  std::vector<std::vector<double>> r(17, ones);
  const Instance inst = make_instance(ones, ones, r);
  CHECK_THROWS_WITH_AS(build_lp_alg(inst, MatchSet::all(17)), doctest::Contains("16"), Error);
}

TEST_CASE("LP^ALG optimum matches vertex enumeration on two types") {
  for (std::uint64_t s = 0; s < 15; ++s) {
    CAPTURE(s);
    const Instance inst = random_instance(2, 1000 + s);
    const AlgProgram prog = build_lp_alg(inst, MatchSet::all(2));
    const auto oracle = testing::vertex_oracle(prog.lp);
    REQUIRE(oracle.feasible);
    const AlgSolution sol = solve_lp_alg(inst, MatchSet::all(2));
    CHECK(sol.primal.objective == doctest::Approx(oracle.best).epsilon(1e-9));
  }
}

TEST_CASE("primal and dual invariants hold at the optimum") {
  for (std::size_t types = 2; types <= 5; ++types) {
    for (std::uint64_t s = 0; s < 6; ++s) {
      const Instance inst = random_instance(types, 77 * types + s);
      const SuitabilityResult res = suitability_finder(inst);
      const AlgCheck c = check_alg_solution(inst, res.solution);
      CHECK(c.balance_residual < 1e-9);
      CHECK(c.match_rate_residual < 1e-9);
      CHECK(c.n_bound_violation == 0.0);
      CHECK(c.dual_feasibility_violation < 1e-9);
      CHECK(c.dual_balance_residual < 1e-8);
      CHECK(c.duality_gap < 1e-9);
      CHECK(c.complementary_slackness < 1e-9);
    }
  }
}

TEST_CASE("suitability finder: monotone history and nested tight sets") {
  for (std::size_t types = 2; types <= 6; ++types) {
    for (std::uint64_t s = 0; s < 8; ++s) {
      const Instance inst = random_instance(types, 5000 + 10 * types + s);
      const SuitabilityResult res = suitability_finder(inst);
      CHECK(res.report.suitable);
      CHECK(has_nested_prefix_structure(res.report));
      CHECK(res.removed.size() <= types * types);
      for (std::size_t k = 1; k < res.history.size(); ++k)
        CHECK(res.history[k] >= res.history[k - 1] - 1e-9);
      for (auto [i, j] : res.removed) CHECK_FALSE(res.matches.contains(i, j));
    }
  }
}

TEST_CASE("suitability check finds the smallest witness") {
  AlgPrimal p;
  p.matches = MatchSet::all(2);
  p.lambda = {1.0, 1.0};
  p.n = {0.5, 0.5};
  p.x = RewardMatrix(2, 0.0);
  p.x(1, 0) = 0.2;
  // psi for j = 0, S = {0, 1} tight while x_00 = 0.
  p.psi = {{0, 0b01, 0.3}, {0, 0b10, 0.0}, {0, 0b11, 0.0}, {1, 0b11, 0.1}};
  const SuitabilityReport rep = check_suitability(p);
  CHECK_FALSE(rep.suitable);
  REQUIRE(rep.witness.has_value());
  CHECK(*rep.witness == std::pair<TypeIndex, TypeIndex>{0, 0});
  CHECK_THROWS_AS(extract_prefix_policy(rep), Error);
}

TEST_CASE("prefix and value extraction agree on nondegenerate optima") {
  std::size_t compared = 0, agreed = 0;
  for (std::size_t types = 2; types <= 5; ++types) {
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Instance inst = random_instance(types, 9000 + 31 * types + s);
      const SuitabilityResult res = suitability_finder(inst);
      if (dual_nondegeneracy_margin(res.solution, res.report) < 1e-6) continue;
      ++compared;
      const PolicyChoice choice = extract_policies(inst, res);
      agreed += choice.agree;
    }
  }
  CHECK(compared > 10);
  CHECK(agreed == compared);
}

TEST_CASE("policy preference lists only contain matches in M") {
  const Instance inst = random_instance(4, 31337);
  const SuitabilityResult res = suitability_finder(inst);
  const GreedyPolicy p = extract_prefix_policy(res.report);
  for (TypeIndex j = 0; j < 4; ++j)
    for (TypeIndex i : p.preferences(j)) CHECK(res.matches.contains(i, j));
}

TEST_CASE("no positive reward gives the empty policy") {
  const Instance inst = make_instance({1, 2}, {1, 1}, {{-1, -2}, {-3, -1}});
  const SuitabilityResult res = suitability_finder(inst);
  CHECK(res.solution.primal.objective == 0.0);
  const GreedyPolicy p = extract_prefix_policy(res.report);
  CHECK(p == GreedyPolicy::no_match(2));
}
