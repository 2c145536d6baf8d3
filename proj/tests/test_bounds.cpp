#include <cmath>

#include "doctest.h"
#include "dmatch/bounds.hpp"
#include "dmatch/error.hpp"
#include "dmatch/experiments.hpp"
#include "dmatch/policy.hpp"

using namespace dmatch;

namespace {

// Reference for lp_off: every (j, S, S') row without deduplication, solved
// as a standard-form LP with explicit slacks.
double lp_off_reference(const Instance& inst) {
  const std::size_t n = inst.num_types();
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;
  for (TypeIndex j = 0; j < n; ++j)
    for (TypeSet s = 0; s <= full_set(n); ++s)
      for (TypeSet sp = 0; sp <= full_set(n); ++sp) {
        if (s == 0 && sp == 0) continue;
        std::vector<double> row(n * n, 0.0);
        for (TypeIndex i : members(s)) row[i * n + j] += 1.0;
        for (TypeIndex i : members(sp)) row[j * n + i] += 1.0;
        double rate = 0.0;
        for (TypeIndex i : members(sp)) rate += inst.lambda(i);
        rows.push_back(row);
        rhs.push_back(inst.lambda(j) *
                      (1.0 - inst.mu(j) / (inst.mu(j) + rate) * std::exp(-inst.load(s))));
      }
  lp::StandardFormLp lp(rows.size(), n * n + rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t k = 0; k < n * n; ++k) lp.a(r, k) = rows[r][k];
    lp.a(r, n * n + r) = 1.0;
    lp.b(r) = rhs[r];
  }
  for (std::size_t k = 0; k < n * n; ++k) lp.c(k) = inst.reward(k / n, k % n);
  const auto res = lp::solve(lp);
  REQUIRE(res.ok());
  return res.solution.objective;
}

}  // namespace

TEST_CASE("one-type bounds by hand") {
  const Instance inst = make_instance({1}, {1}, {{1}});
  CHECK(lp_off_rel(inst).value == doctest::Approx(0.5));
  CHECK(lp_off(inst).value == doctest::Approx((1.0 - std::exp(-1.0) / 2.0) / 2.0));
  CHECK(lp_on(inst).value == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("non-positive rewards give zero bounds") {
  const Instance inst = make_instance({1, 1}, {1, 2}, {{-1, 0}, {-2, -0.5}});
  CHECK(lp_off_rel(inst).value == 0.0);
  CHECK(lp_off(inst).value == 0.0);
  CHECK(lp_on(inst).value == 0.0);
}

TEST_CASE("lp_off agrees with the undeduplicated program") {
  for (std::uint64_t s = 0; s < 8; ++s) {
    const Instance inst = random_instance(2 + s % 2, 400 + s);
    CHECK(lp_off(inst).value == doctest::Approx(lp_off_reference(inst)).epsilon(1e-9));
  }
}

TEST_CASE("bound ordering and the factor-two relation") {
  for (std::size_t types = 1; types <= 5; ++types) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Instance inst = random_instance(types, 100 * types + s);
      const double off = lp_off(inst).value;
      const double rel = lp_off_rel(inst).value;
      CHECK(off <= rel + 1e-7);
      const Factor2Report f = factor2_check(inst);
      CHECK(f.holds);
      CHECK(f.full_holds);
      CHECK(f.ratio <= 2.0 + 1e-6);
      CHECK(lp_on(inst).value >= f.alg_final - 1e-9);
    }
  }
}

TEST_CASE("factor-two ratio on the one-type instance") {
  const Factor2Report f = factor2_check(make_instance({1}, {1}, {{1}}));
  CHECK(f.ratio == doctest::Approx(0.5 / 0.2791754614).epsilon(1e-6));
}

TEST_CASE("S = S' = T row is strictly tighter than the balance row") {
  for (std::uint64_t s = 0; s < 5; ++s) {
    const Instance inst = random_instance(3, 800 + s);
    for (TypeIndex j = 0; j < 3; ++j)
      CHECK(lp_off_rhs(inst, j, full_set(3), full_set(3)) < inst.lambda(j));
  }
}

TEST_CASE("the LP^ALG dual is feasible for the relaxed offline dual") {
  for (std::size_t types = 2; types <= 5; ++types) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      const Instance inst = random_instance(types, 300 * types + s);
      const AlgSolution sol = solve_lp_alg(inst, MatchSet::all(types));
      const OffRelDualCheck c = check_off_rel_dual(inst, sol.dual);
      CHECK(c.feasible);
      CHECK(c.bounded_by_twice_alg);
      CHECK(lp_off_rel(inst).value <= c.objective + 1e-8);
    }
  }
}

TEST_CASE("hard example: the online bound is at most one") {
  for (double mu : {1.0, 3.0, 10.0})
    for (double l2 : {10.0, 100.0}) CHECK(lp_on(hard_example_instance(mu, l2)).value <= 1.0 + 1e-8);
}

TEST_CASE("size guards") {
  const Instance big = random_instance(9, 1);
  CHECK_THROWS_AS(lp_off(big), Error);
  const Instance huge = random_instance(17, 1);
  CHECK_THROWS_AS(lp_off_rel(huge), Error);
}
