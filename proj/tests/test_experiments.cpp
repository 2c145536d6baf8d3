#include <cmath>
#include <sstream>

#include "doctest.h"
#include "dmatch/experiments.hpp"

using namespace dmatch;

TEST_CASE("random instances follow the generator ranges") {
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Instance inst = random_instance(1 + s % 10, s);
    double total = 0.0;
    for (TypeIndex i = 0; i < inst.num_types(); ++i) {
      total += inst.lambda(i);
      CHECK(inst.mu(i) >= 0.01);
      CHECK(inst.mu(i) <= 4.0);
      for (TypeIndex j = 0; j < inst.num_types(); ++j) {
        CHECK(inst.reward(i, j) >= 0.0);
        CHECK(inst.reward(i, j) <= 6.0);
      }
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);
  }
  CHECK(random_instance(4, 9).raw().r == random_instance(4, 9).raw().r);
}

TEST_CASE("variants") {
  const Instance h = homogeneous_variant(random_instance(3, 2));
  CHECK(has_homogeneous_departures(h) == DepartureClass::kGlobalHomogeneous);
  const Instance s = symmetric_two_type_variant(random_instance(2, 2));
  CHECK(s.reward(0, 1) == s.reward(1, 0));
}

TEST_CASE("comparison run: row count, ordering and byte-identical reruns") {
  ComparisonConfig cfg;
  cfg.num_types = 3;
  cfg.count = 6;
  cfg.horizon = 2000.0;
  cfg.off_horizon = 200.0;
  cfg.off_replications = 10;
  cfg.seed = 7;
  const auto rows = run_comparison(cfg);
  REQUIRE(rows.size() == 6);
  for (std::size_t k = 1; k < rows.size(); ++k)
    CHECK(rows[k - 1].normalized(rows[k - 1].v_hat) <= rows[k].normalized(rows[k].v_hat));
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    CHECK(r.factor2);
    CHECK(r.bounds_ordered);
    CHECK(r.denominator == r.lp_off);
  }
  std::ostringstream a, b;
  write_comparison_csv(a, cfg, rows);
  write_comparison_csv(b, cfg, run_comparison(cfg));
  CHECK(a.str() == b.str());
  std::size_t lines = 0;
  for (char c : a.str()) lines += c == '\n';
  CHECK(lines == 6 + 3);
}

TEST_CASE("above eight types the relaxed bound is the denominator") {
  ComparisonConfig cfg;
  cfg.num_types = 9;
  cfg.count = 1;
  cfg.simulate_policy = false;
  cfg.estimate_offline = false;
  const auto rows = run_comparison(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(std::isnan(rows[0].lp_off));
  CHECK(rows[0].denominator == rows[0].lp_off_rel);
  std::ostringstream os;
  write_comparison_csv(os, cfg, rows);
  CHECK(os.str().find("denominator=lp_off_rel") != std::string::npos);
}
