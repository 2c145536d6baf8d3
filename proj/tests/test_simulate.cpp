#include <cmath>
#include <sstream>

#include "doctest.h"
#include "dmatch/error.hpp"
#include "dmatch/experiments.hpp"
#include "dmatch/lpalg.hpp"
#include "dmatch/rng.hpp"
#include "dmatch/simulate.hpp"

using namespace dmatch;

TEST_CASE("counter RNG is a pure function of its coordinates") {
  CounterRng a(5, 7), b(5, 7), c(5, 8);
  const auto first = a.next();
  CHECK(first == b.next());
  CHECK(first != c.next());
  CHECK(a.at(10) == CounterRng(5, 7).at(10));
  for (int k = 0; k < 1000; ++k) {
    const double u = a.uniform();
    CHECK((u > 0.0 && u < 1.0));
  }
}

TEST_CASE("mean and standard error") {
  const Estimate e = mean_and_se({1.0, 2.0, 3.0, 4.0});
  CHECK(e.mean == doctest::Approx(2.5));
  CHECK(e.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
}

TEST_CASE("no-match policy reproduces the M/M/infinity occupancy") {
  const Instance inst = make_instance({0.5, 2.0}, {1.0, 0.5}, {{1, 1}, {1, 1}});
  SimOptions opts;
  opts.horizon = 4e4;
  opts.burn_in = 4e3;
  opts.seed = 17;
  opts.subsets = {0b01, 0b11};
  const SimStats s = simulate(inst, GreedyPolicy::no_match(2), opts);
  for (TypeIndex i = 0; i < 2; ++i) {
    const Estimate n = s.n(i);
    CHECK(std::abs(n.mean - inst.lambda(i) / inst.mu(i)) <= 4.0 * n.se);
  }
  const Estimate p = s.p(1);
  CHECK(std::abs(p.mean - (1.0 - std::exp(-4.5))) <= 4.0 * p.se + 1e-12);
  CHECK(s.total_matches == 0);
  CHECK(s.value_rate().mean == 0.0);
}

TEST_CASE("simulation is deterministic per seed") {
  const Instance inst = random_instance(3, 21);
  const GreedyPolicy p = extract_prefix_policy(suitability_finder(inst).report);
  SimOptions opts;
  opts.horizon = 2e3;
  opts.burn_in = 2e2;
  opts.seed = 4;
  const SimStats a = simulate(inst, p, opts), b = simulate(inst, p, opts);
  CHECK(a.reward_rate == b.reward_rate);
  CHECK(a.total_arrivals == b.total_arrivals);
  opts.seed = 5;
  CHECK(simulate(inst, p, opts).reward_rate != a.reward_rate);
}

TEST_CASE("balance holds in simulation") {
  const Instance inst = random_instance(4, 88);
  const GreedyPolicy p = extract_prefix_policy(suitability_finder(inst).report);
  SimOptions opts;
  opts.horizon = 2e4;
  opts.burn_in = 2e3;
  opts.seed = 8;
  const SimStats s = simulate(inst, p, opts);
  for (TypeIndex i = 0; i < 4; ++i) {
    const Estimate r = balance_residual(inst, s, i);
    CHECK(std::abs(r.mean) <= 4.0 * r.se);
  }
  CHECK(s.total_arrivals == s.total_abandonments + 2 * s.total_matches + s.final_occupancy);
}

TEST_CASE("residual standard errors are calibrated") {
  const Instance inst = random_instance(3, 91);
  const GreedyPolicy p = extract_prefix_policy(suitability_finder(inst).report);
  SimOptions opts;
  opts.horizon = 2e3;
  opts.burn_in = 2e2;
  for (TypeIndex j = 0; j < 3; ++j)
    for (TypeSet s : p.prefixes(j)) opts.subsets.push_back(s);
  double sq = 0.0;
  std::size_t count = 0;
  for (std::uint64_t k = 0; k < 60; ++k) {
    opts.seed = 500 + k;
    const SimStats st = simulate(inst, p, opts);
    for (TypeIndex i = 0; i < 3; ++i) {
      const Estimate r = balance_residual(inst, st, i);
      sq += (r.mean / r.se) * (r.mean / r.se);
      ++count;
    }
    for (TypeIndex j = 0; j < 3; ++j)
      for (TypeSet s : p.prefixes(j)) {
        const Estimate d = prefix_residual(inst, st, s, j);
        if (d.se > 0.0) {
          sq += (d.mean / d.se) * (d.mean / d.se);
          ++count;
        }
      }
  }
  REQUIRE(count > 0);
  const double mean_sq = sq / static_cast<double>(count);
  CHECK(mean_sq > 0.7);
  CHECK(mean_sq < 1.4);
}

TEST_CASE("degenerate horizons are rejected") {
  const Instance inst = make_instance({1}, {1}, {{1}});
  SimOptions opts;
  opts.horizon = 10.0;
  opts.burn_in = 10.0;
  CHECK_THROWS_AS(simulate(inst, GreedyPolicy::no_match(1), opts), Error);
}

TEST_CASE("trace sampling shares the simulator's arrivals") {
  const Instance inst = make_instance({1.0, 0.5}, {1.0, 2.0}, {{0, 0}, {0, 0}});
  const Trace t = sample_trace(inst, 500.0, 9);
  CHECK(t.events.size() > 500);
  CHECK(std::is_sorted(t.events.begin(), t.events.end(),
                       [](const TraceEvent& a, const TraceEvent& b) { return a.arrival < b.arrival; }));
  SimOptions opts;
  opts.horizon = 500.0;
  opts.burn_in = 0.0;
  opts.seed = 9;
  CHECK(simulate(inst, GreedyPolicy::no_match(2), opts).total_arrivals == t.events.size());
  CHECK(sample_trace(inst, 0.0, 9).events.empty());
  std::ostringstream os;
  write_trace_csv(os, sample_trace(inst, 3.0, 9));
  CHECK(os.str().rfind("agent_id,type,arrival,departure\n", 0) == 0);
}

TEST_CASE("gamma inequality for the no-match policy holds with equality") {
  const Instance inst = make_instance({0.7, 0.3}, {1.0, 1.0}, {{0, 0}, {0, 0}});
  const auto probe = gamma_inequality_probe(inst, GreedyPolicy::no_match(2), {0b11}, 2e4, 12);
  REQUIRE(probe.size() == 1);
  CHECK(std::abs(probe[0].presence.mean - probe[0].gamma_bound.mean) <= 4.0 * probe[0].diff_se);
}
