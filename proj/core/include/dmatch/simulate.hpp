#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dmatch/instance.hpp"
#include "dmatch/policy.hpp"

namespace dmatch {

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
};

// Sample mean and standard error of the mean (zero SE below two values).
Estimate mean_and_se(const std::vector<double>& values);

// One realized agent. Agents are numbered in global arrival order.
struct TraceEvent {
  std::size_t agent_id = 0;
  TypeIndex type = 0;
  double arrival = 0.0;
  double departure = 0.0;  // when the agent would leave unmatched
};

struct Trace {
  double horizon = 0.0;
  std::vector<TraceEvent> events;  // sorted by arrival
};

// Poisson arrivals per type on [0, horizon) with Exp(mu) sojourns.
// Deterministic in (instance, horizon, seed).
Trace sample_trace(const Instance& instance, double horizon, std::uint64_t seed);

// agent_id,type,arrival,departure with 12 significant digits.
void write_trace_csv(std::ostream& os, const Trace& trace);

struct SimOptions {
  double horizon = 2e4;
  double burn_in = 2e3;
  std::uint64_t seed = 1;
  std::vector<TypeSet> subsets;  // presence probabilities to estimate
  std::size_t batches = 20;
};

// Steady-state estimates from one run. Every statistic is kept per batch
// (equal-time batch means over [burn_in, horizon)) so derived quantities can
// get standard errors through batch_estimate().
class SimStats {
 public:
  std::size_t num_types = 0;
  double horizon = 0.0;
  double burn_in = 0.0;
  std::uint64_t seed = 0;
  std::size_t batches = 0;
  std::vector<TypeSet> subsets;

  // [i * num_types + j][batch]: rate of (i, j) matches, i the waiting agent.
  std::vector<std::vector<double>> match_rate;
  // [i][batch]: time-average number of waiting type-i agents.
  std::vector<std::vector<double>> occupancy;
  // [s][batch]: time-average of 1(some member of subsets[s] is waiting).
  std::vector<std::vector<double>> presence;
  // [i][batch]: observed arrival rate.
  std::vector<std::vector<double>> arrival_rate;
  // [batch]: reward rate.
  std::vector<double> reward_rate;

  // Whole-run counters, burn-in included.
  std::size_t total_arrivals = 0;
  std::size_t total_matches = 0;
  std::size_t total_abandonments = 0;
  std::size_t final_occupancy = 0;

  Estimate x(TypeIndex i, TypeIndex j) const;
  Estimate n(TypeIndex i) const;
  Estimate p(std::size_t subset_index) const;
  Estimate value_rate() const;
  // Sum over i in s of x(i, j).
  Estimate x_set(TypeSet s, TypeIndex j) const;

  std::size_t subset_index(TypeSet s) const;  // throws if not queried

  // Mean and batch-means standard error of f(batch).
  Estimate batch_estimate(const std::function<double(std::size_t)>& f) const;
};

// Event-driven simulation of a Markovian policy. Waiting agents of one type
// are served first-in first-out.
SimStats simulate(const Instance& instance, const MarkovPolicy& policy, const SimOptions& options);

// The two residuals below take their SE from the compensators of the
// underlying counting processes rather than from batch means. Batch means
// with few batches give heavy-tailed t statistics and collapse to near zero
// when the counted events are rare.

// n_i mu_i + sum_j (x_ij + x_ji) - lambda_i. SE sqrt((lambda_i + mu_i n_i) / T).
Estimate balance_residual(const Instance& instance, const SimStats& stats, TypeIndex i);

// sum_{i in s} x_ij - lambda_j p_s, zero in expectation when j matches into s
// whenever s is present. SE sqrt(lambda_j p_s / T). s must have been queried.
Estimate prefix_residual(const Instance& instance, const SimStats& stats, TypeSet s, TypeIndex j);

struct GammaProbeEntry {
  TypeSet subset = 0;
  Estimate presence;        // P(sum_{i in S} N_i > 0)
  Estimate gamma_bound;     // gamma_S * sum_{i in S} n_i
  double margin_se = 0.0;   // (presence - bound) / SE(difference)
  double diff_se = 0.0;
  bool holds = false;       // presence >= bound - 3 SE
};

std::vector<GammaProbeEntry> gamma_inequality_probe(const Instance& instance,
                                                    const MarkovPolicy& policy,
                                                    const std::vector<TypeSet>& subsets,
                                                    double horizon, std::uint64_t seed,
                                                    double burn_in_fraction = 0.1);

// Same, on an existing run whose subsets include the ones requested.
std::vector<GammaProbeEntry> gamma_inequality_report(const Instance& instance,
                                                     const SimStats& stats,
                                                     const std::vector<TypeSet>& subsets);

}  // namespace dmatch
