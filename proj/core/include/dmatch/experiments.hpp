#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dmatch/instance.hpp"
#include "dmatch/simulate.hpp"

namespace dmatch {

// lambda normalized to sum 1 from Unif(0,1) draws, mu ~ Unif(0.01, 4),
// r_ij = 6 u^2 with u ~ Unif(0,1). Deterministic in (num_types, seed).
Instance random_instance(std::size_t num_types, std::uint64_t seed);

// Same draws with every mu_i replaced by mu_0.
Instance homogeneous_variant(const Instance& instance);

// Same draws with r_21 overwritten by r_12 (two types only).
Instance symmetric_two_type_variant(const Instance& instance);

// Seed of the k-th instance of a run.
std::uint64_t instance_seed(std::uint64_t seed, std::size_t k);

struct ComparisonConfig {
  std::size_t num_types = 3;
  std::size_t count = 100;
  double horizon = 2e4;          // simulation horizon for the ALG policy
  double burn_in_fraction = 0.1;
  double off_horizon = 2000.0;   // per-replication horizon for OFF
  std::size_t off_replications = 30;
  std::uint64_t seed = 1;
  bool homogeneous = false;      // force a common mu per instance
  bool simulate_policy = true;
  bool estimate_offline = true;
};

struct ExperimentRow {
  std::size_t id = 0;
  std::uint64_t seed = 0;
  std::size_t num_types = 0;
  double lp_alg = 0.0;
  double lp_alg_full = 0.0;
  std::size_t finder_rounds = 0;
  double v_hat = 0.0;
  double v_se = 0.0;
  double off_hat = 0.0;
  double off_se = 0.0;
  double lp_off = 0.0;  // NaN when skipped for size
  double lp_off_rel = 0.0;
  double denominator = 0.0;  // lp_off, or lp_off_rel when lp_off is skipped
  bool homogeneous = false;
  bool alg_le_v = false;       // lp_alg <= v_hat + 2 SE
  bool factor2 = false;        // lp_off_rel <= 2 lp_alg + 1e-6 max(1, lp_off_rel)
  bool off_le_bound = false;   // off_hat <= lp_off + 3 SE
  bool bounds_ordered = false; // lp_off <= lp_off_rel + 1e-7
  bool monotone = false;       // R_k nondecreasing within 1e-9
  bool nested = false;         // nested prefix structure at the suitable optimum
  bool chain = false;          // all of the above
  std::string error;           // nonempty when the row failed

  double normalized(double value) const { return denominator > 0.0 ? value / denominator : 0.0; }
};

// One row per instance. Rows are computed in parallel and sorted by
// v_hat / denominator (ties by id).
std::vector<ExperimentRow> run_comparison(const ComparisonConfig& config);

// Computes a single row; used by run_comparison and the CLI verify command.
ExperimentRow evaluate_instance(const Instance& instance, std::size_t id, std::uint64_t seed,
                                const ComparisonConfig& config);

// '#' comment lines echo the config (and the denominator substitution above
// eight types) followed by a header and one line per row at 10 significant
// digits.
void write_comparison_csv(std::ostream& os, const ComparisonConfig& config,
                          const std::vector<ExperimentRow>& rows);

struct HardExampleCase {
  double mu = 0.0;
  double lambda2 = 0.0;
  double lp_on = 0.0;
  bool lp_on_le_one = false;
};

struct AdjCase {
  double mu = 0.0;
  Estimate x11;
  Estimate value;
  double x11_exact = 0.0;
  double value_exact = 0.0;
  bool x11_within = false;    // within 3 SE
  bool value_within = false;  // within 3 SE
  double ratio_bound = 0.0;   // 1 / value_exact
};

struct CounterexampleCase {
  double eps = 0.0;
  double horizon = 0.0;
  Estimate presence;
  Estimate gamma_bound;
  bool inequality_fails = false;  // presence below the bound by more than 3 SE
};

struct TwoTypeCase {
  std::uint64_t seed = 0;
  double lp_off_rel = 0.0;
  double lp_alg = 0.0;
  Estimate v_hat;
  bool exact_link = false;       // lp_off_rel / 2 <= lp_alg
  bool stochastic_link = false;  // lp_alg <= v_hat + 2 SE
};

struct SpecialCaseConfig {
  std::vector<double> hard_mus{1.0, 3.0, 10.0};
  std::vector<double> hard_lambda2{10.0, 100.0};
  double adj_horizon = 1e5;
  double counterexample_eps = 0.01;
  double counterexample_horizon = 2e6;
  std::size_t two_type_count = 20;
  double two_type_horizon = 2e4;
};

struct SpecialCaseReport {
  std::vector<HardExampleCase> hard;
  std::vector<AdjCase> adj;
  CounterexampleCase counterexample;
  std::vector<TwoTypeCase> two_type;
};

SpecialCaseReport special_cases(std::uint64_t seed, const SpecialCaseConfig& config = {});

}  // namespace dmatch
