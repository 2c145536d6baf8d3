#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "dmatch/instance.hpp"
#include "dmatch/linprog.hpp"
#include "dmatch/policy.hpp"

namespace dmatch {

// Largest |T(M, j)| for which the subset constraints are enumerated.
inline constexpr std::size_t kMaxSources = 16;

// Variable value attached to a match-rate row (j, S).
struct SubsetValue {
  TypeIndex j = 0;
  TypeSet s = 0;
  double value = 0.0;
};

// Column/row layout of the LP built for (I, M):
//   columns: n_0..n_{T-1}, then x_ij for (i, j) in M in lexicographic order,
//            then psi_{S j} for j = 0.. and nonempty S within T(M, j) in
//            increasing bitmask order;
//   rows:    balance rows 0..T-1, then one match-rate row per psi column.
struct AlgLayout {
  std::size_t num_types = 0;
  std::vector<std::pair<TypeIndex, TypeIndex>> pairs;
  std::vector<std::pair<TypeIndex, TypeSet>> subsets;

  std::size_t n_col(TypeIndex i) const { return i; }
  std::size_t x_col(std::size_t pair_index) const { return num_types + pair_index; }
  std::size_t psi_col(std::size_t subset_index) const {
    return num_types + pairs.size() + subset_index;
  }
  std::size_t match_row(std::size_t subset_index) const { return num_types + subset_index; }
  std::size_t num_cols() const { return num_types + pairs.size() + subsets.size(); }
  std::size_t num_rows() const { return num_types + subsets.size(); }
};

struct AlgProgram {
  AlgLayout layout;
  lp::StandardFormLp lp;
};

// Throws kTooManySources when some |T(M, j)| exceeds kMaxSources.
AlgProgram build_lp_alg(const Instance& instance, const MatchSet& matches);

struct AlgPrimal {
  MatchSet matches;
  std::vector<double> lambda;  // copied from the instance for tolerance scaling
  std::vector<double> n;
  RewardMatrix x;  // zero outside M
  std::vector<SubsetValue> psi;
  double objective = 0.0;
  std::vector<std::size_t> basis;

  double psi_of(TypeIndex j, TypeSet s) const;
};

struct AlgDual {
  std::vector<double> v;
  std::vector<SubsetValue> z;
};

struct AlgSolution {
  AlgPrimal primal;
  AlgDual dual;
  std::size_t iterations = 0;
};

struct AlgOptions {
  // x_ij > 0 and psi_Sj = 0 are decided against zero_tol * max(1, lambda_j).
  double zero_tol = 1e-9;
  lp::SolveOptions solver;
};

// Throws Error(kSolverFailure) on any non-optimal status; LP^ALG is always
// feasible, so that signals a numerical problem.
AlgSolution solve_lp_alg(const Instance& instance, const MatchSet& matches,
                         const AlgOptions& options = {});

struct SuitabilityReport {
  bool suitable = true;
  std::optional<std::pair<TypeIndex, TypeIndex>> witness;
  // prefixes[j]: the sets S with psi_Sj = 0, sorted by size.
  std::vector<std::vector<TypeSet>> prefixes;
};

SuitabilityReport check_suitability(const AlgPrimal& sol, double zero_tol = 1e-9);

// True when, for every j, the tight sets form a chain with exactly one set of
// each size 1..k.
bool has_nested_prefix_structure(const SuitabilityReport& report);

struct SuitabilityResult {
  MatchSet matches;
  AlgSolution solution;
  SuitabilityReport report;
  std::vector<double> history;  // R_1, ..., R_K
  std::vector<std::pair<TypeIndex, TypeIndex>> removed;
};

// Starts from M = T x T and removes one witness match per round until the
// optimum is suitable. Throws kIterationOverflow past |T|^2 removals.
SuitabilityResult suitability_finder(const Instance& instance, const AlgOptions& options = {});

// Orders j's partners by the nested tight sets. Throws kNotSuitable.
GreedyPolicy extract_prefix_policy(const SuitabilityReport& report);

// Ranks i in T(M, j) by r_ij - v_i - v_j (descending, ties to the smaller
// index). Positive scores are acceptable; a score within zero_tol of 0 is
// acceptable only when the accompanying primal has x_ij > 0.
GreedyPolicy extract_value_policy(const AlgDual& dual, const MatchSet& matches,
                                  const RewardMatrix& r, const AlgPrimal* primal = nullptr,
                                  double zero_tol = 1e-9);

// Smallest z over tight sets that carry positive x; a value near zero means
// the dual is degenerate and may not pin down one order.
double dual_nondegeneracy_margin(const AlgSolution& sol, const SuitabilityReport& report);

struct PolicyChoice {
  GreedyPolicy prefix_policy;
  GreedyPolicy value_policy;
  bool agree = false;
  bool perturbed = false;  // true if a perturbed re-solve was needed
};

// Both extractions on a suitable optimum; when they disagree the LP is
// re-solved with objective perturbation and the value policy recomputed.
PolicyChoice extract_policies(const Instance& instance, const SuitabilityResult& result,
                              const AlgOptions& options = {});

// Residuals of the AlgPrimal/AlgDual invariants; used by tests and the CLI.
struct AlgCheck {
  double balance_residual = 0.0;
  double match_rate_residual = 0.0;
  double n_bound_violation = 0.0;      // max over i of violations of 0 < n_i <= lambda_i/mu_i
  double dual_feasibility_violation = 0.0;
  double dual_balance_residual = 0.0;
  double duality_gap = 0.0;            // relative
  double complementary_slackness = 0.0;
};

AlgCheck check_alg_solution(const Instance& instance, const AlgSolution& sol);

}  // namespace dmatch
