#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dmatch/instance.hpp"
#include "dmatch/lpalg.hpp"
#include "dmatch/linprog.hpp"

namespace dmatch {

enum class BoundKind { kOffRel, kOff, kOn };

const char* to_string(BoundKind kind);

struct BoundValue {
  BoundKind kind = BoundKind::kOffRel;
  double value = 0.0;
  RewardMatrix x;         // optimizing match rates
  std::vector<double> n;  // occupancies; only filled for kOn
  std::size_t rows = 0;   // constraint rows actually handed to the solver
};

inline constexpr std::size_t kMaxOffRelTypes = 16;
inline constexpr std::size_t kMaxOffTypes = 8;

// Relaxed offline bound: per-j subset caps lambda_j (1 - e^{-load S}) over
// every nonempty S plus the balance inequality. Throws kTooManyTypes.
BoundValue lp_off_rel(const Instance& instance, const lp::SolveOptions& options = {});

// Offline bound over all (S, S') pairs. Duplicate rows are merged keeping
// the smallest right-hand side. Throws kTooManyTypes above 8 types.
BoundValue lp_off(const Instance& instance, const lp::SolveOptions& options = {});

// Right-hand side of the (j, S, S') row of lp_off.
double lp_off_rhs(const Instance& instance, TypeIndex j, TypeSet s, TypeSet s_prime);

// Bound on any online policy: n_i mu_i + sum_j (x_ij + x_ji) = lambda_i and
// x_ij <= n_i lambda_j.
BoundValue lp_on(const Instance& instance, const lp::SolveOptions& options = {});

struct Factor2Report {
  double off_rel = 0.0;
  double alg_final = 0.0;  // LP^ALG at the suitable M
  double alg_full = 0.0;   // LP^ALG at M = T x T
  double ratio = 0.0;      // off_rel / alg_final, 0 when both vanish
  bool holds = true;       // off_rel <= 2 alg_final within 1e-6 relative
  bool full_holds = true;  // off_rel <= 2 alg_full within 1e-6 relative
};

Factor2Report factor2_check(const Instance& instance, const AlgOptions& options = {});

// Substitutes an LP^ALG dual (computed at M = T x T) into the dual of the
// relaxed offline LP.
struct OffRelDualCheck {
  double min_slack = 0.0;      // min over (i, j) of v_i + v_j + sum z - r_ij
  double min_variable = 0.0;   // min over v and z
  double objective = 0.0;      // relaxed-offline dual objective at (v, z)
  double twice_alg_dual = 0.0; // 2 sum_i lambda_i v_i
  bool feasible = true;
  bool bounded_by_twice_alg = true;
};

OffRelDualCheck check_off_rel_dual(const Instance& instance, const AlgDual& dual,
                                   double tol = 1e-8);

}  // namespace dmatch
