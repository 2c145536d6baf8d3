#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace dmatch::lp {

// max c.x  s.t.  A x = b,  x >= 0.  Dense, row-major A.
class StandardFormLp {
 public:
  StandardFormLp() = default;
  StandardFormLp(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_(rows * cols, 0.0), b_(rows, 0.0), c_(cols, 0.0) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double a(std::size_t r, std::size_t k) const { return a_[r * cols_ + k]; }
  double& a(std::size_t r, std::size_t k) { return a_[r * cols_ + k]; }
  double b(std::size_t r) const { return b_[r]; }
  double& b(std::size_t r) { return b_[r]; }
  double c(std::size_t k) const { return c_[k]; }
  double& c(std::size_t k) { return c_[k]; }

  const std::vector<double>& rhs() const noexcept { return b_; }
  const std::vector<double>& objective() const noexcept { return c_; }

  // Optional, used only for reporting.
  std::vector<std::string> names;

  // Largest |A x - b| over rows, each scaled by max(1, |b_row|).
  double residual(const std::vector<double>& x) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> c_;
};

struct BasicSolution {
  std::vector<double> x;
  // Structural column basic in each row. Rows found to be redundant during
  // phase 1 keep an artificial column and are listed in redundant_rows
  // instead; their entry here is kNoColumn.
  std::vector<std::size_t> basis;
  std::vector<std::size_t> redundant_rows;
  double objective = 0.0;
  // One multiplier per constraint row, signed for the original row
  // orientation: c_k - duals.A[:,k] <= 0 at optimality.
  std::vector<double> duals;

  static constexpr std::size_t kNoColumn = static_cast<std::size_t>(-1);

  bool in_basis(std::size_t column) const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kCycleLimitExceeded };

const char* to_string(LpStatus s);

struct SolveOptions {
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-9;
  double pivot_tol = 1e-9;

  // Wolfe-style objective perturbation c_k += delta * ratio^k. The returned
  // objective is always evaluated with the unperturbed c.
  bool perturb = false;
  double perturb_delta = 1e-9;
  double perturb_ratio = 0.5;

  // Dantzig pricing until this many iterations, Bland afterwards.
  // 0 selects the default 5 * (m + n).
  std::size_t bland_after = 0;
  bool force_bland = false;
  // 0 selects the default 50 * (m + n) + 1000.
  std::size_t max_iterations = 0;

  // Record a hash of every basis visited under Bland's rule and flag any
  // repetition in LpResult::revisited_basis.
  bool track_bases = false;
};

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  BasicSolution solution;  // meaningful only when status == kOptimal
  std::size_t iterations = 0;
  bool revisited_basis = false;

  bool ok() const noexcept { return status == LpStatus::kOptimal; }
};

LpResult solve(const StandardFormLp& lp, const SolveOptions& options = {});

// Every feasible basic solution over a maximal independent row subset, one
// per nonsingular feasible basis (so a degenerate vertex can appear more
// than once). Dropped rows get zero duals. Test oracle only.
// Throws Error(kTooLarge) unless cols <= 24 and rows <= 12.
std::vector<BasicSolution> enumerate_vertices(const StandardFormLp& lp,
                                              double feasibility_tol = 1e-9);

// max c.x s.t. A x <= b, x >= 0, with A given row-major. Solved through
// whichever of the primal or the dual is smaller. duals are the row
// multipliers of A x <= b (nonnegative).
struct InequalityResult {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  std::vector<double> duals;
  double objective = 0.0;
};

InequalityResult solve_inequality_form(std::size_t rows, std::size_t cols,
                                       const std::vector<double>& a,
                                       const std::vector<double>& b,
                                       const std::vector<double>& c,
                                       const SolveOptions& options = {});

}  // namespace dmatch::lp
