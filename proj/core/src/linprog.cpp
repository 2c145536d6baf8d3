#include "dmatch/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "dmatch/error.hpp"

namespace dmatch::lp {

double StandardFormLp::residual(const std::vector<double>& x) const {
  double worst = 0.0;
  for (std::size_t r = 0; r < rows_; ++r) {
    double lhs = 0.0;
    const double* row = &a_[r * cols_];
    for (std::size_t k = 0; k < cols_; ++k) lhs += row[k] * x[k];
    worst = std::max(worst, std::abs(lhs - b_[r]) / std::max(1.0, std::abs(b_[r])));
  }
  return worst;
}

bool BasicSolution::in_basis(std::size_t column) const {
  return std::find(basis.begin(), basis.end(), column) != basis.end();
}

const char* to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "Optimal";
    case LpStatus::kInfeasible: return "Infeasible";
    case LpStatus::kUnbounded: return "Unbounded";
    case LpStatus::kCycleLimitExceeded: return "CycleLimitExceeded";
  }
  return "Unknown";
}

namespace {

// Dense tableau over the structural columns followed by one artificial
// column per row that lacked a usable unit column. Rows are pre-scaled so
// the initial basis is the identity; that lets the duals be read off the
// reduced costs of the initial basic columns at the end.
class Tableau {
 public:
  Tableau(const StandardFormLp& lp, const SolveOptions& opt) : lp_(lp), opt_(opt) {
    m_ = lp.rows();
    n_ = lp.cols();
    setup();
  }

  LpResult run() {
    LpResult result;
    const std::size_t size = m_ + n_;
    bland_after_ = opt_.bland_after ? opt_.bland_after : 5 * size;
    max_iterations_ = opt_.max_iterations ? opt_.max_iterations : 50 * size + 1000;

    if (num_art_ > 0) {
      load_phase1_costs();
      LpStatus s = iterate(/*allow_artificial=*/false);
      if (s == LpStatus::kCycleLimitExceeded) {
        result.status = s;
        result.iterations = iterations_;
        return result;
      }
      double infeasibility = 0.0;
      for (std::size_t r = 0; r < m_; ++r)
        if (basis_[r] >= n_) infeasibility += rhs_[r];
      double scale = 1.0;
      for (std::size_t r = 0; r < m_; ++r) scale = std::max(scale, std::abs(lp_.b(r)));
      if (infeasibility > opt_.feasibility_tol * scale) {
        result.status = LpStatus::kInfeasible;
        result.iterations = iterations_;
        return result;
      }
      drive_out_artificials();
    }

    load_phase2_costs();
    LpStatus s = iterate(false);
    result.iterations = iterations_;
    result.revisited_basis = revisited_;
    result.status = s;
    if (s != LpStatus::kOptimal) return result;
    result.solution = extract();
    return result;
  }

 private:
  double& t(std::size_t r, std::size_t k) { return tab_[r * width_ + k]; }

  void setup() {
    row_sign_.assign(m_, 1.0);
    for (std::size_t r = 0; r < m_; ++r)
      if (lp_.b(r) < 0.0) row_sign_[r] = -1.0;
    row_scale_ = row_sign_;  // unit-column rows are rescaled below

    // A column is a usable unit column for row r if its only nonzero sits in
    // row r with a positive (sign-corrected) coefficient.
    std::vector<std::size_t> unit_row(n_, BasicSolution::kNoColumn);
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t nz_row = BasicSolution::kNoColumn;
      int count = 0;
      for (std::size_t r = 0; r < m_ && count < 2; ++r) {
        if (lp_.a(r, k) != 0.0) {
          ++count;
          nz_row = r;
        }
      }
      if (count == 1 && row_sign_[nz_row] * lp_.a(nz_row, k) > 0.0) unit_row[k] = nz_row;
    }
    initial_col_.assign(m_, BasicSolution::kNoColumn);
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t r = unit_row[k];
      if (r != BasicSolution::kNoColumn && initial_col_[r] == BasicSolution::kNoColumn) {
        initial_col_[r] = k;
        row_scale_[r] = 1.0 / lp_.a(r, k);
      }
    }
    num_art_ = 0;
    for (std::size_t r = 0; r < m_; ++r)
      if (initial_col_[r] == BasicSolution::kNoColumn) initial_col_[r] = n_ + num_art_++;
    width_ = n_ + num_art_;

    tab_.assign(m_ * width_, 0.0);
    rhs_.assign(m_, 0.0);
    basis_ = initial_col_;
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t k = 0; k < n_; ++k) t(r, k) = lp_.a(r, k) * row_scale_[r];
      if (initial_col_[r] >= n_) t(r, initial_col_[r]) = 1.0;
      rhs_[r] = lp_.b(r) * row_scale_[r];
    }

    cost_.assign(width_, 0.0);
    for (std::size_t k = 0; k < n_; ++k) {
      cost_[k] = lp_.c(k);
      if (opt_.perturb) cost_[k] += opt_.perturb_delta * std::pow(opt_.perturb_ratio, double(k));
    }
  }

  void load_phase1_costs() {
    phase_cost_.assign(width_, 0.0);
    for (std::size_t k = n_; k < width_; ++k) phase_cost_[k] = -1.0;
    price();
  }

  void load_phase2_costs() {
    phase_cost_ = cost_;
    for (std::size_t k = n_; k < width_; ++k) phase_cost_[k] = 0.0;
    price();
  }

  // d_k = c_k - c_B . column_k of the current tableau.
  void price() {
    d_ = phase_cost_;
    for (std::size_t r = 0; r < m_; ++r) {
      const double cb = phase_cost_[basis_[r]];
      if (cb == 0.0) continue;
      const double* row = &tab_[r * width_];
      for (std::size_t k = 0; k < width_; ++k) d_[k] -= cb * row[k];
    }
    for (std::size_t r = 0; r < m_; ++r) d_[basis_[r]] = 0.0;
  }

  std::size_t choose_entering(bool bland) const {
    std::size_t best = BasicSolution::kNoColumn;
    double best_d = opt_.optimality_tol;
    for (std::size_t k = 0; k < n_; ++k) {
      if (d_[k] > best_d) {
        if (bland) return k;
        best_d = d_[k];
        best = k;
      }
    }
    return best;
  }

  std::size_t choose_leaving(std::size_t q, bool bland) {
    std::size_t best = BasicSolution::kNoColumn;
    double best_ratio = std::numeric_limits<double>::infinity();
    double best_pivot = 0.0;
    for (std::size_t r = 0; r < m_; ++r) {
      const double a = t(r, q);
      if (a <= opt_.pivot_tol) continue;
      const double ratio = std::max(rhs_[r], 0.0) / a;
      const double tie = 1e-12 * std::max(1.0, best_ratio);
      if (best == BasicSolution::kNoColumn || ratio < best_ratio - tie) {
        best = r;
        best_ratio = ratio;
        best_pivot = a;
      } else if (ratio <= best_ratio + tie) {
        // Prefer driving artificials out, then Bland's smallest index, or
        // the larger pivot element for stability.
        const bool art_r = basis_[r] >= n_;
        const bool art_best = basis_[best] >= n_;
        bool take;
        if (art_r != art_best) {
          take = art_r;
        } else if (bland) {
          take = basis_[r] < basis_[best];
        } else {
          take = a > best_pivot;
        }
        if (take) {
          best = r;
          best_ratio = std::min(best_ratio, ratio);
          best_pivot = a;
        }
      }
    }
    return best;
  }

  void pivot(std::size_t p, std::size_t q) {
    double* prow = &tab_[p * width_];
    const double inv = 1.0 / prow[q];
    nz_.clear();
    for (std::size_t k = 0; k < width_; ++k) {
      if (prow[k] != 0.0) {
        prow[k] *= inv;
        nz_.push_back(k);
      }
    }
    prow[q] = 1.0;
    rhs_[p] *= inv;

    for (std::size_t r = 0; r < m_; ++r) {
      if (r == p) continue;
      double* row = &tab_[r * width_];
      const double f = row[q];
      if (f == 0.0) continue;
      for (std::size_t k : nz_) row[k] -= f * prow[k];
      row[q] = 0.0;
      rhs_[r] -= f * rhs_[p];
      if (std::abs(rhs_[r]) < 1e-13) rhs_[r] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
      for (std::size_t k : nz_) d_[k] -= f * prow[k];
      d_[q] = 0.0;
    }
    basis_[p] = q;
  }

  std::uint64_t basis_hash() const {
    std::vector<std::size_t> sorted = basis_;
    std::sort(sorted.begin(), sorted.end());
    std::uint64_t h = 1469598103934665603ULL;
    for (std::size_t v : sorted) {
      h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
      h *= 1099511628211ULL;
    }
    return h;
  }

  LpStatus iterate(bool allow_artificial) {
    (void)allow_artificial;
    std::unordered_set<std::uint64_t> seen;
    for (;;) {
      if (iterations_ >= max_iterations_) return LpStatus::kCycleLimitExceeded;
      const bool bland = opt_.force_bland || iterations_ >= bland_after_;
      if (bland && opt_.track_bases) {
        if (!seen.insert(basis_hash()).second) revisited_ = true;
      }
      const std::size_t q = choose_entering(bland);
      if (q == BasicSolution::kNoColumn) return LpStatus::kOptimal;
      const std::size_t p = choose_leaving(q, bland);
      if (p == BasicSolution::kNoColumn) return LpStatus::kUnbounded;
      pivot(p, q);
      ++iterations_;
    }
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) continue;
      std::size_t best = BasicSolution::kNoColumn;
      double best_abs = opt_.pivot_tol;
      for (std::size_t k = 0; k < n_; ++k) {
        const double a = std::abs(t(r, k));
        if (a > best_abs) {
          best_abs = a;
          best = k;
        }
      }
      if (best != BasicSolution::kNoColumn) {
        // Degenerate pivot: rhs_[r] is zero up to the phase-1 tolerance.
        rhs_[r] = 0.0;
        pivot(r, best);
      }
    }
  }

  BasicSolution extract() const {
    BasicSolution sol;
    sol.x.assign(n_, 0.0);
    sol.basis.assign(m_, BasicSolution::kNoColumn);
    for (std::size_t r = 0; r < m_; ++r) {
      if (basis_[r] < n_) {
        sol.x[basis_[r]] = std::max(rhs_[r], 0.0);
        sol.basis[r] = basis_[r];
      } else {
        sol.redundant_rows.push_back(r);
      }
    }
    sol.objective = 0.0;
    for (std::size_t k = 0; k < n_; ++k) sol.objective += lp_.c(k) * sol.x[k];

    // For the scaled problem y'_r = c_{init_r} - d_{init_r}; undo the row
    // scaling to get the multiplier of the original row.
    sol.duals.assign(m_, 0.0);
    for (std::size_t r = 0; r < m_; ++r) {
      const std::size_t k = initial_col_[r];
      const double y_scaled = phase_cost_[k] - d_[k];
      sol.duals[r] = y_scaled * row_scale_[r];
    }
    return sol;
  }

  const StandardFormLp& lp_;
  const SolveOptions& opt_;
  std::size_t m_ = 0, n_ = 0, num_art_ = 0, width_ = 0;
  std::vector<double> tab_, rhs_, cost_, phase_cost_, d_;
  std::vector<double> row_sign_, row_scale_;
  std::vector<std::size_t> basis_, initial_col_, nz_;
  std::size_t iterations_ = 0, bland_after_ = 0, max_iterations_ = 0;
  bool revisited_ = false;
};

// Gaussian elimination with partial pivoting on a k x k system, in place.
bool solve_dense(std::vector<double>& mat, std::vector<double>& rhs, std::size_t k) {
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(mat[r * k + col]) > std::abs(mat[piv * k + col])) piv = r;
    if (std::abs(mat[piv * k + col]) < 1e-10) return false;
    if (piv != col) {
      for (std::size_t c = 0; c < k; ++c) std::swap(mat[piv * k + c], mat[col * k + c]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = mat[r * k + col] / mat[col * k + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < k; ++c) mat[r * k + c] -= f * mat[col * k + c];
      rhs[r] -= f * rhs[col];
    }
  }
  for (std::size_t r = 0; r < k; ++r) rhs[r] /= mat[r * k + r];
  return true;
}

}  // namespace

LpResult solve(const StandardFormLp& lp, const SolveOptions& options) {
  Tableau tableau(lp, options);
  return tableau.run();
}

namespace {

// Indices of a maximal set of linearly independent rows of A. Sets
// consistent to false when a dependent row contradicts the others.
std::vector<std::size_t> independent_rows(const StandardFormLp& lp, bool& consistent) {
  const std::size_t m = lp.rows(), n = lp.cols();
  std::vector<std::vector<double>> reduced;  // echelon rows with b appended
  std::vector<std::size_t> lead, keep;
  consistent = true;
  for (std::size_t r = 0; r < m; ++r) {
    std::vector<double> row(n + 1);
    for (std::size_t k = 0; k < n; ++k) row[k] = lp.a(r, k);
    row[n] = lp.b(r);
    for (std::size_t e = 0; e < reduced.size(); ++e) {
      const double f = row[lead[e]];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k <= n; ++k) row[k] -= f * reduced[e][k];
    }
    std::size_t piv = n;
    double best = 1e-9;
    for (std::size_t k = 0; k < n; ++k)
      if (std::abs(row[k]) > best) {
        best = std::abs(row[k]);
        piv = k;
      }
    if (piv == n) {
      if (std::abs(row[n]) > 1e-9 * std::max(1.0, std::abs(lp.b(r)))) consistent = false;
      continue;
    }
    const double inv = 1.0 / row[piv];
    for (double& v : row) v *= inv;
    for (auto& other : reduced) {
      const double f = other[piv];
      if (f == 0.0) continue;
      for (std::size_t k = 0; k <= n; ++k) other[k] -= f * row[k];
    }
    reduced.push_back(std::move(row));
    lead.push_back(piv);
    keep.push_back(r);
  }
  return keep;
}

}  // namespace

std::vector<BasicSolution> enumerate_vertices(const StandardFormLp& lp, double feasibility_tol) {
  const std::size_t n = lp.cols();
  if (n > 24 || lp.rows() > 12) {
    throw Error(ErrorCode::kTooLarge, "vertex enumeration is limited to 24 columns and 12 rows");
  }
  std::vector<BasicSolution> out;
  bool consistent = true;
  const std::vector<std::size_t> rows = independent_rows(lp, consistent);
  if (!consistent) return out;
  const std::size_t m = rows.size();
  if (m == 0) {
    // Every row is vacuous: the only vertex is the origin.
    BasicSolution sol;
    sol.x.assign(n, 0.0);
    sol.duals.assign(lp.rows(), 0.0);
    out.push_back(std::move(sol));
    return out;
  }

  std::vector<std::size_t> combo(m);
  std::iota(combo.begin(), combo.end(), 0);
  std::vector<double> mat(m * m), rhs(m), mat_t(m * m), cb(m);
  for (;;) {
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t c = 0; c < m; ++c) mat[r * m + c] = lp.a(rows[r], combo[c]);
    for (std::size_t r = 0; r < m; ++r) rhs[r] = lp.b(rows[r]);
    std::vector<double> mat_copy = mat;
    if (solve_dense(mat, rhs, m) &&
        std::all_of(rhs.begin(), rhs.end(), [&](double v) { return v >= -feasibility_tol; })) {
      BasicSolution sol;
      sol.x.assign(n, 0.0);
      sol.basis = combo;
      for (std::size_t c = 0; c < m; ++c) sol.x[combo[c]] = std::max(rhs[c], 0.0);
      for (std::size_t k = 0; k < n; ++k) sol.objective += lp.c(k) * sol.x[k];
      // Duals from B^T y = c_B on the independent rows; dropped rows get 0.
      for (std::size_t r = 0; r < m; ++r)
        for (std::size_t c = 0; c < m; ++c) mat_t[c * m + r] = mat_copy[r * m + c];
      for (std::size_t c = 0; c < m; ++c) cb[c] = lp.c(combo[c]);
      if (solve_dense(mat_t, cb, m)) {
        sol.duals.assign(lp.rows(), 0.0);
        for (std::size_t r = 0; r < m; ++r) sol.duals[rows[r]] = cb[r];
      }
      out.push_back(std::move(sol));
    }
    if (m > n) break;
    std::size_t i = m;
    while (i > 0 && combo[i - 1] == n - m + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < m; ++j) combo[j] = combo[j - 1] + 1;
  }
  return out;
}

InequalityResult solve_inequality_form(std::size_t rows, std::size_t cols,
                                       const std::vector<double>& a,
                                       const std::vector<double>& b,
                                       const std::vector<double>& c,
                                       const SolveOptions& options) {
  InequalityResult out;
  if (rows <= cols) {
    // Primal with one slack per row.
    StandardFormLp lp(rows, cols + rows);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < cols; ++k) lp.a(r, k) = a[r * cols + k];
      lp.a(r, cols + r) = 1.0;
      lp.b(r) = b[r];
    }
    for (std::size_t k = 0; k < cols; ++k) lp.c(k) = c[k];
    LpResult res = solve(lp, options);
    out.status = res.status;
    if (!res.ok()) return out;
    out.x.assign(res.solution.x.begin(), res.solution.x.begin() + static_cast<long>(cols));
    out.duals = res.solution.duals;
    out.objective = res.solution.objective;
    return out;
  }

  // Dual: min b.y s.t. A^T y >= c, y >= 0, written as
  // max -b.y s.t. A^T y - s = c. The primal x is minus the row multipliers.
  StandardFormLp dual(cols, rows + cols);
  for (std::size_t k = 0; k < cols; ++k) {
    for (std::size_t r = 0; r < rows; ++r) dual.a(k, r) = a[r * cols + k];
    dual.a(k, rows + k) = -1.0;
    dual.b(k) = c[k];
  }
  for (std::size_t r = 0; r < rows; ++r) dual.c(r) = -b[r];
  LpResult res = solve(dual, options);
  switch (res.status) {
    case LpStatus::kOptimal: break;
    case LpStatus::kInfeasible: out.status = LpStatus::kUnbounded; return out;
    case LpStatus::kUnbounded: out.status = LpStatus::kInfeasible; return out;
    default: out.status = res.status; return out;
  }
  out.status = LpStatus::kOptimal;
  out.x.resize(cols);
  for (std::size_t k = 0; k < cols; ++k) out.x[k] = std::max(-res.solution.duals[k], 0.0);
  out.duals.assign(res.solution.x.begin(), res.solution.x.begin() + static_cast<long>(rows));
  out.objective = 0.0;
  for (std::size_t k = 0; k < cols; ++k) out.objective += c[k] * out.x[k];
  return out;
}

}  // namespace dmatch::lp
