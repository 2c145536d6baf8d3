#include "dmatch/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>

#include "dmatch/error.hpp"

namespace dmatch {

const char* to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::kOffRel: return "off_rel";
    case BoundKind::kOff: return "off";
    case BoundKind::kOn: return "on";
  }
  return "unknown";
}

namespace {

// Pairs that can contribute; a zero match rate is optimal for the rest in
// every bound below since all their coefficients are nonnegative.
std::vector<std::pair<TypeIndex, TypeIndex>> rewarding_pairs(const Instance& inst) {
  std::vector<std::pair<TypeIndex, TypeIndex>> out;
  for (TypeIndex i = 0; i < inst.num_types(); ++i)
    for (TypeIndex j = 0; j < inst.num_types(); ++j)
      if (inst.reward(i, j) > 0.0) out.emplace_back(i, j);
  return out;
}

void require_types(const Instance& inst, std::size_t limit, const char* what) {
  if (inst.num_types() > limit) {
    throw Error(ErrorCode::kTooManyTypes, std::string(what) + " supports at most " +
                                              std::to_string(limit) + " types");
  }
}

// Rows keyed by their coefficient pattern; equal patterns keep the smaller
// right-hand side.
class RowSet {
 public:
  explicit RowSet(std::size_t cols) : cols_(cols) {}

  void add(std::vector<std::uint8_t> coeffs, double rhs) {
    if (std::all_of(coeffs.begin(), coeffs.end(), [](std::uint8_t c) { return c == 0; })) return;
    auto [it, inserted] = rows_.emplace(std::move(coeffs), rhs);
    if (!inserted) it->second = std::min(it->second, rhs);
  }

  std::size_t size() const { return rows_.size(); }

  void flatten(std::vector<double>& a, std::vector<double>& b) const {
    a.assign(rows_.size() * cols_, 0.0);
    b.clear();
    std::size_t r = 0;
    for (const auto& [coeffs, rhs] : rows_) {
      for (std::size_t k = 0; k < cols_; ++k) a[r * cols_ + k] = coeffs[k];
      b.push_back(rhs);
      ++r;
    }
  }

 private:
  std::size_t cols_;
  std::map<std::vector<std::uint8_t>, double> rows_;
};

BoundValue solve_rows(const Instance& inst, BoundKind kind,
                      const std::vector<std::pair<TypeIndex, TypeIndex>>& pairs,
                      const RowSet& rows, const lp::SolveOptions& options) {
  BoundValue out;
  out.kind = kind;
  out.x = RewardMatrix(inst.num_types(), 0.0);
  out.rows = rows.size();
  if (pairs.empty()) return out;
  std::vector<double> a, b, c;
  rows.flatten(a, b);
  for (auto [i, j] : pairs) c.push_back(inst.reward(i, j));
  const lp::InequalityResult res =
      lp::solve_inequality_form(rows.size(), pairs.size(), a, b, c, options);
  if (res.status != lp::LpStatus::kOptimal) {
    throw Error(ErrorCode::kSolverFailure,
                std::string(to_string(kind)) + " solve failed: " + lp::to_string(res.status));
  }
  for (std::size_t k = 0; k < pairs.size(); ++k) out.x(pairs[k].first, pairs[k].second) = res.x[k];
  out.value = res.objective;
  return out;
}

}  // namespace

BoundValue lp_off_rel(const Instance& instance, const lp::SolveOptions& options) {
  require_types(instance, kMaxOffRelTypes, "lp_off_rel");
  const std::size_t n = instance.num_types();
  const auto pairs = rewarding_pairs(instance);
  RowSet rows(pairs.size());
  for (TypeIndex j = 0; j < n; ++j) {
    for (TypeSet s = 1; s <= full_set(n); ++s) {
      std::vector<std::uint8_t> coeffs(pairs.size(), 0);
      for (std::size_t k = 0; k < pairs.size(); ++k)
        if (pairs[k].second == j && contains(s, pairs[k].first)) coeffs[k] = 1;
      rows.add(std::move(coeffs), -instance.lambda(j) * std::expm1(-instance.load(s)));
    }
    std::vector<std::uint8_t> balance(pairs.size(), 0);
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      balance[k] = static_cast<std::uint8_t>((pairs[k].first == j) + (pairs[k].second == j));
    }
    rows.add(std::move(balance), instance.lambda(j));
  }
  return solve_rows(instance, BoundKind::kOffRel, pairs, rows, options);
}

double lp_off_rhs(const Instance& instance, TypeIndex j, TypeSet s, TypeSet s_prime) {
  double rate = 0.0;
  for (TypeIndex i : members(s_prime)) rate += instance.lambda(i);
  const double mu = instance.mu(j);
  return instance.lambda(j) * (1.0 - mu / (mu + rate) * std::exp(-instance.load(s)));
}

BoundValue lp_off(const Instance& instance, const lp::SolveOptions& options) {
  require_types(instance, kMaxOffTypes, "lp_off");
  const std::size_t n = instance.num_types();
  const auto pairs = rewarding_pairs(instance);
  RowSet rows(pairs.size());
  for (TypeIndex j = 0; j < n; ++j) {
    for (TypeSet s = 0; s <= full_set(n); ++s) {
      for (TypeSet sp = 0; sp <= full_set(n); ++sp) {
        if (s == 0 && sp == 0) continue;
        std::vector<std::uint8_t> coeffs(pairs.size(), 0);
        for (std::size_t k = 0; k < pairs.size(); ++k) {
          const auto [a, b] = pairs[k];
          coeffs[k] = static_cast<std::uint8_t>((b == j && contains(s, a)) +
                                                (a == j && contains(sp, b)));
        }
        rows.add(std::move(coeffs), lp_off_rhs(instance, j, s, sp));
      }
    }
  }
  return solve_rows(instance, BoundKind::kOff, pairs, rows, options);
}

BoundValue lp_on(const Instance& instance, const lp::SolveOptions& options) {
  const std::size_t n = instance.num_types();
  const auto pairs = rewarding_pairs(instance);
  const std::size_t p = pairs.size();
  // Columns: n_i, x_k, slack_k. Rows: balance_i, cap_k.
  lp::StandardFormLp lp(n + p, n + 2 * p);
  for (TypeIndex i = 0; i < n; ++i) {
    lp.a(i, i) = instance.mu(i);
    lp.b(i) = instance.lambda(i);
  }
  for (std::size_t k = 0; k < p; ++k) {
    const auto [i, j] = pairs[k];
    const std::size_t col = n + k;
    lp.a(i, col) += 1.0;
    lp.a(j, col) += 1.0;
    lp.c(col) = instance.reward(i, j);
    lp.a(n + k, col) = 1.0;
    lp.a(n + k, i) = -instance.lambda(j);
    lp.a(n + k, n + p + k) = 1.0;
  }
  const lp::LpResult res = lp::solve(lp, options);
  if (!res.ok()) {
    throw Error(ErrorCode::kSolverFailure,
                std::string("lp_on solve failed: ") + lp::to_string(res.status));
  }
  BoundValue out;
  out.kind = BoundKind::kOn;
  out.value = res.solution.objective;
  out.rows = n + p;
  out.x = RewardMatrix(n, 0.0);
  for (std::size_t k = 0; k < p; ++k) out.x(pairs[k].first, pairs[k].second) = res.solution.x[n + k];
  out.n.assign(res.solution.x.begin(), res.solution.x.begin() + static_cast<long>(n));
  return out;
}

Factor2Report factor2_check(const Instance& instance, const AlgOptions& options) {
  Factor2Report rep;
  rep.off_rel = lp_off_rel(instance, options.solver).value;
  const SuitabilityResult found = suitability_finder(instance, options);
  rep.alg_final = found.solution.primal.objective;
  rep.alg_full = found.history.front();
  const double tol = 1e-6 * std::max(1.0, rep.off_rel);
  rep.holds = rep.off_rel <= 2.0 * rep.alg_final + tol;
  rep.full_holds = rep.off_rel <= 2.0 * rep.alg_full + tol;
  rep.ratio = rep.alg_final > 0.0 ? rep.off_rel / rep.alg_final : 0.0;
  return rep;
}

OffRelDualCheck check_off_rel_dual(const Instance& instance, const AlgDual& dual, double tol) {
  const std::size_t n = instance.num_types();
  OffRelDualCheck out;
  out.min_slack = std::numeric_limits<double>::infinity();
  out.min_variable = std::numeric_limits<double>::infinity();
  std::vector<double> zsum(n * n, 0.0);
  for (const auto& e : dual.z) {
    out.min_variable = std::min(out.min_variable, e.value);
    out.objective += e.value * -instance.lambda(e.j) * std::expm1(-instance.load(e.s));
    for (TypeIndex i : members(e.s)) zsum[i * n + e.j] += e.value;
  }
  for (TypeIndex i = 0; i < n; ++i) {
    out.min_variable = std::min(out.min_variable, dual.v[i]);
    out.objective += instance.lambda(i) * dual.v[i];
    out.twice_alg_dual += 2.0 * instance.lambda(i) * dual.v[i];
    for (TypeIndex j = 0; j < n; ++j) {
      out.min_slack = std::min(out.min_slack,
                               dual.v[i] + dual.v[j] + zsum[i * n + j] - instance.reward(i, j));
    }
  }
  const double scale = std::max(1.0, out.twice_alg_dual);
  out.feasible = out.min_slack >= -tol * scale && out.min_variable >= -tol * scale;
  out.bounded_by_twice_alg = out.objective <= out.twice_alg_dual + tol * scale;
  return out;
}

}  // namespace dmatch
