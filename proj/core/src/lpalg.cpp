#include "dmatch/lpalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "dmatch/error.hpp"

namespace dmatch {

namespace {

double scaled_tol(double tol, double lambda_j) { return tol * std::max(1.0, lambda_j); }

}  // namespace

AlgProgram build_lp_alg(const Instance& instance, const MatchSet& matches) {
  const std::size_t n = instance.num_types();
  if (matches.num_types() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "match set and instance disagree on |T|");
  }
  AlgProgram prog;
  AlgLayout& lay = prog.layout;
  lay.num_types = n;
  lay.pairs = matches.pairs();
  for (TypeIndex j = 0; j < n; ++j) {
    const TypeSet src = matches.sources(j);
    if (static_cast<std::size_t>(set_size(src)) > kMaxSources) {
      throw Error(ErrorCode::kTooManySources,
                  "type " + std::to_string(j) + " has more than 16 acceptable sources");
    }
    // Nonempty submasks of src in increasing order.
    std::vector<TypeSet> subs;
    for (TypeSet s = src; s != 0; s = (s - 1) & src) subs.push_back(s);
    std::reverse(subs.begin(), subs.end());
    for (TypeSet s : subs) lay.subsets.emplace_back(j, s);
  }

  lp::StandardFormLp& lp = prog.lp;
  lp = lp::StandardFormLp(lay.num_rows(), lay.num_cols());
  lp.names.resize(lay.num_cols());

  for (TypeIndex i = 0; i < n; ++i) {
    lp.a(i, lay.n_col(i)) = instance.mu(i);
    lp.b(i) = instance.lambda(i);
    lp.names[lay.n_col(i)] = "n_" + instance.type_ids()[i];
  }
  for (std::size_t k = 0; k < lay.pairs.size(); ++k) {
    const auto [i, j] = lay.pairs[k];
    const std::size_t col = lay.x_col(k);
    lp.a(i, col) += 1.0;
    lp.a(j, col) += 1.0;  // an (i, i) match removes two type-i agents
    lp.c(col) = instance.reward(i, j);
    lp.names[col] = "x_" + instance.type_ids()[i] + "_" + instance.type_ids()[j];
  }
  std::vector<std::size_t> pair_index(n * n, static_cast<std::size_t>(-1));
  for (std::size_t k = 0; k < lay.pairs.size(); ++k) {
    pair_index[lay.pairs[k].first * n + lay.pairs[k].second] = k;
  }
  for (std::size_t s = 0; s < lay.subsets.size(); ++s) {
    const auto [j, set] = lay.subsets[s];
    const std::size_t row = lay.match_row(s);
    const double coeff = instance.lambda(j) * gamma(instance, set);
    for (TypeIndex i : members(set)) {
      lp.a(row, lay.x_col(pair_index[i * n + j])) = 1.0;
      lp.a(row, lay.n_col(i)) = -coeff;
    }
    lp.a(row, lay.psi_col(s)) = 1.0;
    lp.b(row) = 0.0;
    lp.names[lay.psi_col(s)] = "psi_" + std::to_string(set) + "_" + instance.type_ids()[j];
  }
  return prog;
}

double AlgPrimal::psi_of(TypeIndex j, TypeSet s) const {
  for (const auto& e : psi)
    if (e.j == j && e.s == s) return e.value;
  throw Error(ErrorCode::kInvalidArgument, "no psi variable for the requested (j, S)");
}

AlgSolution solve_lp_alg(const Instance& instance, const MatchSet& matches,
                         const AlgOptions& options) {
  const AlgProgram prog = build_lp_alg(instance, matches);
  const AlgLayout& lay = prog.layout;
  const lp::LpResult res = lp::solve(prog.lp, options.solver);
  if (!res.ok()) {
    throw Error(ErrorCode::kSolverFailure,
                std::string("LP^ALG solve failed: ") + lp::to_string(res.status));
  }
  const std::size_t n = instance.num_types();
  const auto& x = res.solution.x;
  AlgSolution out;
  out.iterations = res.iterations;
  AlgPrimal& p = out.primal;
  p.matches = matches;
  p.lambda = instance.lambda();
  p.n.resize(n);
  for (TypeIndex i = 0; i < n; ++i) p.n[i] = x[lay.n_col(i)];
  p.x = RewardMatrix(n, 0.0);
  for (std::size_t k = 0; k < lay.pairs.size(); ++k) {
    p.x(lay.pairs[k].first, lay.pairs[k].second) = x[lay.x_col(k)];
  }
  for (std::size_t s = 0; s < lay.subsets.size(); ++s) {
    p.psi.push_back({lay.subsets[s].first, lay.subsets[s].second, x[lay.psi_col(s)]});
  }
  p.objective = res.solution.objective;
  p.basis = res.solution.basis;

  AlgDual& d = out.dual;
  d.v.assign(res.solution.duals.begin(), res.solution.duals.begin() + static_cast<long>(n));
  for (std::size_t s = 0; s < lay.subsets.size(); ++s) {
    d.z.push_back({lay.subsets[s].first, lay.subsets[s].second,
                   res.solution.duals[lay.match_row(s)]});
  }
  return out;
}

SuitabilityReport check_suitability(const AlgPrimal& sol, double zero_tol) {
  const std::size_t n = sol.n.size();
  SuitabilityReport report;
  report.prefixes.assign(n, {});
  std::optional<std::pair<TypeIndex, TypeIndex>> witness;
  for (const auto& e : sol.psi) {
    const double tol = scaled_tol(zero_tol, sol.lambda[e.j]);
    if (e.value > tol) continue;
    report.prefixes[e.j].push_back(e.s);
    for (TypeIndex i : members(e.s)) {
      if (sol.x(i, e.j) > tol) continue;
      const std::pair<TypeIndex, TypeIndex> cand{i, e.j};
      if (!witness || cand < *witness) witness = cand;
    }
  }
  for (auto& sets : report.prefixes) {
    std::sort(sets.begin(), sets.end(), [](TypeSet a, TypeSet b) {
      const int sa = set_size(a), sb = set_size(b);
      return sa != sb ? sa < sb : a < b;
    });
  }
  report.suitable = !witness.has_value();
  report.witness = witness;
  return report;
}

bool has_nested_prefix_structure(const SuitabilityReport& report) {
  for (const auto& sets : report.prefixes) {
    TypeSet prev = 0;
    for (std::size_t k = 0; k < sets.size(); ++k) {
      if (set_size(sets[k]) != static_cast<int>(k + 1)) return false;
      if ((sets[k] & prev) != prev) return false;
      prev = sets[k];
    }
  }
  return true;
}

SuitabilityResult suitability_finder(const Instance& instance, const AlgOptions& options) {
  const std::size_t n = instance.num_types();
  SuitabilityResult result;
  result.matches = MatchSet::all(n);
  const std::size_t max_removals = n * n;
  for (;;) {
    result.solution = solve_lp_alg(instance, result.matches, options);
    result.history.push_back(result.solution.primal.objective);
    result.report = check_suitability(result.solution.primal, options.zero_tol);
    if (result.report.suitable) return result;
    if (result.removed.size() >= max_removals) {
      throw Error(ErrorCode::kIterationOverflow, "suitability finder exceeded |T|^2 removals");
    }
    const auto [i, j] = *result.report.witness;
    result.matches.erase(i, j);
    result.removed.emplace_back(i, j);
  }
}

GreedyPolicy extract_prefix_policy(const SuitabilityReport& report) {
  if (!report.suitable) {
    throw Error(ErrorCode::kNotSuitable, "prefix policy requires a suitable solution");
  }
  if (!has_nested_prefix_structure(report)) {
    throw Error(ErrorCode::kNotSuitable, "tight sets are not a nested prefix family");
  }
  std::vector<std::vector<TypeIndex>> prefs(report.prefixes.size());
  for (std::size_t j = 0; j < report.prefixes.size(); ++j) {
    TypeSet prev = 0;
    for (TypeSet s : report.prefixes[j]) {
      const TypeSet added = s & ~prev;
      prefs[j].push_back(members(added).front());
      prev = s;
    }
  }
  return GreedyPolicy(std::move(prefs));
}

GreedyPolicy extract_value_policy(const AlgDual& dual, const MatchSet& matches,
                                  const RewardMatrix& r, const AlgPrimal* primal,
                                  double zero_tol) {
  const std::size_t n = dual.v.size();
  std::vector<std::vector<TypeIndex>> prefs(n);
  for (TypeIndex j = 0; j < n; ++j) {
    std::vector<std::pair<double, TypeIndex>> scored;
    for (TypeIndex i : members(matches.sources(j))) {
      const double score = r(i, j) - dual.v[i] - dual.v[j];
      bool acceptable = score > zero_tol;
      if (!acceptable && std::abs(score) <= zero_tol && primal != nullptr) {
        acceptable = primal->x(i, j) > scaled_tol(zero_tol, primal->lambda[j]);
      }
      if (acceptable) scored.emplace_back(score, i);
    }
    std::stable_sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
      if (std::abs(a.first - b.first) > zero_tol) return a.first > b.first;
      return a.second < b.second;
    });
    for (const auto& [score, i] : scored) prefs[j].push_back(i);
  }
  return GreedyPolicy(std::move(prefs));
}

double dual_nondegeneracy_margin(const AlgSolution& sol, const SuitabilityReport& report) {
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& e : sol.dual.z) {
    const auto& sets = report.prefixes[e.j];
    if (std::find(sets.begin(), sets.end(), e.s) != sets.end()) margin = std::min(margin, e.value);
  }
  return margin;
}

PolicyChoice extract_policies(const Instance& instance, const SuitabilityResult& result,
                              const AlgOptions& options) {
  PolicyChoice choice;
  choice.prefix_policy = extract_prefix_policy(result.report);
  choice.value_policy = extract_value_policy(result.solution.dual, result.matches, instance.r(),
                                             &result.solution.primal, options.zero_tol);
  choice.agree = choice.prefix_policy == choice.value_policy;
  if (choice.agree) return choice;

  AlgOptions perturbed = options;
  perturbed.solver.perturb = true;
  const AlgSolution resolved = solve_lp_alg(instance, result.matches, perturbed);
  choice.perturbed = true;
  choice.value_policy = extract_value_policy(resolved.dual, result.matches, instance.r(),
                                             &resolved.primal, options.zero_tol);
  choice.agree = choice.prefix_policy == choice.value_policy;
  return choice;
}

AlgCheck check_alg_solution(const Instance& instance, const AlgSolution& sol) {
  const std::size_t n = instance.num_types();
  const AlgPrimal& p = sol.primal;
  const AlgDual& d = sol.dual;
  AlgCheck c;
  for (TypeIndex i = 0; i < n; ++i) {
    double lhs = p.n[i] * instance.mu(i);
    for (TypeIndex j = 0; j < n; ++j) lhs += p.x(i, j) + p.x(j, i);
    c.balance_residual = std::max(c.balance_residual, std::abs(lhs - instance.lambda(i)));
    const double cap = instance.lambda(i) / instance.mu(i);
    c.n_bound_violation = std::max(c.n_bound_violation, std::max(p.n[i] - cap, 0.0));
    if (!(p.n[i] > 0.0)) c.n_bound_violation = std::max(c.n_bound_violation, 1.0);
  }
  for (const auto& e : p.psi) {
    double lhs = e.value;
    double load_n = 0.0;
    for (TypeIndex i : members(e.s)) {
      lhs += p.x(i, e.j);
      load_n += p.n[i];
    }
    const double rhs = instance.lambda(e.j) * gamma(instance, e.s) * load_n;
    c.match_rate_residual = std::max(c.match_rate_residual, std::abs(lhs - rhs));
  }

  // Dual feasibility and complementary slackness on x.
  std::vector<double> zsum(n * n, 0.0);  // [i * n + j] = sum_{S containing i} z_Sj
  for (const auto& e : d.z)
    for (TypeIndex i : members(e.s)) zsum[i * n + e.j] += e.value;
  for (auto [i, j] : p.matches.pairs()) {
    const double reduced = d.v[i] + d.v[j] + zsum[i * n + j] - instance.reward(i, j);
    c.dual_feasibility_violation = std::max(c.dual_feasibility_violation, -reduced);
    c.complementary_slackness = std::max(c.complementary_slackness, p.x(i, j) * std::abs(reduced));
  }
  for (std::size_t k = 0; k < d.z.size(); ++k) {
    c.dual_feasibility_violation = std::max(c.dual_feasibility_violation, -d.z[k].value);
    c.complementary_slackness = std::max(c.complementary_slackness, d.z[k].value * p.psi[k].value);
  }
  for (TypeIndex i = 0; i < n; ++i) {
    double rhs = 0.0;
    for (const auto& e : d.z)
      if (contains(e.s, i)) rhs += instance.lambda(e.j) * gamma(instance, e.s) * e.value;
    c.dual_balance_residual = std::max(c.dual_balance_residual, std::abs(d.v[i] * instance.mu(i) - rhs));
  }
  double dual_obj = 0.0;
  for (TypeIndex i = 0; i < n; ++i) dual_obj += instance.lambda(i) * d.v[i];
  c.duality_gap = std::abs(dual_obj - p.objective) / std::max(1.0, std::abs(p.objective));
  return c;
}

}  // namespace dmatch
