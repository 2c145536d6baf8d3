#include "dmatch/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "dmatch/bounds.hpp"
#include "dmatch/error.hpp"
#include "dmatch/lpalg.hpp"
#include "dmatch/omniscient.hpp"
#include "dmatch/parallel.hpp"
#include "dmatch/policy.hpp"
#include "dmatch/rng.hpp"

namespace dmatch {

Instance random_instance(std::size_t num_types, std::uint64_t seed) {
  if (num_types == 0) throw Error(ErrorCode::kInvalidArgument, "num_types must be positive");
  CounterRng rng(seed, streams::kInstanceGen);
  std::vector<double> lambda(num_types), mu(num_types);
  for (double& l : lambda) l = rng.uniform();
  double total = 0.0;
  for (double l : lambda) total += l;
  for (double& l : lambda) l /= total;
  for (double& m : mu) m = rng.uniform(0.01, 4.0);
  std::vector<std::vector<double>> r(num_types, std::vector<double>(num_types));
  for (auto& row : r)
    for (double& v : row) {
      const double u = rng.uniform();
      v = 6.0 * u * u;
    }
  return make_instance(std::move(lambda), std::move(mu), std::move(r));
}

Instance homogeneous_variant(const Instance& instance) {
  RawInstance raw = instance.raw();
  std::fill(raw.mu.begin(), raw.mu.end(), raw.mu.front());
  return validate(raw);
}

Instance symmetric_two_type_variant(const Instance& instance) {
  if (instance.num_types() != 2) {
    throw Error(ErrorCode::kInvalidArgument, "symmetric variant needs exactly two types");
  }
  RawInstance raw = instance.raw();
  raw.r[1][0] = raw.r[0][1];
  return validate(raw);
}

std::uint64_t instance_seed(std::uint64_t seed, std::size_t k) {
  return CounterRng(seed, streams::kExperimentBase).at(k);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_monotone(const std::vector<double>& history) {
  for (std::size_t k = 1; k < history.size(); ++k)
    if (history[k] < history[k - 1] - 1e-9) return false;
  return true;
}

}  // namespace

ExperimentRow evaluate_instance(const Instance& instance, std::size_t id, std::uint64_t seed,
                                const ComparisonConfig& config) {
  ExperimentRow row;
  row.id = id;
  row.seed = seed;
  row.num_types = instance.num_types();
  row.homogeneous = has_homogeneous_departures(instance) != DepartureClass::kHeterogeneous;
  row.lp_off = kNaN;
  row.v_hat = row.off_hat = kNaN;
  try {
    const SuitabilityResult found = suitability_finder(instance);
    row.lp_alg = found.solution.primal.objective;
    row.lp_alg_full = found.history.front();
    row.finder_rounds = found.history.size();
    row.monotone = is_monotone(found.history);
    row.nested = has_nested_prefix_structure(found.report);

    row.lp_off_rel = lp_off_rel(instance).value;
    if (instance.num_types() <= kMaxOffTypes) row.lp_off = lp_off(instance).value;
    row.denominator = std::isnan(row.lp_off) ? row.lp_off_rel : row.lp_off;

    row.factor2 = row.lp_off_rel <= 2.0 * row.lp_alg + 1e-6 * std::max(1.0, row.lp_off_rel);
    row.bounds_ordered = std::isnan(row.lp_off) || row.lp_off <= row.lp_off_rel + 1e-7;

    bool alg_ok = true, off_ok = true;
    if (config.simulate_policy) {
      const GreedyPolicy policy = extract_prefix_policy(found.report);
      SimOptions opts;
      opts.horizon = config.horizon;
      opts.burn_in = config.burn_in_fraction * config.horizon;
      opts.seed = seed;
      const SimStats stats = simulate(instance, policy, opts);
      const Estimate v = stats.value_rate();
      row.v_hat = v.mean;
      row.v_se = v.se;
      row.alg_le_v = row.lp_alg <= row.v_hat + 2.0 * row.v_se;
      alg_ok = row.alg_le_v;
    }
    if (config.estimate_offline) {
      const OffEstimate off =
          estimate_off(instance, config.off_horizon, config.off_replications, seed);
      row.off_hat = off.mean;
      row.off_se = off.se;
      const double bound = std::isnan(row.lp_off) ? row.lp_off_rel : row.lp_off;
      row.off_le_bound = row.off_hat <= bound + 3.0 * row.off_se;
      off_ok = row.off_le_bound;
    }
    row.chain = row.factor2 && row.bounds_ordered && row.monotone && row.nested && alg_ok && off_ok;
  } catch (const std::exception& e) {
    row.error = e.what();
    row.chain = false;
  }
  return row;
}

std::vector<ExperimentRow> run_comparison(const ComparisonConfig& config) {
  std::vector<ExperimentRow> rows(config.count);
  parallel_for(config.count, [&](std::size_t k) {
    const std::uint64_t s = instance_seed(config.seed, k);
    Instance inst = random_instance(config.num_types, s);
    if (config.homogeneous) inst = homogeneous_variant(inst);
    rows[k] = evaluate_instance(inst, k, s, config);
  });
  std::stable_sort(rows.begin(), rows.end(), [](const ExperimentRow& a, const ExperimentRow& b) {
    const double ka = a.normalized(a.v_hat), kb = b.normalized(b.v_hat);
    if (std::isnan(ka) != std::isnan(kb)) return std::isnan(kb);
    if (ka != kb && !std::isnan(ka)) return ka < kb;
    return a.id < b.id;
  });
  return rows;
}

namespace {

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string csv_escape(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_comparison_csv(std::ostream& os, const ComparisonConfig& config,
                          const std::vector<ExperimentRow>& rows) {
  os << "# types=" << config.num_types << " count=" << config.count
     << " horizon=" << fmt(config.horizon) << " burn_in_fraction=" << fmt(config.burn_in_fraction)
     << " off_horizon=" << fmt(config.off_horizon) << " off_reps=" << config.off_replications
     << " seed=" << config.seed << " homogeneous=" << (config.homogeneous ? 1 : 0) << '\n';
  os << "# denominator="
     << (config.num_types > kMaxOffTypes ? "lp_off_rel (lp_off skipped above 8 types)" : "lp_off")
     << '\n';
  os << "id,seed,num_types,lp_alg,v_hat,v_se,off_hat,off_se,lp_off,lp_off_rel,denominator,"
        "norm_lp_alg,norm_v_hat,norm_off_hat,norm_lp_off_rel,homogeneous,alg_le_v,factor2,"
        "off_le_bound,bounds_ordered,monotone,nested,chain,error\n";
  for (const auto& r : rows) {
    os << r.id << ',' << r.seed << ',' << r.num_types << ',' << fmt(r.lp_alg) << ','
       << fmt(r.v_hat) << ',' << fmt(r.v_se) << ',' << fmt(r.off_hat) << ',' << fmt(r.off_se)
       << ',' << fmt(r.lp_off) << ',' << fmt(r.lp_off_rel) << ',' << fmt(r.denominator) << ','
       << fmt(r.normalized(r.lp_alg)) << ',' << fmt(r.normalized(r.v_hat)) << ','
       << fmt(r.normalized(r.off_hat)) << ',' << fmt(r.normalized(r.lp_off_rel)) << ','
       << r.homogeneous << ',' << r.alg_le_v << ',' << r.factor2 << ',' << r.off_le_bound << ','
       << r.bounds_ordered << ',' << r.monotone << ',' << r.nested << ',' << r.chain << ','
       << (r.error.empty() ? "" : csv_escape(r.error)) << '\n';
  }
}

SpecialCaseReport special_cases(std::uint64_t seed, const SpecialCaseConfig& config) {
  SpecialCaseReport rep;
  for (double mu : config.hard_mus) {
    for (double l2 : config.hard_lambda2) {
      HardExampleCase c;
      c.mu = mu;
      c.lambda2 = l2;
      c.lp_on = lp_on(hard_example_instance(mu, l2)).value;
      c.lp_on_le_one = c.lp_on <= 1.0 + 1e-8;
      rep.hard.push_back(c);
    }
  }

  rep.adj.resize(config.hard_mus.size());
  const std::size_t special_tasks = config.hard_mus.size() + 1 + config.two_type_count;
  rep.two_type.resize(config.two_type_count);
  parallel_for(special_tasks, [&](std::size_t task) {
    if (task < config.hard_mus.size()) {
      AdjCase c;
      c.mu = config.hard_mus[task];
      const AdjEstimate est = adj_match_rate(c.mu, config.adj_horizon, instance_seed(seed, task));
      c.x11 = {est.x11, est.x11_se};
      c.value = {est.value, est.value_se};
      c.x11_exact = adj_match_rate_exact(c.mu);
      c.value_exact = adj_value_exact(c.mu);
      c.x11_within = std::abs(c.x11.mean - c.x11_exact) <= 3.0 * c.x11.se;
      c.value_within = std::abs(c.value.mean - c.value_exact) <= 3.0 * c.value.se;
      c.ratio_bound = 1.0 / c.value_exact;
      rep.adj[task] = c;
      return;
    }
    task -= config.hard_mus.size();
    if (task == 0) {
      CounterexampleCase& c = rep.counterexample;
      c.eps = config.counterexample_eps;
      c.horizon = config.counterexample_horizon;
      const Instance inst = counterexample_instance(c.eps);
      const auto probe = gamma_inequality_probe(inst, counterexample_policy(c.eps),
                                                {TypeSet{0b011}}, c.horizon, seed);
      c.presence = probe.front().presence;
      c.gamma_bound = probe.front().gamma_bound;
      c.inequality_fails = c.presence.mean < c.gamma_bound.mean - 3.0 * probe.front().diff_se;
      return;
    }
    task -= 1;
    TwoTypeCase& c = rep.two_type[task];
    c.seed = instance_seed(seed ^ 0x2ULL, task);
    const Instance inst = symmetric_two_type_variant(random_instance(2, c.seed));
    c.lp_off_rel = lp_off_rel(inst).value;
    const SuitabilityResult found = suitability_finder(inst);
    c.lp_alg = found.solution.primal.objective;
    SimOptions opts;
    opts.horizon = config.two_type_horizon;
    opts.burn_in = 0.1 * config.two_type_horizon;
    opts.seed = c.seed;
    c.v_hat = simulate(inst, extract_prefix_policy(found.report), opts).value_rate();
    c.exact_link = 0.5 * c.lp_off_rel <= c.lp_alg + 1e-6 * std::max(1.0, c.lp_off_rel);
    c.stochastic_link = c.lp_alg <= c.v_hat.mean + 2.0 * c.v_hat.se;
  });
  return rep;
}

}  // namespace dmatch
