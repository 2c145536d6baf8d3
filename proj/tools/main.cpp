// dmatch: command-line front end for the matching-with-abandonment toolkit.
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmatch/bounds.hpp"
#include "dmatch/error.hpp"
#include "dmatch/experiments.hpp"
#include "dmatch/io.hpp"
#include "dmatch/lpalg.hpp"
#include "dmatch/omniscient.hpp"
#include "dmatch/simulate.hpp"

using nlohmann::json;
using namespace dmatch;

namespace {

enum Exit { kOk = 0, kViolation = 1, kInputError = 2, kNumericError = 3 };

struct Flags {
  std::string instance_path;
  std::string policy_path;
  std::string out_path;
  std::string matching_out;
  std::string trace_out;
  std::uint64_t seed = 0;
  double horizon = 2e4;
  double burn_in = 0.1;
  double off_horizon = 2000.0;
  std::size_t reps = 30;
  std::size_t types = 3;
  std::size_t count = 100;
  bool homogeneous = false;
  double tol_zero = 1e-9;
  double tol_feasibility = 1e-8;
  double tol_optimality = 1e-9;
};

AlgOptions alg_options(const Flags& f) {
  AlgOptions o;
  o.zero_tol = f.tol_zero;
  o.solver.feasibility_tol = f.tol_feasibility;
  o.solver.optimality_tol = f.tol_optimality;
  return o;
}

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

json estimate_json(const Estimate& e) { return {{"mean", e.mean}, {"se", e.se}}; }

json policy_object(const GreedyPolicy& p, const Instance& inst) {
  return json::parse(policy_to_json(p, inst));
}

// Output goes to --out when given, stdout otherwise.
void emit(const Flags& f, const std::string& text) {
  if (f.out_path.empty()) {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(f.out_path);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + f.out_path);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

json config_json(const Flags& f, const char* command) {
  json c{{"command", command}};
  if (!f.instance_path.empty()) c["instance"] = f.instance_path;
  c["seed"] = f.seed;
  c["horizon"] = f.horizon;
  c["burn_in_fraction"] = f.burn_in;
  c["off_horizon"] = f.off_horizon;
  c["reps"] = f.reps;
  c["tol_zero"] = f.tol_zero;
  c["tol_feasibility"] = f.tol_feasibility;
  c["tol_optimality"] = f.tol_optimality;
  return c;
}

json pair_list(const std::vector<std::pair<TypeIndex, TypeIndex>>& pairs, const Instance& inst) {
  json out = json::array();
  for (auto [i, j] : pairs) out.push_back({inst.type_ids()[i], inst.type_ids()[j]});
  return out;
}

int cmd_solve(const Flags& f) {
  const Instance inst = load_instance(f.instance_path);
  const AlgOptions opts = alg_options(f);
  const SuitabilityResult found = suitability_finder(inst, opts);
  const PolicyChoice choice = extract_policies(inst, found, opts);
  json v = json::object();
  for (TypeIndex i = 0; i < inst.num_types(); ++i) v[inst.type_ids()[i]] = found.solution.dual.v[i];
  json n = json::object();
  for (TypeIndex i = 0; i < inst.num_types(); ++i) n[inst.type_ids()[i]] = found.solution.primal.n[i];
  json report{
      {"config", config_json(f, "solve")},
      {"lp_alg", found.solution.primal.objective},
      {"matches", pair_list(found.matches.pairs(), inst)},
      {"removed", pair_list(found.removed, inst)},
      {"history", found.history},
      {"policy", policy_object(choice.prefix_policy, inst)},
      {"value_policy_agrees", choice.agree},
      {"perturbed_resolve", choice.perturbed},
      {"duals", {{"v", v}}},
      {"occupancy", n},
  };
  emit(f, report.dump(2));
  return kOk;
}

int cmd_bounds(const Flags& f) {
  const Instance inst = load_instance(f.instance_path);
  json report{{"config", config_json(f, "bounds")}};
  report["off_rel"] = lp_off_rel(inst).value;
  report["off"] = inst.num_types() <= kMaxOffTypes ? json(lp_off(inst).value) : json(nullptr);
  report["on"] = lp_on(inst).value;
  emit(f, report.dump(2));
  return kOk;
}

int cmd_simulate(const Flags& f) {
  const Instance inst = load_instance(f.instance_path);
  GreedyPolicy policy;
  if (f.policy_path.empty()) {
    policy = extract_prefix_policy(suitability_finder(inst, alg_options(f)).report);
  } else {
    policy = load_policy(f.policy_path, inst);
  }
  SimOptions opts;
  opts.horizon = f.horizon;
  opts.burn_in = f.burn_in * f.horizon;
  opts.seed = f.seed;
  const SimStats stats = simulate(inst, policy, opts);
  const auto& ids = inst.type_ids();
  json x = json::object(), occ = json::object(), balance = json::object();
  for (TypeIndex i = 0; i < inst.num_types(); ++i) {
    occ[ids[i]] = estimate_json(stats.n(i));
    balance[ids[i]] = estimate_json(balance_residual(inst, stats, i));
    for (TypeIndex j = 0; j < inst.num_types(); ++j) {
      const Estimate e = stats.x(i, j);
      if (e.mean > 0.0) x[ids[i] + "," + ids[j]] = estimate_json(e);
    }
  }
  json report{{"config", config_json(f, "simulate")},
              {"policy", policy_object(policy, inst)},
              {"value", estimate_json(stats.value_rate())},
              {"match_rates", x},
              {"occupancy", occ},
              {"balance_residual", balance},
              {"arrivals", stats.total_arrivals},
              {"matches", stats.total_matches},
              {"abandonments", stats.total_abandonments}};
  emit(f, report.dump(2));
  if (!f.trace_out.empty()) {
    std::ofstream out(f.trace_out);
    write_trace_csv(out, sample_trace(inst, f.horizon, f.seed));
  }
  return kOk;
}

int cmd_offline(const Flags& f) {
  const Instance inst = load_instance(f.instance_path);
  const OffEstimate est = estimate_off(inst, f.horizon, f.reps, f.seed);
  json report{{"config", config_json(f, "offline")},
              {"mean", est.mean},
              {"se", est.se},
              {"replications", est.replications}};
  emit(f, report.dump(2));
  if (!f.matching_out.empty()) {
    const Trace trace = sample_trace(inst, f.horizon, replication_seed(f.seed, 0));
    const OverlapGraph g = build_overlap_graph(trace, inst);
    std::ofstream out(f.matching_out);
    write_matching_csv(out, g, max_weight_matching(g));
  }
  return kOk;
}

int cmd_verify(const Flags& f) {
  const Instance inst = load_instance(f.instance_path);
  ComparisonConfig cfg;
  cfg.horizon = f.horizon;
  cfg.burn_in_fraction = f.burn_in;
  cfg.off_horizon = f.off_horizon;
  cfg.off_replications = f.reps;
  const ExperimentRow row = evaluate_instance(inst, 0, f.seed, cfg);
  if (!row.error.empty()) throw Error(ErrorCode::kSolverFailure, row.error);

  const bool homogeneous = row.homogeneous;
  json links = json::array();
  bool all = true;
  auto link = [&](const std::string& name, double lhs, double rhs, double band,
                  bool conjectural) {
    const bool holds = lhs <= rhs + band;
    all = all && holds;
    links.push_back({{"link", name}, {"lhs", lhs}, {"rhs", rhs}, {"band", band},
                     {"holds", holds}, {"conjectural", conjectural}});
  };
  link("off_rel/2 <= lp_alg", 0.5 * row.lp_off_rel, row.lp_alg,
       0.5e-6 * std::max(1.0, row.lp_off_rel), false);
  link("lp_alg <= v_hat", row.lp_alg, row.v_hat, 2.0 * row.v_se, !homogeneous);
  link("v_hat <= off_hat", row.v_hat, row.off_hat,
       3.0 * std::hypot(row.v_se, row.off_se), false);
  if (!std::isnan(row.lp_off)) {
    link("off_hat <= lp_off", row.off_hat, row.lp_off, 3.0 * row.off_se, false);
    link("lp_off <= off_rel", row.lp_off, row.lp_off_rel, 1e-7, false);
  } else {
    link("off_hat <= off_rel", row.off_hat, row.lp_off_rel, 3.0 * row.off_se, false);
  }
  json report{{"config", config_json(f, "verify")},
              {"homogeneous", homogeneous},
              {"values",
               {{"lp_alg", row.lp_alg},
                {"v_hat", estimate_json({row.v_hat, row.v_se})},
                {"off_hat", estimate_json({row.off_hat, row.off_se})},
                {"lp_off", number_or_null(row.lp_off)},
                {"lp_off_rel", row.lp_off_rel}}},
              {"links", links},
              {"all_hold", all}};
  emit(f, report.dump(2));
  if (!all) {
    for (const auto& l : links)
      if (!l["holds"].get<bool>()) std::cerr << "violated: " << l["link"].get<std::string>() << '\n';
  }
  return all ? kOk : kViolation;
}

int cmd_experiment(const Flags& f) {
  ComparisonConfig cfg;
  cfg.num_types = f.types;
  cfg.count = f.count;
  cfg.horizon = f.horizon;
  cfg.burn_in_fraction = f.burn_in;
  cfg.off_horizon = f.off_horizon;
  cfg.off_replications = f.reps;
  cfg.seed = f.seed;
  cfg.homogeneous = f.homogeneous;
  const auto rows = run_comparison(cfg);
  std::ostringstream os;
  write_comparison_csv(os, cfg, rows);
  emit(f, os.str());
  return kOk;
}

int cmd_special(const Flags& f) {
  SpecialCaseConfig cfg;
  const SpecialCaseReport rep = special_cases(f.seed, cfg);
  json hard = json::array(), adj = json::array(), two = json::array();
  for (const auto& h : rep.hard)
    hard.push_back({{"mu", h.mu}, {"lambda2", h.lambda2}, {"lp_on", h.lp_on},
                    {"lp_on_le_one", h.lp_on_le_one}});
  for (const auto& a : rep.adj)
    adj.push_back({{"mu", a.mu}, {"x11", estimate_json(a.x11)}, {"x11_exact", a.x11_exact},
                   {"value", estimate_json(a.value)}, {"value_exact", a.value_exact},
                   {"ratio_bound", a.ratio_bound}});
  for (const auto& t : rep.two_type)
    two.push_back({{"seed", t.seed}, {"lp_off_rel", t.lp_off_rel}, {"lp_alg", t.lp_alg},
                   {"v_hat", estimate_json(t.v_hat)}, {"exact_link", t.exact_link},
                   {"stochastic_link", t.stochastic_link}});
  const auto& c = rep.counterexample;
  json report{{"config", config_json(f, "special")},
              {"hard_example", hard},
              {"adj", adj},
              {"counterexample",
               {{"eps", c.eps}, {"horizon", c.horizon}, {"presence", estimate_json(c.presence)},
                {"gamma_bound", estimate_json(c.gamma_bound)},
                {"inequality_fails", c.inequality_fails}}},
              {"two_type", two}};
  emit(f, report.dump(2));
  return kOk;
}

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::kSolverFailure:
    case ErrorCode::kIterationOverflow:
    case ErrorCode::kNotSuitable:
      return kNumericError;
    default:
      return kInputError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic matching with abandonment: LP policies, simulation and bounds"};
  app.require_subcommand(1);
  Flags f;

  auto add_instance = [&](CLI::App* sub) {
    sub->add_option("-i,--instance", f.instance_path, "Instance JSON file")
        ->required()
        ->check(CLI::ExistingFile);
  };
  auto add_seed = [&](CLI::App* sub) {
    sub->add_option("--seed", f.seed, "Random seed")->required();
  };
  auto add_tolerances = [&](CLI::App* sub) {
    sub->add_option("--tol-zero", f.tol_zero, "Zero test for x and psi (scaled by max(1, lambda_j))");
    sub->add_option("--tol-feasibility", f.tol_feasibility, "Simplex primal feasibility tolerance");
    sub->add_option("--tol-optimality", f.tol_optimality, "Simplex reduced-cost tolerance");
  };
  auto add_out = [&](CLI::App* sub) {
    sub->add_option("-o,--out", f.out_path, "Write output here instead of stdout");
  };
  auto positive = CLI::PositiveNumber;

  auto* solve = app.add_subcommand("solve", "Run the suitability finder and print the policy");
  add_instance(solve);
  add_tolerances(solve);
  add_out(solve);

  auto* bounds = app.add_subcommand("bounds", "Solve the offline and online upper-bound LPs");
  add_instance(bounds);
  add_out(bounds);

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate a greedy policy");
  add_instance(simulate_cmd);
  add_seed(simulate_cmd);
  add_tolerances(simulate_cmd);
  add_out(simulate_cmd);
  simulate_cmd->add_option("--policy", f.policy_path, "Policy JSON (default: the LP policy)")
      ->check(CLI::ExistingFile);
  simulate_cmd->add_option("--horizon", f.horizon, "Simulation horizon")->check(positive);
  simulate_cmd->add_option("--burn-in", f.burn_in, "Burn-in fraction of the horizon")
      ->check(CLI::Range(0.0, 0.95));
  simulate_cmd->add_option("--trace-out", f.trace_out, "Also write the sampled arrival trace CSV");

  auto* offline = app.add_subcommand("offline", "Estimate the omniscient benchmark");
  add_instance(offline);
  add_seed(offline);
  add_out(offline);
  offline->add_option("--horizon", f.horizon, "Trace horizon per replication")->check(positive);
  offline->add_option("--reps", f.reps, "Replications")->check(positive);
  offline->add_option("--matching-out", f.matching_out, "Write replication 0's matching CSV");

  auto* verify = app.add_subcommand("verify", "Check the full inequality chain");
  add_instance(verify);
  add_seed(verify);
  add_out(verify);
  verify->add_option("--horizon", f.horizon, "Simulation horizon")->check(positive);
  verify->add_option("--burn-in", f.burn_in, "Burn-in fraction")->check(CLI::Range(0.0, 0.95));
  verify->add_option("--off-horizon", f.off_horizon, "Omniscient trace horizon")->check(positive);
  verify->add_option("--reps", f.reps, "Omniscient replications")->check(positive);

  auto* experiment = app.add_subcommand("experiment", "Random-instance comparison (CSV)");
  add_seed(experiment);
  add_out(experiment);
  experiment->add_option("--types", f.types, "Number of types")->check(CLI::Range(1, 16));
  experiment->add_option("--count", f.count, "Number of instances")->check(positive);
  experiment->add_option("--horizon", f.horizon, "Simulation horizon")->check(positive);
  experiment->add_option("--burn-in", f.burn_in, "Burn-in fraction")->check(CLI::Range(0.0, 0.95));
  experiment->add_option("--off-horizon", f.off_horizon, "Omniscient trace horizon")->check(positive);
  experiment->add_option("--reps", f.reps, "Omniscient replications")->check(positive);
  experiment->add_flag("--homogeneous", f.homogeneous, "Give every type the first sampled mu");

  auto* special = app.add_subcommand("special", "Hard example, counterexample and two-type studies");
  add_seed(special);
  add_out(special);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*solve) return cmd_solve(f);
    if (*bounds) return cmd_bounds(f);
    if (*simulate_cmd) return cmd_simulate(f);
    if (*offline) return cmd_offline(f);
    if (*verify) return cmd_verify(f);
    if (*experiment) return cmd_experiment(f);
    if (*special) return cmd_special(f);
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumericError;
  }
  return kInputError;
}
