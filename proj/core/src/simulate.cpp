#include "dmatch/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>

#include "dmatch/error.hpp"
#include "dmatch/rng.hpp"

namespace dmatch {

Estimate mean_and_se(const std::vector<double>& values) {
  Estimate e;
  const std::size_t k = values.size();
  if (k == 0) return e;
  for (double v : values) e.mean += v;
  e.mean /= static_cast<double>(k);
  if (k < 2) return e;
  double var = 0.0;
  for (double v : values) var += (v - e.mean) * (v - e.mean);
  var /= static_cast<double>(k - 1);
  e.se = std::sqrt(var / static_cast<double>(k));
  return e;
}

namespace {


// Per-type arrival clocks and sojourn draws shared by the simulator and the
// trace sampler.
class ArrivalSource {
 public:
  ArrivalSource(const Instance& inst, std::uint64_t seed) : inst_(inst) {
    const std::size_t n = inst.num_types();
    for (std::size_t i = 0; i < n; ++i) {
      arrival_rng_.emplace_back(seed, streams::arrival(i));
      sojourn_rng_.emplace_back(seed, streams::sojourn(i));
    }
    next_.resize(n);
    for (std::size_t i = 0; i < n; ++i) next_[i] = arrival_rng_[i].exponential(inst.lambda(i));
  }

  // Earliest pending arrival.
  std::pair<double, TypeIndex> peek() const {
    TypeIndex best = 0;
    for (TypeIndex i = 1; i < next_.size(); ++i)
      if (next_[i] < next_[best]) best = i;
    return {next_[best], best};
  }

  void advance(TypeIndex i) { next_[i] += arrival_rng_[i].exponential(inst_.lambda(i)); }

  double sojourn(TypeIndex i) { return sojourn_rng_[i].exponential(inst_.mu(i)); }

 private:
  const Instance& inst_;
  std::vector<CounterRng> arrival_rng_;
  std::vector<CounterRng> sojourn_rng_;
  std::vector<double> next_;
};

}  // namespace

Trace sample_trace(const Instance& instance, double horizon, std::uint64_t seed) {
  Trace trace;
  trace.horizon = horizon;
  if (!(horizon > 0.0)) return trace;
  ArrivalSource source(instance, seed);
  for (;;) {
    auto [t, i] = source.peek();
    if (t >= horizon) break;
    TraceEvent e;
    e.agent_id = trace.events.size();
    e.type = i;
    e.arrival = t;
    e.departure = t + source.sojourn(i);
    trace.events.push_back(e);
    source.advance(i);
  }
  return trace;
}

void write_trace_csv(std::ostream& os, const Trace& trace) {
  os << "agent_id,type,arrival,departure\n";
  char buf[128];
  for (const auto& e : trace.events) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%.12g,%.12g\n", e.agent_id, e.type, e.arrival,
                  e.departure);
    os << buf;
  }
}

Estimate SimStats::batch_estimate(const std::function<double(std::size_t)>& f) const {
  std::vector<double> values(batches);
  for (std::size_t b = 0; b < batches; ++b) values[b] = f(b);
  return mean_and_se(values);
}

Estimate SimStats::x(TypeIndex i, TypeIndex j) const {
  return mean_and_se(match_rate[i * num_types + j]);
}

Estimate SimStats::n(TypeIndex i) const { return mean_and_se(occupancy[i]); }

Estimate SimStats::p(std::size_t subset_index) const { return mean_and_se(presence[subset_index]); }

Estimate SimStats::value_rate() const { return mean_and_se(reward_rate); }

Estimate SimStats::x_set(TypeSet s, TypeIndex j) const {
  const auto types = members(s);
  return batch_estimate([&](std::size_t b) {
    double total = 0.0;
    for (TypeIndex i : types) total += match_rate[i * num_types + j][b];
    return total;
  });
}

std::size_t SimStats::subset_index(TypeSet s) const {
  auto it = std::find(subsets.begin(), subsets.end(), s);
  if (it == subsets.end()) {
    throw Error(ErrorCode::kInvalidArgument, "subset was not queried in this simulation");
  }
  return static_cast<std::size_t>(it - subsets.begin());
}

SimStats simulate(const Instance& instance, const MarkovPolicy& policy, const SimOptions& opt) {
  if (!(opt.horizon > 0.0) || !(opt.burn_in >= 0.0) || opt.burn_in >= opt.horizon ||
      opt.batches < 2) {
    throw Error(ErrorCode::kDegenerateHorizon, "need 0 <= burn_in < horizon and >= 2 batches");
  }
  const std::size_t n = instance.num_types();
  const std::size_t nb = opt.batches;
  const double batch_len = (opt.horizon - opt.burn_in) / static_cast<double>(nb);

  SimStats stats;
  stats.num_types = n;
  stats.horizon = opt.horizon;
  stats.burn_in = opt.burn_in;
  stats.seed = opt.seed;
  stats.batches = nb;
  stats.subsets = opt.subsets;
  stats.match_rate.assign(n * n, std::vector<double>(nb, 0.0));
  stats.occupancy.assign(n, std::vector<double>(nb, 0.0));
  stats.presence.assign(opt.subsets.size(), std::vector<double>(nb, 0.0));
  stats.arrival_rate.assign(n, std::vector<double>(nb, 0.0));
  stats.reward_rate.assign(nb, 0.0);

  // Agent slots are recycled; a (slot, generation) pair names one agent.
  struct Slot {
    double departure = 0.0;
    TypeIndex type = 0;
    std::uint32_t generation = 0;
    bool alive = false;
  };
  struct Ref {
    std::uint32_t slot;
    std::uint32_t generation;
  };
  struct Departure {
    double time;
    Ref ref;
    bool operator>(const Departure& o) const { return time > o.time; }
  };
  std::vector<Slot> slots;
  std::vector<std::uint32_t> free_slots;
  std::vector<std::deque<Ref>> waiting(n);
  std::priority_queue<Departure, std::vector<Departure>, std::greater<>> departures;
  std::vector<std::size_t> counts(n, 0);
  TypeSet present = 0;

  auto valid = [&](const Ref& r) {
    return slots[r.slot].alive && slots[r.slot].generation == r.generation;
  };
  auto release = [&](const Ref& r) {
    Slot& s = slots[r.slot];
    s.alive = false;
    ++s.generation;
    free_slots.push_back(r.slot);
    if (--counts[s.type] == 0) present &= ~singleton(s.type);
  };
  auto trim = [&](TypeIndex i) {
    auto& q = waiting[i];
    while (!q.empty() && !valid(q.front())) q.pop_front();
  };

  auto batch_of = [&](double t) -> std::size_t {
    return std::min(nb - 1, static_cast<std::size_t>((t - opt.burn_in) / batch_len));
  };

  // Time-weighted accumulation of the current state over [a, b).
  auto accumulate = [&](double a, double b) {
    a = std::max(a, opt.burn_in);
    b = std::min(b, opt.horizon);
    while (a < b) {
      const std::size_t bi = batch_of(a);
      const double end =
          (bi + 1 == nb) ? b : std::min(b, opt.burn_in + batch_len * double(bi + 1));
      const double len = end - a;
      if (len <= 0.0) break;
      for (std::size_t i = 0; i < n; ++i)
        if (counts[i] != 0) stats.occupancy[i][bi] += len * double(counts[i]);
      for (std::size_t s = 0; s < opt.subsets.size(); ++s)
        if ((present & opt.subsets[s]) != 0) stats.presence[s][bi] += len;
      a = end;
    }
  };

  ArrivalSource source(instance, opt.seed);
  double now = 0.0;
  for (;;) {
    while (!departures.empty() && !valid(departures.top().ref)) departures.pop();
    const auto [t_arr, arr_type] = source.peek();
    const double t_dep =
        departures.empty() ? std::numeric_limits<double>::infinity() : departures.top().time;
    const double t_next = std::min(t_arr, t_dep);
    if (t_next >= opt.horizon) {
      accumulate(now, opt.horizon);
      break;
    }
    accumulate(now, t_next);
    now = t_next;
    const bool counted = now >= opt.burn_in;

    if (t_dep <= t_arr) {
      const Ref r = departures.top().ref;
      departures.pop();
      const TypeIndex i = slots[r.slot].type;
      release(r);
      trim(i);
      ++stats.total_abandonments;
      continue;
    }

    const TypeIndex j = arr_type;
    source.advance(j);
    const double sojourn = source.sojourn(j);
    ++stats.total_arrivals;
    if (counted) stats.arrival_rate[j][batch_of(now)] += 1.0;

    if (auto partner = policy.decide(j, counts)) {
      const TypeIndex i = *partner;
      if (i >= n || counts[i] == 0) {
        throw Error(ErrorCode::kInvalidArgument, "policy chose a type with no waiting agent");
      }
      trim(i);
      const Ref r = waiting[i].front();
      waiting[i].pop_front();
      release(r);
      trim(i);
      ++stats.total_matches;
      if (counted) {
        const std::size_t bi = batch_of(now);
        stats.match_rate[i * n + j][bi] += 1.0;
        stats.reward_rate[bi] += instance.reward(i, j);
      }
      continue;
    }

    std::uint32_t slot;
    if (!free_slots.empty()) {
      slot = free_slots.back();
      free_slots.pop_back();
    } else {
      slot = static_cast<std::uint32_t>(slots.size());
      slots.emplace_back();
    }
    Slot& s = slots[slot];
    s.alive = true;
    s.type = j;
    s.departure = now + sojourn;
    const Ref r{slot, s.generation};
    waiting[j].push_back(r);
    departures.push({s.departure, r});
    if (counts[j]++ == 0) present |= singleton(j);
  }

  for (std::size_t i = 0; i < n; ++i) stats.final_occupancy += counts[i];

  const double inv = 1.0 / batch_len;
  for (auto& series : stats.match_rate)
    for (double& v : series) v *= inv;
  for (auto& series : stats.occupancy)
    for (double& v : series) v *= inv;
  for (auto& series : stats.presence)
    for (double& v : series) v *= inv;
  for (auto& series : stats.arrival_rate)
    for (double& v : series) v *= inv;
  for (double& v : stats.reward_rate) v *= inv;
  return stats;
}

Estimate balance_residual(const Instance& instance, const SimStats& stats, TypeIndex i) {
  const std::size_t n = stats.num_types;
  Estimate e = stats.batch_estimate([&](std::size_t b) {
    double total = stats.occupancy[i][b] * instance.mu(i);
    for (std::size_t j = 0; j < n; ++j) {
      total += stats.match_rate[i * n + j][b];
      total += stats.match_rate[j * n + i][b];
    }
    // x_ii is counted once per side, matching the two agents it removes.
    return total - instance.lambda(i);
  });
  // Matches cancel, leaving the arrival and abandonment martingales.
  const double window = stats.horizon - stats.burn_in;
  e.se = std::sqrt((instance.lambda(i) + instance.mu(i) * std::max(stats.n(i).mean, 0.0)) / window);
  return e;
}

Estimate prefix_residual(const Instance& instance, const SimStats& stats, TypeSet s, TypeIndex j) {
  const std::size_t si = stats.subset_index(s);
  Estimate e = stats.batch_estimate([&](std::size_t b) {
    double total = 0.0;
    for (TypeIndex i : members(s)) total += stats.match_rate[i * stats.num_types + j][b];
    return total - instance.lambda(j) * stats.presence[si][b];
  });
  const double window = stats.horizon - stats.burn_in;
  e.se = std::sqrt(instance.lambda(j) * std::max(stats.p(si).mean, 0.0) / window);
  return e;
}

std::vector<GammaProbeEntry> gamma_inequality_report(const Instance& instance,
                                                     const SimStats& stats,
                                                     const std::vector<TypeSet>& subsets) {
  std::vector<GammaProbeEntry> out;
  for (TypeSet s : subsets) {
    const std::size_t si = stats.subset_index(s);
    const double g = gamma(instance, s);
    const auto types = members(s);
    GammaProbeEntry e;
    e.subset = s;
    e.presence = stats.p(si);
    e.gamma_bound = stats.batch_estimate([&](std::size_t b) {
      double total = 0.0;
      for (TypeIndex i : types) total += stats.occupancy[i][b];
      return g * total;
    });
    const Estimate diff = stats.batch_estimate([&](std::size_t b) {
      double total = 0.0;
      for (TypeIndex i : types) total += stats.occupancy[i][b];
      return stats.presence[si][b] - g * total;
    });
    e.diff_se = diff.se;
    e.margin_se = diff.se > 0.0 ? diff.mean / diff.se : (diff.mean >= 0.0 ? 1e300 : -1e300);
    e.holds = diff.mean >= -3.0 * diff.se;
    out.push_back(e);
  }
  return out;
}

std::vector<GammaProbeEntry> gamma_inequality_probe(const Instance& instance,
                                                    const MarkovPolicy& policy,
                                                    const std::vector<TypeSet>& subsets,
                                                    double horizon, std::uint64_t seed,
                                                    double burn_in_fraction) {
  SimOptions opt;
  opt.horizon = horizon;
  opt.burn_in = burn_in_fraction * horizon;
  opt.seed = seed;
  opt.subsets = subsets;
  const SimStats stats = simulate(instance, policy, opt);
  return gamma_inequality_report(instance, stats, subsets);
}

}  // namespace dmatch
