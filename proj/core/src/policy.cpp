#include "dmatch/policy.hpp"

#include <cmath>

#include "dmatch/error.hpp"
#include "dmatch/simulate.hpp"

namespace dmatch {

GreedyPolicy::GreedyPolicy(std::vector<std::vector<TypeIndex>> preferences)
    : preferences_(std::move(preferences)) {
  const std::size_t n = preferences_.size();
  for (const auto& list : preferences_) {
    TypeSet seen = 0;
    for (TypeIndex i : list) {
      if (i >= n) throw Error(ErrorCode::kInvalidArgument, "preference names an unknown type");
      if (contains(seen, i)) {
        throw Error(ErrorCode::kInvalidArgument, "preference list repeats a type");
      }
      seen |= singleton(i);
    }
  }
}

std::vector<TypeSet> GreedyPolicy::prefixes(TypeIndex j) const {
  std::vector<TypeSet> out;
  TypeSet acc = 0;
  for (TypeIndex i : preferences_[j]) {
    acc |= singleton(i);
    out.push_back(acc);
  }
  return out;
}

std::optional<TypeIndex> GreedyPolicy::decide(TypeIndex arriving,
                                              std::span<const std::size_t> counts) const {
  return greedy_decide(*this, arriving, counts);
}

std::optional<TypeIndex> greedy_decide(const GreedyPolicy& p, TypeIndex j,
                                       std::span<const std::size_t> counts) {
  for (TypeIndex i : p.preferences(j)) {
    if (counts[i] > 0) return i;
  }
  return std::nullopt;
}

Instance counterexample_instance(double eps, double mu3) {
  return make_instance({eps, 1.0, 1.0 / eps}, {eps, 1.0, mu3},
                       {{0.0, 0.0, 0.0}, {0.0, 0.0, 1.0}, {0.0, 1.0, 0.0}});
}

std::optional<TypeIndex> CounterexamplePolicy::decide(TypeIndex arriving,
                                                      std::span<const std::size_t> counts) const {
  if (counts[0] > 0) return std::nullopt;
  if (arriving == 1 && counts[2] > 0) return TypeIndex{2};
  if (arriving == 2 && counts[1] > 0) return TypeIndex{1};
  return std::nullopt;
}

CounterexamplePolicy counterexample_policy(double eps) {
  if (!(eps > 0.0 && eps <= 0.05)) {
    throw Error(ErrorCode::kInvalidArgument, "counterexample requires 0 < eps <= 0.05");
  }
  return CounterexamplePolicy{};
}

Instance hard_example_instance(double mu, double lambda2) {
  return make_instance({1.0, lambda2}, {mu, mu}, {{2.0 + mu, 1.0}, {1.0, 0.0}});
}

std::vector<std::pair<std::size_t, std::size_t>> adj_matching(std::span<const double> arrivals,
                                                              std::span<const double> departures) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const std::size_t count = arrivals.size();
  for (std::size_t k = 0; k + 2 < count; ++k) {
    if (departures[k] > arrivals[k + 1] && departures[k + 1] < arrivals[k + 2]) {
      out.emplace_back(k, k + 1);
    }
  }
  return out;
}

AdjEstimate adj_match_rate(double mu, double horizon, std::uint64_t seed) {
  if (!(horizon > 0.0) || !(mu > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ADJ simulation needs positive mu and horizon");
  }
  const Instance one_type = make_instance({1.0}, {mu}, {{2.0 + mu}});
  const Trace trace = sample_trace(one_type, horizon, seed);
  std::vector<double> t, d;
  t.reserve(trace.events.size());
  d.reserve(trace.events.size());
  for (const auto& e : trace.events) {
    t.push_back(e.arrival);
    d.push_back(e.departure);
  }
  const auto pairs = adj_matching(t, d);

  constexpr std::size_t kBatches = 20;
  const double batch_len = horizon / kBatches;
  std::vector<double> per_batch(kBatches, 0.0);
  for (auto [k, k1] : pairs) {
    (void)k1;
    const auto b = std::min(kBatches - 1, static_cast<std::size_t>(t[k] / batch_len));
    per_batch[b] += 1.0 / batch_len;
  }
  double mean = 0.0;
  for (double v : per_batch) mean += v;
  mean /= kBatches;
  double var = 0.0;
  for (double v : per_batch) var += (v - mean) * (v - mean);
  var /= (kBatches - 1);

  AdjEstimate est;
  est.x11 = mean;
  est.x11_se = std::sqrt(var / kBatches);
  est.value = (2.0 + mu) * est.x11 + (1.0 - 2.0 * est.x11);
  est.value_se = mu * est.x11_se;
  est.arrivals = t.size();
  est.matches = pairs.size();
  return est;
}

double adj_match_rate_exact(double mu) { return mu / ((1.0 + mu) * (1.0 + mu)); }

double adj_value_exact(double mu) { return 2.0 - (2.0 * mu + 1.0) / ((1.0 + mu) * (1.0 + mu)); }

}  // namespace dmatch
