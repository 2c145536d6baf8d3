#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dmatch/instance.hpp"

namespace dmatch {

// A non-anticipating decision rule: on each arrival, pick the type of the
// waiting agent to match with, or nothing. Must depend only on the arriving
// type and the current per-type counts.
class MarkovPolicy {
 public:
  virtual ~MarkovPolicy() = default;

  // Returned partner must have counts[partner] > 0.
  virtual std::optional<TypeIndex> decide(TypeIndex arriving,
                                          std::span<const std::size_t> counts) const = 0;
};

// Per-type ordered preference lists over acceptable waiting types. Types
// not listed are unacceptable.
class GreedyPolicy final : public MarkovPolicy {
 public:
  GreedyPolicy() = default;
  explicit GreedyPolicy(std::size_t num_types) : preferences_(num_types) {}
  // Throws kInvalidArgument on duplicates or out-of-range entries.
  explicit GreedyPolicy(std::vector<std::vector<TypeIndex>> preferences);

  static GreedyPolicy no_match(std::size_t num_types) { return GreedyPolicy(num_types); }

  std::size_t num_types() const noexcept { return preferences_.size(); }
  const std::vector<TypeIndex>& preferences(TypeIndex j) const { return preferences_[j]; }
  const std::vector<std::vector<TypeIndex>>& all_preferences() const noexcept {
    return preferences_;
  }

  // Prefix sets of the order for arriving type j: top-1, top-2, ...
  std::vector<TypeSet> prefixes(TypeIndex j) const;

  std::optional<TypeIndex> decide(TypeIndex arriving,
                                  std::span<const std::size_t> counts) const override;

  friend bool operator==(const GreedyPolicy& a, const GreedyPolicy& b) {
    return a.preferences_ == b.preferences_;
  }

 private:
  std::vector<std::vector<TypeIndex>> preferences_;
};

// First type in p.preferences(j) with a positive count.
std::optional<TypeIndex> greedy_decide(const GreedyPolicy& p, TypeIndex j,
                                       std::span<const std::size_t> counts);

// The three-type instance with lambda = (eps, 1, 1/eps), mu = (eps, 1, mu3).
// Rewards only matter for reporting: r23 = r32 = 1, all else 0.
Instance counterexample_instance(double eps, double mu3 = 1.0);

// Never match type 1; match 2 with 3 only while no type 1 is waiting.
class CounterexamplePolicy final : public MarkovPolicy {
 public:
  std::optional<TypeIndex> decide(TypeIndex arriving,
                                  std::span<const std::size_t> counts) const override;
};

// Throws kInvalidArgument unless 0 < eps <= 0.05.
CounterexamplePolicy counterexample_policy(double eps);

// The two-type instance with lambda1 = 1, mu1 = mu2 = mu, r11 = 2 + mu,
// r12 = r21 = 1, r22 = 0.
Instance hard_example_instance(double mu, double lambda2);

// Agent k (k-th type-1 arrival) is matched to k + 1 iff d_k > t_{k+1} and
// d_{k+1} < t_{k+2}. Input is the sorted arrival/departure times of one
// type. Returns the matched index pairs (k, k + 1).
std::vector<std::pair<std::size_t, std::size_t>> adj_matching(
    std::span<const double> arrivals, std::span<const double> departures);

struct AdjEstimate {
  double x11 = 0.0;
  double x11_se = 0.0;
  // (2 + mu) x11 + (1 - 2 x11), the lambda2 -> infinity value.
  double value = 0.0;
  double value_se = 0.0;
  std::size_t arrivals = 0;
  std::size_t matches = 0;
};

// Simulates the type-1 stream (lambda1 = 1) of the hard example and
// applies the ADJ rule. SE from 20 equal-time batch means.
AdjEstimate adj_match_rate(double mu, double horizon, std::uint64_t seed);

double adj_match_rate_exact(double mu);
double adj_value_exact(double mu);

}  // namespace dmatch
