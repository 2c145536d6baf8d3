#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace dmatch {

using TypeIndex = std::size_t;

// A set of types packed into one machine word; bit i set iff type i is a
// member. Callers are expected to keep |T| <= 32.
using TypeSet = std::uint32_t;

inline constexpr std::size_t kMaxTypes = 32;

inline constexpr TypeSet singleton(TypeIndex i) { return TypeSet{1} << i; }
inline constexpr bool contains(TypeSet s, TypeIndex i) { return ((s >> i) & 1U) != 0; }
inline constexpr TypeSet full_set(std::size_t n) {
  return n >= 32 ? ~TypeSet{0} : (TypeSet{1} << n) - 1;
}
int set_size(TypeSet s);
std::vector<TypeIndex> members(TypeSet s);

// Square matrix in row-major order. r(i, j) is the reward of a match whose
// earlier arriver has type i and later arriver has type j.
class RewardMatrix {
 public:
  RewardMatrix() = default;
  explicit RewardMatrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}
  explicit RewardMatrix(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return n_; }
  double operator()(TypeIndex i, TypeIndex j) const { return data_[i * n_ + j]; }
  double& operator()(TypeIndex i, TypeIndex j) { return data_[i * n_ + j]; }

  std::vector<std::vector<double>> rows() const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

// Unvalidated description, e.g. straight from a JSON file. Ragged reward
// rows are representable here so that validation can report them.
struct RawInstance {
  std::vector<std::string> type_ids;
  std::vector<double> lambda;
  std::vector<double> mu;
  std::vector<std::vector<double>> r;
};

// A validated matching-with-abandonment instance. Immutable after
// construction; build one through validate().
class Instance {
 public:
  std::size_t num_types() const noexcept { return lambda_.size(); }
  const std::vector<std::string>& type_ids() const noexcept { return type_ids_; }
  const std::vector<double>& lambda() const noexcept { return lambda_; }
  const std::vector<double>& mu() const noexcept { return mu_; }
  const RewardMatrix& r() const noexcept { return r_; }

  double lambda(TypeIndex i) const { return lambda_[i]; }
  double mu(TypeIndex i) const { return mu_[i]; }
  double reward(TypeIndex earlier, TypeIndex later) const { return r_(earlier, later); }

  // Offered load lambda_i / mu_i summed over the members of s.
  double load(TypeSet s) const;
  double total_arrival_rate() const;
  bool has_positive_reward() const;

  RawInstance raw() const;

 private:
  friend Instance validate(const RawInstance& raw);
  Instance() = default;

  std::vector<std::string> type_ids_;
  std::vector<double> lambda_;
  std::vector<double> mu_;
  RewardMatrix r_;
};

// Checks every invariant and throws ValidationError listing all violations.
// Missing type ids are filled with "1", "2", ...
Instance validate(const RawInstance& raw);

// Convenience for code and tests that build instances programmatically.
Instance make_instance(std::vector<double> lambda, std::vector<double> mu,
                       std::vector<std::vector<double>> r);

// (1 - exp(-x)) / x, evaluated stably near zero.
double gamma_of_load(double load);

// gamma_S for the given instance. Throws kEmptySet on s == 0.
double gamma(const Instance& instance, TypeSet s);

struct Bipartition {
  TypeSet side1 = 0;
  TypeSet side2 = 0;
};

// Two-colours the graph whose edges are pairs with a positive reward in
// either direction. A positive self-reward makes the instance non-bipartite.
// Isolated types are placed on side 1.
std::optional<Bipartition> is_bipartite(const Instance& instance);

enum class DepartureClass { kGlobalHomogeneous, kBipartiteHomogeneous, kHeterogeneous };

const char* to_string(DepartureClass c);

DepartureClass has_homogeneous_departures(const Instance& instance,
                                          double relative_tolerance = 1e-12);

// Ordered pairs (earlier, later). Self pairs are allowed.
class MatchSet {
 public:
  MatchSet() = default;
  explicit MatchSet(std::size_t num_types);
  MatchSet(std::size_t num_types, const std::vector<std::pair<TypeIndex, TypeIndex>>& pairs);

  static MatchSet all(std::size_t num_types);

  std::size_t num_types() const noexcept { return sources_.size(); }
  bool contains(TypeIndex i, TypeIndex j) const { return dmatch::contains(sources_[j], i); }
  void insert(TypeIndex i, TypeIndex j) { sources_[j] |= singleton(i); }
  void erase(TypeIndex i, TypeIndex j) { sources_[j] &= ~singleton(i); }
  std::size_t size() const;
  bool empty() const { return size() == 0; }

  // T(M, j): the waiting types an arriving j may be matched with.
  TypeSet sources(TypeIndex j) const { return sources_[j]; }

  // Pairs in lexicographic (i, j) order.
  std::vector<std::pair<TypeIndex, TypeIndex>> pairs() const;

  friend bool operator==(const MatchSet&, const MatchSet&) = default;

 private:
  std::vector<TypeSet> sources_;  // indexed by the later arriver j
};

// The set {i : (i, j) in M} as an explicit list.
std::vector<TypeIndex> acceptable_sources(const MatchSet& m, TypeIndex j);

}  // namespace dmatch
