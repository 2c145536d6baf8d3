#include "dmatch/instance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "dmatch/error.hpp"

namespace dmatch {

int set_size(TypeSet s) { return std::popcount(s); }

std::vector<TypeIndex> members(TypeSet s) {
  std::vector<TypeIndex> out;
  while (s != 0) {
    out.push_back(static_cast<TypeIndex>(std::countr_zero(s)));
    s &= s - 1;
  }
  return out;
}

RewardMatrix::RewardMatrix(const std::vector<std::vector<double>>& rows)
    : n_(rows.size()), data_(rows.size() * rows.size(), 0.0) {
  for (std::size_t i = 0; i < n_; ++i) {
    if (rows[i].size() != n_) {
      throw Error(ErrorCode::kDimensionMismatch, "reward matrix is not square");
    }
    for (std::size_t j = 0; j < n_; ++j) data_[i * n_ + j] = rows[i][j];
  }
}

std::vector<std::vector<double>> RewardMatrix::rows() const {
  std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) out[i][j] = data_[i * n_ + j];
  return out;
}

double Instance::load(TypeSet s) const {
  double total = 0.0;
  for (TypeIndex i : members(s)) total += lambda_[i] / mu_[i];
  return total;
}

double Instance::total_arrival_rate() const {
  double total = 0.0;
  for (double l : lambda_) total += l;
  return total;
}

bool Instance::has_positive_reward() const {
  for (std::size_t i = 0; i < num_types(); ++i)
    for (std::size_t j = 0; j < num_types(); ++j)
      if (r_(i, j) > 0.0) return true;
  return false;
}

RawInstance Instance::raw() const { return {type_ids_, lambda_, mu_, r_.rows()}; }

Instance validate(const RawInstance& raw) {
  using V = ValidationError::Violation;
  std::vector<V> violations;
  const std::size_t n = raw.lambda.size();

  auto describe = [](const char* what, std::size_t got, std::size_t want) {
    std::ostringstream os;
    os << what << " has " << got << " entries, expected " << want;
    return os.str();
  };

  if (n == 0) violations.push_back({ErrorCode::kDimensionMismatch, "instance has no types"});
  if (n > kMaxTypes) {
    violations.push_back({ErrorCode::kTooManyTypes, "at most 32 types are supported"});
  }
  if (raw.mu.size() != n) {
    violations.push_back({ErrorCode::kDimensionMismatch, describe("mu", raw.mu.size(), n)});
  }
  if (!raw.type_ids.empty() && raw.type_ids.size() != n) {
    violations.push_back(
        {ErrorCode::kDimensionMismatch, describe("types", raw.type_ids.size(), n)});
  }
  if (raw.r.size() != n) {
    violations.push_back({ErrorCode::kDimensionMismatch, describe("r", raw.r.size(), n)});
  }
  for (std::size_t i = 0; i < raw.r.size(); ++i) {
    if (raw.r[i].size() != n) {
      violations.push_back({ErrorCode::kDimensionMismatch,
                            describe(("r row " + std::to_string(i)).c_str(), raw.r[i].size(), n)});
    }
    for (std::size_t j = 0; j < raw.r[i].size(); ++j) {
      if (!std::isfinite(raw.r[i][j])) {
        violations.push_back({ErrorCode::kNonFiniteReward,
                              "r[" + std::to_string(i) + "][" + std::to_string(j) + "] is not finite"});
      }
    }
  }
  auto check_rates = [&](const std::vector<double>& rates, const char* name) {
    for (std::size_t i = 0; i < rates.size(); ++i) {
      if (!(rates[i] > 0.0) || !std::isfinite(rates[i])) {
        std::ostringstream os;
        os << name << "[" << i << "] = " << rates[i] << " must be positive and finite";
        violations.push_back({ErrorCode::kNonPositiveRate, os.str()});
      }
    }
  };
  check_rates(raw.lambda, "lambda");
  check_rates(raw.mu, "mu");

  if (!violations.empty()) throw ValidationError(std::move(violations));

  Instance inst;
  inst.lambda_ = raw.lambda;
  inst.mu_ = raw.mu;
  inst.r_ = RewardMatrix(raw.r);
  inst.type_ids_ = raw.type_ids;
  if (inst.type_ids_.empty()) {
    for (std::size_t i = 0; i < n; ++i) inst.type_ids_.push_back(std::to_string(i + 1));
  }
  return inst;
}

Instance make_instance(std::vector<double> lambda, std::vector<double> mu,
                       std::vector<std::vector<double>> r) {
  RawInstance raw;
  raw.lambda = std::move(lambda);
  raw.mu = std::move(mu);
  raw.r = std::move(r);
  return validate(raw);
}

double gamma_of_load(double load) {
  if (load <= 0.0) return 1.0;
  return -std::expm1(-load) / load;
}

double gamma(const Instance& instance, TypeSet s) {
  if (s == 0) throw Error(ErrorCode::kEmptySet, "gamma of the empty set is undefined");
  return gamma_of_load(instance.load(s));
}

std::optional<Bipartition> is_bipartite(const Instance& instance) {
  const std::size_t n = instance.num_types();
  auto positive = [&](TypeIndex i, TypeIndex j) {
    return instance.reward(i, j) > 0.0 || instance.reward(j, i) > 0.0;
  };
  std::vector<int> colour(n, -1);
  std::vector<TypeIndex> stack;
  for (TypeIndex start = 0; start < n; ++start) {
    if (colour[start] >= 0) continue;
    colour[start] = 0;
    stack.push_back(start);
    while (!stack.empty()) {
      TypeIndex u = stack.back();
      stack.pop_back();
      for (TypeIndex w = 0; w < n; ++w) {
        if (!positive(u, w)) continue;
        if (colour[w] < 0) {
          colour[w] = 1 - colour[u];
          stack.push_back(w);
        } else if (colour[w] == colour[u]) {
          return std::nullopt;  // includes the self-loop case w == u
        }
      }
    }
  }
  Bipartition part;
  for (TypeIndex i = 0; i < n; ++i) {
    (colour[i] == 0 ? part.side1 : part.side2) |= singleton(i);
  }
  return part;
}

const char* to_string(DepartureClass c) {
  switch (c) {
    case DepartureClass::kGlobalHomogeneous: return "global-homogeneous";
    case DepartureClass::kBipartiteHomogeneous: return "bipartite-homogeneous";
    case DepartureClass::kHeterogeneous: return "heterogeneous";
  }
  return "unknown";
}

namespace {

bool constant_on(const std::vector<double>& mu, TypeSet s, double tol) {
  bool first = true;
  double ref = 0.0;
  for (TypeIndex i : members(s)) {
    if (first) {
      ref = mu[i];
      first = false;
    } else if (std::abs(mu[i] - ref) > tol * std::max(std::abs(mu[i]), std::abs(ref))) {
      return false;
    }
  }
  return true;
}

}  // namespace

DepartureClass has_homogeneous_departures(const Instance& instance, double relative_tolerance) {
  const TypeSet all = full_set(instance.num_types());
  if (constant_on(instance.mu(), all, relative_tolerance)) {
    return DepartureClass::kGlobalHomogeneous;
  }
  if (auto part = is_bipartite(instance)) {
    if (constant_on(instance.mu(), part->side1, relative_tolerance) &&
        constant_on(instance.mu(), part->side2, relative_tolerance)) {
      return DepartureClass::kBipartiteHomogeneous;
    }
  }
  return DepartureClass::kHeterogeneous;
}

MatchSet::MatchSet(std::size_t num_types) : sources_(num_types, 0) {}

MatchSet::MatchSet(std::size_t num_types,
                   const std::vector<std::pair<TypeIndex, TypeIndex>>& pairs)
    : sources_(num_types, 0) {
  for (auto [i, j] : pairs) {
    if (i >= num_types || j >= num_types) {
      throw Error(ErrorCode::kInvalidArgument, "match pair references an unknown type");
    }
    insert(i, j);
  }
}

MatchSet MatchSet::all(std::size_t num_types) {
  MatchSet m(num_types);
  for (auto& s : m.sources_) s = full_set(num_types);
  return m;
}

std::size_t MatchSet::size() const {
  std::size_t total = 0;
  for (TypeSet s : sources_) total += static_cast<std::size_t>(set_size(s));
  return total;
}

std::vector<std::pair<TypeIndex, TypeIndex>> MatchSet::pairs() const {
  std::vector<std::pair<TypeIndex, TypeIndex>> out;
  const std::size_t n = num_types();
  for (TypeIndex i = 0; i < n; ++i)
    for (TypeIndex j = 0; j < n; ++j)
      if (contains(i, j)) out.emplace_back(i, j);
  return out;
}

std::vector<TypeIndex> acceptable_sources(const MatchSet& m, TypeIndex j) {
  return members(m.sources(j));
}

}  // namespace dmatch
