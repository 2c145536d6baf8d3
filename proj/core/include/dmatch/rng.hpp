#pragma once

#include <cmath>
#include <cstdint>

namespace dmatch {

// Counter-based generator: the n-th draw of stream (seed, stream) is a pure
// function of (seed, stream, n). Streams never share state, so the values a
// consumer sees do not depend on how events from other streams interleave.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}

  std::uint64_t next() noexcept { return at(counter_++); }

  std::uint64_t at(std::uint64_t index) const noexcept {
    return mix(key_ + mix(index ^ 0x9e3779b97f4a7c15ULL));
  }

  // Uniform on the open interval (0, 1).
  double uniform() noexcept { return to_unit(next()); }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

  std::uint64_t counter() const noexcept { return counter_; }

  static double to_unit(std::uint64_t bits) noexcept {
    // 53 random mantissa bits, shifted by half an ulp so 0 is never produced.
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  // SplitMix64 finalizer.
  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stream identifiers shared by the simulator and the trace sampler, so a
// trace and a simulation run with the same seed see the same arrivals.
namespace streams {
inline constexpr std::uint64_t kArrivalBase = 0x1000;
inline constexpr std::uint64_t kSojournBase = 0x2000;
inline constexpr std::uint64_t kInstanceGen = 0x3000;
inline constexpr std::uint64_t kReplicationBase = 0x4000;
inline constexpr std::uint64_t kExperimentBase = 0x5000;

inline std::uint64_t arrival(std::size_t type) { return kArrivalBase + type; }
inline std::uint64_t sojourn(std::size_t type) { return kSojournBase + type; }
}  // namespace streams

}  // namespace dmatch
