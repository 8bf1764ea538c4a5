#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace disturb {

/// SplitMix64 finalizer; used to derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t x);

/// Derives a child seed from a parent seed and a stable label.
///
/// Every stochastic component takes its seed from `derive_seed(master, "<path>")`
/// so that adding a component never perturbs the streams of the others.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view label);

/// Seeded generator with platform-independent draws.
///
/// std::mt19937_64 is fully specified by the standard; the distributions are
/// not, so the conversions below are done by hand.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace disturb
