#pragma once

#include <cstdint>
#include <vector>

namespace disturb::sketch {

/// H3-class universal hash: each output bit is the parity of the (rotated)
/// key ANDed with a per-bit random mask.
class H3Hash {
 public:
  H3Hash() = default;
  /// Masks are drawn from a SplitMix64 stream rooted at `seed`.
  H3Hash(std::uint64_t seed, unsigned static_shift, unsigned output_bits);

  std::uint32_t operator()(std::uint64_t key) const;

  unsigned output_bits() const { return static_cast<unsigned>(masks_.size()); }
  std::uint64_t seed() const { return seed_; }

  friend bool operator==(const H3Hash&, const H3Hash&) = default;

 private:
  std::uint64_t seed_ = 0;
  unsigned shift_ = 0;
  std::vector<std::uint64_t> masks_;
};

}  // namespace disturb::sketch
