#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace disturb::hira {

/// Symmetric, irreflexive "may be open at the same time" relation between
/// the subarrays of a bank.
class SubarrayPairsTable {
 public:
  explicit SubarrayPairsTable(std::uint32_t subarrays = 1);

  /// Contiguous blocks of 4, 2 or 1 subarrays; a seeded random set of
  /// block pairs is marked isolated so that the mean isolated fraction per
  /// subarray is within 2% of `target_coverage`. Throws ConfigError if no
  /// block size can hit the target.
  static SubarrayPairsTable build(std::uint32_t subarrays, double target_coverage, std::uint64_t seed);
  /// {"subarrays": N, "pairs": [[a, b], ...]}
  static SubarrayPairsTable load_json(const std::string& path);
  void save_json(const std::string& path) const;

  void set_pair(std::uint32_t a, std::uint32_t b);
  bool can_pair(std::uint32_t a, std::uint32_t b) const { return bits_[std::size_t{a} * n_ + b] != 0; }

  std::uint32_t subarrays() const { return n_; }
  std::uint32_t partner_count(std::uint32_t a) const;
  /// Mean over subarrays of (isolated partners) / (subarrays - 1).
  double coverage() const;

  friend bool operator==(const SubarrayPairsTable&, const SubarrayPairsTable&) = default;

 private:
  std::uint32_t n_;
  std::vector<std::uint8_t> bits_;
};

}  // namespace disturb::hira
