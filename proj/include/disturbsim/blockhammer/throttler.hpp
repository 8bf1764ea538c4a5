#pragma once

#include <array>
#include <cstdint>
#include <map>

namespace disturb::blockhammer {

/// Per <thread, bank> counts of activations to blacklisted rows, kept in
/// two time-interleaved counters that swap together with the D-CBFs.
class Throttler {
 public:
  /// `denominator` is n_rh_star * t_cbf / t_refw - n_bl; counters saturate
  /// at `saturation`.
  Throttler(double denominator, std::uint64_t saturation, std::uint32_t q_max);

  void record_blacklisted_act(std::uint32_t thread, std::uint32_t bank);
  /// Clears the active counters and swaps roles.
  void swap();

  std::uint64_t active_count(std::uint32_t thread, std::uint32_t bank) const;
  double rhli(std::uint32_t thread, std::uint32_t bank) const;
  /// ceil(q_max * (1 - rhli)) for rhli < 1, else 0.
  std::uint32_t quota(std::uint32_t thread, std::uint32_t bank) const;

  using Key = std::pair<std::uint32_t, std::uint32_t>;
  const std::map<Key, std::array<std::uint64_t, 2>>& counters() const { return counters_; }
  int active_index() const { return active_; }
  double denominator() const { return denominator_; }

 private:
  double denominator_;
  std::uint64_t saturation_;
  std::uint32_t q_max_;
  int active_ = 0;
  std::map<Key, std::array<std::uint64_t, 2>> counters_;
};

/// quota(rhli) with the same rounding as Throttler::quota.
std::uint32_t quota_for(double rhli, std::uint32_t q_max);

}  // namespace disturb::blockhammer
