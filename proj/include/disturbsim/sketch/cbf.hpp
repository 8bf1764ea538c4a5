#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "disturbsim/common/rng.hpp"
#include "disturbsim/common/time.hpp"
#include "disturbsim/sketch/h3.hpp"

namespace disturb::sketch {

/// Counting Bloom filter with saturating counters and four H3 hashes.
/// Answers with the minimum of the mapped counters, so it may over-count
/// but never under-counts.
class CountingBloomFilter {
 public:
  static constexpr int kHashes = 4;

  /// `size` must be a power of two; counters are `counter_width` bits wide.
  CountingBloomFilter(std::uint32_t size, unsigned counter_width, std::uint64_t seed);

  void insert(std::uint64_t key);
  std::uint32_t test(std::uint64_t key) const;

  /// Zeroes all counters and replaces the hash seeds.
  void clear(std::uint64_t new_seed);

  std::uint32_t size() const { return static_cast<std::uint32_t>(counters_.size()); }
  unsigned counter_width() const { return width_; }
  std::uint32_t counter_max() const { return max_; }
  const std::vector<std::uint32_t>& counters() const { return counters_; }
  /// True when every hash maps `a` and `b` to the same counter.
  bool aliases(std::uint64_t a, std::uint64_t b) const;

  friend bool operator==(const CountingBloomFilter&, const CountingBloomFilter&) = default;

 private:
  void seed_hashes(std::uint64_t seed);

  unsigned width_;
  std::uint32_t max_;
  unsigned index_bits_;
  std::array<H3Hash, kHashes> hashes_;
  std::vector<std::uint32_t> counters_;
};

/// Two counting Bloom filters used in a time-interleaved fashion. Inserts
/// update both; the active filter answers tests. Every epoch the active
/// filter is cleared and reseeded and the roles swap, so each filter lives
/// for exactly two epochs.
class DualCbf {
 public:
  DualCbf(std::uint32_t size, unsigned counter_width, Picos epoch_len, std::uint64_t seed);

  void insert(std::uint64_t key);
  std::uint32_t test(std::uint64_t key) const { return filters_[active_].test(key); }

  /// Requires now - last_clear >= epoch_len.
  void clear_and_swap(Picos now, Rng& rng);
  /// Runs every swap that is due at or before `now`. Returns the number of swaps.
  int advance_to(Picos now, Rng& rng);

  Picos epoch_len() const { return epoch_len_; }
  Picos last_clear() const { return last_clear_; }
  Picos next_swap() const { return last_clear_ + epoch_len_; }
  int active_index() const { return active_; }
  const CountingBloomFilter& active() const { return filters_[active_]; }
  const CountingBloomFilter& passive() const { return filters_[1 - active_]; }

  friend bool operator==(const DualCbf&, const DualCbf&) = default;

 private:
  std::array<CountingBloomFilter, 2> filters_;
  int active_ = 0;
  Picos epoch_len_;
  Picos last_clear_ = 0;
};

/// Counter width that cannot saturate below n_bl: ceil(log2(n_bl)) + 1.
unsigned counter_width_for(std::uint32_t n_bl);

}  // namespace disturb::sketch
