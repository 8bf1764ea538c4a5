#include "disturbsim/sketch/cbf.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include "disturbsim/common/errors.hpp"

namespace disturb::sketch {

CountingBloomFilter::CountingBloomFilter(std::uint32_t size, unsigned counter_width, std::uint64_t seed)
    : width_(counter_width), counters_(size, 0) {
  if (size < 2 || !std::has_single_bit(size)) throw ConfigError("CBF size must be a power of two >= 2");
  if (counter_width == 0 || counter_width > 31) throw ConfigError("CBF counter width must be in [1, 31]");
  max_ = (std::uint32_t{1} << width_) - 1;
  index_bits_ = static_cast<unsigned>(std::countr_zero(size));
  seed_hashes(seed);
}

void CountingBloomFilter::seed_hashes(std::uint64_t seed) {
  for (int h = 0; h < kHashes; ++h) {
    hashes_[h] = H3Hash(derive_seed(seed, "h3/" + std::to_string(h)), static_cast<unsigned>(h * 7), index_bits_);
  }
}

void CountingBloomFilter::insert(std::uint64_t key) {
  for (const auto& h : hashes_) {
    std::uint32_t& c = counters_[h(key)];
    if (c < max_) ++c;
  }
}

std::uint32_t CountingBloomFilter::test(std::uint64_t key) const {
  std::uint32_t m = max_;
  for (const auto& h : hashes_) m = std::min(m, counters_[h(key)]);
  return m;
}

void CountingBloomFilter::clear(std::uint64_t new_seed) {
  std::fill(counters_.begin(), counters_.end(), 0);
  seed_hashes(new_seed);
}

bool CountingBloomFilter::aliases(std::uint64_t a, std::uint64_t b) const {
  for (const auto& h : hashes_) {
    if (h(a) != h(b)) return false;
  }
  return true;
}

DualCbf::DualCbf(std::uint32_t size, unsigned counter_width, Picos epoch_len, std::uint64_t seed)
    : filters_{CountingBloomFilter(size, counter_width, derive_seed(seed, "a")),
               CountingBloomFilter(size, counter_width, derive_seed(seed, "b"))},
      epoch_len_(epoch_len) {
  if (epoch_len <= 0) throw ConfigError("D-CBF epoch length must be positive");
}

void DualCbf::insert(std::uint64_t key) {
  filters_[0].insert(key);
  filters_[1].insert(key);
}

void DualCbf::clear_and_swap(Picos now, Rng& rng) {
  if (now - last_clear_ < epoch_len_) throw ProtocolError("D-CBF swapped before its epoch ended");
  filters_[active_].clear(rng.next_u64());
  active_ = 1 - active_;
  last_clear_ = now;
}

int DualCbf::advance_to(Picos now, Rng& rng) {
  int swaps = 0;
  while (now >= next_swap()) {
    clear_and_swap(next_swap(), rng);
    ++swaps;
  }
  return swaps;
}

unsigned counter_width_for(std::uint32_t n_bl) {
  if (n_bl <= 1) return 2;
  return static_cast<unsigned>(std::bit_width(n_bl - 1)) + 1;
}

}  // namespace disturb::sketch
