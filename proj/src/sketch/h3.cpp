#include "disturbsim/sketch/h3.hpp"

#include <bit>
#include <stdexcept>

#include "disturbsim/common/rng.hpp"

namespace disturb::sketch {

H3Hash::H3Hash(std::uint64_t seed, unsigned static_shift, unsigned output_bits)
    : seed_(seed), shift_(static_shift % 64) {
  if (output_bits == 0 || output_bits > 32) throw std::invalid_argument("H3Hash: output_bits must be in [1, 32]");
  masks_.reserve(output_bits);
  std::uint64_t state = seed;
  for (unsigned j = 0; j < output_bits; ++j) {
    state += 0x9e3779b97f4a7c15ULL;
    masks_.push_back(splitmix64(state));
  }
}

std::uint32_t H3Hash::operator()(std::uint64_t key) const {
  const std::uint64_t k = std::rotr(key, static_cast<int>(shift_));
  std::uint32_t out = 0;
  for (std::size_t j = 0; j < masks_.size(); ++j) {
    out |= static_cast<std::uint32_t>(std::popcount(k & masks_[j]) & 1) << j;
  }
  return out;
}

}  // namespace disturb::sketch
