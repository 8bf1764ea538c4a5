#include "disturbsim/hira/spt.hpp"

#include <cmath>
#include <fstream>

#include "disturbsim/common/errors.hpp"
#include "disturbsim/common/rng.hpp"
#include "json.hpp"

namespace disturb::hira {

SubarrayPairsTable::SubarrayPairsTable(std::uint32_t subarrays)
    : n_(subarrays), bits_(std::size_t{subarrays} * subarrays, 0) {
  if (subarrays == 0) throw ConfigError("SPT needs at least one subarray");
}

void SubarrayPairsTable::set_pair(std::uint32_t a, std::uint32_t b) {
  if (a >= n_ || b >= n_) throw ConfigError("SPT pair out of range");
  if (a == b) throw ConfigError("a subarray cannot be paired with itself");
  bits_[std::size_t{a} * n_ + b] = 1;
  bits_[std::size_t{b} * n_ + a] = 1;
}

std::uint32_t SubarrayPairsTable::partner_count(std::uint32_t a) const {
  std::uint32_t c = 0;
  for (std::uint32_t b = 0; b < n_; ++b) c += bits_[std::size_t{a} * n_ + b];
  return c;
}

double SubarrayPairsTable::coverage() const {
  if (n_ < 2) return 0.0;
  double sum = 0;
  for (std::uint32_t a = 0; a < n_; ++a) sum += static_cast<double>(partner_count(a)) / (n_ - 1);
  return sum / n_;
}

SubarrayPairsTable SubarrayPairsTable::build(std::uint32_t subarrays, double target, std::uint64_t seed) {
  if (!(target >= 0.0 && target < 1.0)) throw ConfigError("SPT coverage target must lie in [0, 1)");
  SubarrayPairsTable spt(subarrays);
  if (target == 0.0) return spt;
  const double all_pairs = static_cast<double>(subarrays) * (subarrays - 1);
  for (std::uint32_t block : {4u, 2u, 1u}) {
    if (subarrays % block != 0) continue;
    const std::uint32_t blocks = subarrays / block;
    const std::uint64_t max_pairs = std::uint64_t{blocks} * (blocks - 1) / 2;
    const auto k = static_cast<std::uint64_t>(std::llround(target * all_pairs / (2.0 * block * block)));
    if (k > max_pairs) continue;
    const double achieved = 2.0 * static_cast<double>(k) * block * block / all_pairs;
    if (std::fabs(achieved - target) > 0.02) continue;

    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    pairs.reserve(max_pairs);
    for (std::uint32_t x = 0; x < blocks; ++x) {
      for (std::uint32_t y = x + 1; y < blocks; ++y) pairs.emplace_back(x, y);
    }
    Rng rng(derive_seed(seed, "spt"));
    for (std::size_t i = pairs.size(); i > 1; --i) std::swap(pairs[i - 1], pairs[rng.below(i)]);
    for (std::uint64_t i = 0; i < k; ++i) {
      for (std::uint32_t a = 0; a < block; ++a) {
        for (std::uint32_t b = 0; b < block; ++b) spt.set_pair(pairs[i].first * block + a, pairs[i].second * block + b);
      }
    }
    return spt;
  }
  throw ConfigError("SPT coverage target " + std::to_string(target) + " is not achievable");
}

SubarrayPairsTable SubarrayPairsTable::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open SPT file " + path);
  nlohmann::json j;
  try {
    in >> j;
    SubarrayPairsTable spt(j.at("subarrays").get<std::uint32_t>());
    for (const auto& p : j.at("pairs")) spt.set_pair(p.at(0).get<std::uint32_t>(), p.at(1).get<std::uint32_t>());
    return spt;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void SubarrayPairsTable::save_json(const std::string& path) const {
  nlohmann::json j;
  j["subarrays"] = n_;
  j["pairs"] = nlohmann::json::array();
  for (std::uint32_t a = 0; a < n_; ++a) {
    for (std::uint32_t b = a + 1; b < n_; ++b) {
      if (can_pair(a, b)) j["pairs"].push_back({a, b});
    }
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write SPT file " + path);
  out << j.dump() << '\n';
}

}  // namespace disturb::hira
