#include "disturbsim/blockhammer/throttler.hpp"

#include <cmath>

#include "disturbsim/common/errors.hpp"

namespace disturb::blockhammer {

std::uint32_t quota_for(double rhli, std::uint32_t q_max) {
  if (rhli >= 1.0) return 0;
  return static_cast<std::uint32_t>(std::ceil(static_cast<double>(q_max) * (1.0 - rhli) - 1e-12));
}

Throttler::Throttler(double denominator, std::uint64_t saturation, std::uint32_t q_max)
    : denominator_(denominator), saturation_(saturation), q_max_(q_max) {
  if (!(denominator > 0)) throw ConfigError("throttler: RHLI denominator must be positive");
}

void Throttler::record_blacklisted_act(std::uint32_t thread, std::uint32_t bank) {
  auto& c = counters_[{thread, bank}];
  for (auto& v : c) {
    if (v < saturation_) ++v;
  }
}

void Throttler::swap() {
  for (auto it = counters_.begin(); it != counters_.end();) {
    it->second[active_] = 0;
    if (it->second[0] == 0 && it->second[1] == 0) {
      it = counters_.erase(it);
    } else {
      ++it;
    }
  }
  active_ = 1 - active_;
}

std::uint64_t Throttler::active_count(std::uint32_t thread, std::uint32_t bank) const {
  auto it = counters_.find({thread, bank});
  return it == counters_.end() ? 0 : it->second[active_];
}

double Throttler::rhli(std::uint32_t thread, std::uint32_t bank) const {
  return static_cast<double>(active_count(thread, bank)) / denominator_;
}

std::uint32_t Throttler::quota(std::uint32_t thread, std::uint32_t bank) const {
  return quota_for(rhli(thread, bank), q_max_);
}

}  // namespace disturb::blockhammer
