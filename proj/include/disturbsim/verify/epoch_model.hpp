#pragma once

#include <array>
#include <cstdint>

#include "disturbsim/blockhammer/config.hpp"

namespace disturb::verify {

/// Inputs of the epoch-level attack model. Built from a BlockHammerConfig,
/// or filled in directly to probe configurations derive_config would reject.
struct EpochParams {
  std::int64_t n_rh_star = 0;
  std::int64_t n_bl = 0;
  Picos t_cbf = 0;
  Picos t_delay = 0;
  Picos t_rc = 0;
  Picos t_refw = 0;

  static EpochParams from(const blockhammer::BlockHammerConfig& cfg);
  Picos t_ep() const { return t_cbf / 2; }
};

/// Largest activation count of epoch type T0..T4, with N_BL* = N_BL - N_{ep-1}
/// chosen in [1, N_BL] to maximise it. T2 and T4 divisions are floored;
/// negative results clamp to zero.
std::array<std::int64_t, 5> max_epoch_acts(const EpochParams& p);

struct Feasibility {
  bool feasible = false;
  /// Best n_0..n_4 found (the witness when feasible).
  std::array<std::int64_t, 5> n{};
  std::int64_t best_total = 0;
  std::array<std::int64_t, 5> n_ep_max{};
  std::int64_t max_epochs = 0;
};

/// Exhaustive search over non-negative n_i with sum n_i <= t_refw / t_ep for
/// sum n_i N_ep_max(i) >= n_rh_star, subject to the predecessor constraints
///   n_0 + n_1 + n_2 <= n_0 + n_1 + n_3 + 1,   n_3 + n_4 <= n_2 + n_4 + 1.
Feasibility feasibility_check(const EpochParams& p);
inline Feasibility feasibility_check(const blockhammer::BlockHammerConfig& cfg) {
  return feasibility_check(EpochParams::from(cfg));
}

}  // namespace disturb::verify
