#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "disturbsim/common/time.hpp"
#include "disturbsim/dram/timing.hpp"

namespace disturb::blockhammer {

enum class Mode { ObserveOnly, FullFunctional };

/// How far hammering reaches: c_k is the relative disturbance a victim at
/// distance k receives (c_1 = 1 for the adjacent row).
struct AttackModel {
  std::vector<double> c_k{1.0};

  static AttackModel double_sided() { return {}; }
  /// c_k = decay^(k-1) for k = 1..r_blast.
  static AttackModel many_sided(int r_blast, double decay);

  int r_blast() const { return static_cast<int>(c_k.size()); }
  /// n_rh_star / n_rh = 1 / (2 * sum c_k)
  double threshold_ratio() const;
};

struct BlockHammerConfig {
  std::int64_t n_rh = 0;
  double n_rh_star_exact = 0;  ///< before flooring to a count
  std::int64_t n_rh_star = 0;
  std::int64_t n_bl = 0;
  std::uint32_t cbf_size = 1024;
  Picos t_cbf = 0;
  Picos t_delay = 0;
  std::uint32_t hb_capacity = 0;
  Mode mode = Mode::FullFunctional;
  AttackModel attack;
  std::uint32_t q_max = 16;
  // Timing the derived values depend on.
  Picos t_refw = 0;
  Picos t_rc = 0;
  Picos t_faw = 0;

  /// Throws ConfigError unless n_bl < n_rh_star <= n_rh, t_delay > t_rc
  /// and the history buffer covers ceil(4 t_delay / t_faw) entries.
  void validate() const;

  unsigned counter_width() const;
  /// Largest blacklisted-ACT count a thread may reach in one filter
  /// lifetime: n_rh_star * t_cbf / t_refw - n_bl.
  double rhli_denominator() const;
  /// Throttler counter ceiling: n_rh * t_cbf / t_refw.
  std::uint64_t throttle_saturation() const;
};

/// Optional overrides of the values the derivation would otherwise pick.
struct Overrides {
  std::optional<std::int64_t> n_bl;
  std::optional<std::uint32_t> cbf_size;
  std::optional<Picos> t_cbf;
  std::optional<std::uint32_t> q_max;
  Mode mode = Mode::FullFunctional;
};

/// t_delay = (t_cbf - n_bl t_rc) / ((t_cbf / t_refw) n_rh_star - n_bl),
/// rounded up to the next picosecond. Throws ConfigError if the
/// denominator is not positive.
Picos compute_t_delay(Picos t_cbf, Picos t_refw, Picos t_rc, double n_rh_star, std::int64_t n_bl);

/// ceil(4 t_delay / t_faw): the most ACTs a rank can see within t_delay.
std::uint32_t history_capacity(Picos t_delay, Picos t_faw);

/// Derives a full configuration for threshold `n_rh`. For the double-sided
/// model and n_rh in {1K, 2K, ..., 32K} the tabulated presets are used;
/// otherwise n_bl = n_rh_star / 2 and cbf_size = max(1024, 2^23 / n_rh).
/// t_cbf defaults to t_refw.
BlockHammerConfig derive_config(std::int64_t n_rh, const AttackModel& attack, const dram::TimingParams& t,
                                const Overrides& o = {});

}  // namespace disturb::blockhammer
