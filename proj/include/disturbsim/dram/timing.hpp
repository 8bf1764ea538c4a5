#pragma once

#include "disturbsim/common/time.hpp"

namespace disturb::dram {

/// DDR4-style timing constraints in picoseconds.
///
/// Defaults follow a DDR4 device with a 64 ms refresh window. t_cmd is the
/// command-bus slot: at most one command per channel per slot.
struct TimingParams {
  Picos t_rc = ns(46.25);
  Picos t_ras = ns(32);
  Picos t_rp = ns(14.25);
  Picos t_rcd = ns(13.5);
  Picos t_faw = ns(35);
  Picos t_refw = ms(64);
  Picos t_refi = ns(7812.5);
  Picos t_rfc = ns(350);
  Picos t_cl = ns(13.5);
  Picos t_cmd = ns(2.5);

  /// Throws ConfigError when a value is non-positive, t_rc < max(t_ras, t_rp)
  /// or t_refi >= t_refw.
  void validate() const;

  /// REF commands per refresh window (t_refw / t_refi, rounded down).
  std::int64_t refs_per_window() const { return t_refw / t_refi; }
};

/// The two violated intervals of a HiRA ACT-PRE-ACT sequence.
struct HiraTimings {
  Picos t1 = ns(3);  ///< first ACT -> PRE
  Picos t2 = ns(3);  ///< PRE -> second ACT

  void validate(const TimingParams& t) const;
};

}  // namespace disturb::dram
