#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disturbsim/sim/config.hpp"

namespace disturb::verify {

enum class Family { Single, DoubleSided, ManySided, BurstIdle, AliasProbe };

std::string to_string(Family f);
const std::vector<Family>& all_families();

struct AdversarialRun {
  Family family = Family::DoubleSided;
  std::uint64_t seed = 0;
  std::uint64_t max_window = 0;
  std::uint64_t max_row = 0;
  std::uint64_t demand_acts = 0;
  std::uint64_t violations = 0;  ///< simulator invariant violations (protocol, refresh, ...)
};

struct AdversarialReport {
  std::uint64_t max_window = 0;
  std::vector<AdversarialRun> runs;
};

/// Replaces the workload of `base` by one attacker per family and seed,
/// runs it through the configured mechanism with verification on, and
/// reports the per-row sliding-window maximum.
///
/// Every attacker is closed-loop with one request in flight, so it issues
/// its next request as soon as the previous one completes. The single-row
/// family runs with the closed row policy, since under the open policy
/// repeated accesses to one row are row hits.
AdversarialReport adversarial_search(const sim::SimConfig& base, const std::vector<Family>& families,
                                     const std::vector<std::uint64_t>& seeds);

/// The attack workload used for one family and seed.
sim::WorkloadSpec attack_pattern(Family f, const sim::SimConfig& base, std::uint64_t seed);

}  // namespace disturb::verify
