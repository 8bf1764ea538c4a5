#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace disturb::sim {

struct SweepPoint {
  nlohmann::json stats;
  std::uint64_t violations = 0;
  std::string error;  ///< non-empty if the point failed to configure or run
};

/// Worker count: DISTURBSIM_THREADS if set to a positive integer, else the
/// hardware concurrency, never more than `jobs`.
unsigned sweep_threads(std::size_t jobs);

/// Runs `base` merge-patched with each entry of `points`, in parallel.
/// Results are in the order of `points` regardless of completion order.
std::vector<SweepPoint> run_sweep(const nlohmann::json& base, const std::vector<nlohmann::json>& points);

}  // namespace disturb::sim
