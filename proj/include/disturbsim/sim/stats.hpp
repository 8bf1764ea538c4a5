#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "disturbsim/memctrl/controller.hpp"
#include "json.hpp"

namespace disturb::sim {

/// Per-thread request counts and latencies.
class RequestStats {
 public:
  void record(const memctrl::MemoryRequest& r);
  std::uint64_t served() const { return served_; }
  nlohmann::json to_json() const;
  /// Nearest-rank percentile (p in (0, 1]) of one thread's latencies, in ps.
  Picos percentile(std::uint32_t thread, double p) const;

 private:
  struct Thread {
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    std::vector<Picos> latency;
  };
  std::map<std::uint32_t, Thread> threads_;
  std::uint64_t served_ = 0;
};

nlohmann::json controller_json(const memctrl::ControllerStats& s);

/// Writes stats.json, a flattened stats.csv and latency.csv into `dir`.
void write_stats_files(const nlohmann::json& stats, const RequestStats& req, const std::string& dir);

/// Deterministic text form of a stats document (sorted keys, fixed indent).
std::string dump_stats(const nlohmann::json& stats);

}  // namespace disturb::sim
