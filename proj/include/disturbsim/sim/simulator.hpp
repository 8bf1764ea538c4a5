#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "disturbsim/dram/validator.hpp"
#include "disturbsim/hira/hira_mc.hpp"
#include "disturbsim/memctrl/controller.hpp"
#include "disturbsim/sim/config.hpp"
#include "disturbsim/sim/stats.hpp"
#include "disturbsim/sim/workload.hpp"
#include "disturbsim/verify/coverage.hpp"
#include "disturbsim/verify/window_oracle.hpp"

namespace disturb::sim {

struct RunResult {
  nlohmann::json stats;
  std::uint64_t violations = 0;
};

/// One single-threaded simulation instance built from a SimConfig.
///
/// Seed tree: mitigation <- derive(seed, "mitigation"), SPT <- derive(seed,
/// "spt"), Svärd profile <- derive(seed, "svard"), workload i <-
/// derive(seed, "workload/<i>").
class Simulator : private memctrl::CommandListener {
 public:
  explicit Simulator(const SimConfig& cfg);
  ~Simulator() override;

  void add_source(std::unique_ptr<RequestSource> src);
  void add_listener(memctrl::CommandListener* l) { listeners_.add(l); }

  /// Runs to cfg.duration. Throws InvariantError if a request starves for
  /// longer than 10 t_refw.
  RunResult run();

  const SimConfig& config() const { return cfg_; }
  const memctrl::Controller& controller() const { return *controller_; }
  memctrl::Mitigation* mitigation() { return mitigation_.get(); }
  memctrl::RefreshEngine* refresh() { return refresh_.get(); }
  const verify::WindowOracle* window_oracle() const { return window_.get(); }
  const verify::CoverageOracle* coverage() const { return coverage_.get(); }
  const dram::ProtocolValidator* validator() const { return validator_.get(); }
  const RequestStats& requests() const { return requests_; }
  const dram::BitFieldMap& address_map() const { return map_; }
  /// p_th used by PARA-based mitigations (0 otherwise).
  double p_th() const { return p_th_; }

 private:
  class ValidatorTap;
  void on_request_done(const memctrl::MemoryRequest& r) override;
  nlohmann::json collect(std::uint64_t offered, std::uint64_t rejected_final, std::uint64_t& violations) const;

  SimConfig cfg_;
  dram::BitFieldMap map_;
  std::unique_ptr<memctrl::Mitigation> mitigation_;
  std::unique_ptr<memctrl::RefreshEngine> refresh_;
  std::unique_ptr<dram::ProtocolValidator> validator_;
  std::unique_ptr<ValidatorTap> tap_;
  std::unique_ptr<verify::WindowOracle> window_;
  std::unique_ptr<verify::CoverageOracle> coverage_;
  memctrl::ListenerList listeners_;
  std::unique_ptr<memctrl::Controller> controller_;
  std::vector<std::unique_ptr<RequestSource>> sources_;
  std::vector<std::uint32_t> source_of_;  ///< request id -> source index
  RequestStats requests_;
  double p_th_ = 0;
  bool ran_ = false;
};

}  // namespace disturb::sim
