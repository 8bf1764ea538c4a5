#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "disturbsim/blockhammer/config.hpp"
#include "disturbsim/dram/geometry.hpp"
#include "disturbsim/dram/timing.hpp"
#include "disturbsim/hira/hira_mc.hpp"
#include "disturbsim/memctrl/request.hpp"
#include "disturbsim/svard/profile.hpp"
#include "disturbsim/svard/svard.hpp"
#include "json.hpp"

namespace disturb::sim {

enum class MitigationKind { None, Para, BlockHammer, HiraMc, SvardPara };
enum class RefreshScheme { AllBank, Hira };

struct MitigationConfig {
  MitigationKind kind = MitigationKind::None;
  // PARA, HiRA-MC preventive and Svärd: p_th is solved for n_rh unless given.
  std::optional<double> p_th;
  std::int64_t n_rh = 1024;
  double target_prh = 1e-15;
  // BlockHammer
  blockhammer::AttackModel attack;
  blockhammer::Overrides overrides;
  // Svärd
  std::string profile_path;
  std::vector<svard::BinSpec> profile_bins;
  svard::SvardConfig svard;
};

struct RefreshConfig {
  RefreshScheme scheme = RefreshScheme::AllBank;
  hira::HiraMcConfig hira;
  double spt_coverage = 0.32;
  std::string spt_path;
};

enum class WorkloadType { Trace, Random, Stream, Attack };
enum class AttackKind { Single, DoubleSided, ManySided, BurstIdle };

struct WorkloadSpec {
  WorkloadType type = WorkloadType::Random;
  std::uint32_t thread = 0;
  std::string path;            ///< Trace
  std::uint64_t count = 0;     ///< requests to generate, 0 = until the end
  Picos interval = ns(50);     ///< mean gap (Random, Stream); fixed gap (Attack), 0 = back-to-back
  double read_fraction = 0.7;
  double row_hit = 0.5;        ///< Random: chance to stay on the previous row
  std::uint32_t row_lo = 0, row_hi = 0;  ///< Random footprint, row_hi 0 = whole bank
  // Attack
  AttackKind attack = AttackKind::DoubleSided;
  dram::BankRef bank;
  std::vector<dram::RowId> rows;
  std::uint32_t outstanding = 1;
  std::uint32_t burst = 0;
  Picos idle = 0;
};

struct SimConfig {
  dram::Geometry geometry;
  dram::TimingParams timing;
  dram::HiraTimings hira_timings;
  std::string address_map = "row_major";
  memctrl::SchedulerConfig scheduler;
  RefreshConfig refresh;
  MitigationConfig mitigation;
  std::vector<WorkloadSpec> workloads;
  Picos duration = 0;
  std::uint64_t seed = 0;
  bool verify = false;
  std::string out_dir;

  /// Strict parse: unknown keys, wrong types and missing required fields
  /// throw ConfigError naming the JSON path.
  static SimConfig from_json(const nlohmann::json& j);
  static SimConfig load(const std::string& path);
  static nlohmann::json load_json(const std::string& path);
  void validate() const;
};

std::string to_string(MitigationKind k);

}  // namespace disturb::sim
