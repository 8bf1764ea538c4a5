#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "disturbsim/dram/bank.hpp"
#include "disturbsim/memctrl/hooks.hpp"
#include "disturbsim/memctrl/request.hpp"

namespace disturb::memctrl {

struct ControllerStats {
  std::uint64_t acts = 0;
  std::uint64_t demand_acts = 0;
  std::uint64_t refresh_acts = 0;     ///< periodic refresh ACTs (plain ACT+PRE)
  std::uint64_t preventive_acts = 0;  ///< preventive refresh ACTs (plain ACT+PRE)
  std::uint64_t pres = 0;
  std::uint64_t reads = 0;
  std::uint64_t writes = 0;
  std::uint64_t refs = 0;
  std::uint64_t hira_refresh_access = 0;
  std::uint64_t hira_refresh_refresh = 0;
  std::uint64_t row_hits = 0;
  std::uint64_t row_misses = 0;
  std::uint64_t row_conflicts = 0;
  std::uint64_t blocked_acts = 0;        ///< ACTs delayed at least once by the mitigation
  std::uint64_t preventive_refreshes = 0;  ///< victim rows the mitigation asked to refresh
  std::uint64_t rejected_full = 0;
  std::uint64_t rejected_quota = 0;
  std::map<int, std::uint64_t> block_delay_hist;  ///< floor(log2(delay_ns + 1)) -> count
  Picos max_block_delay = 0;
  Picos refresh_busy = 0;  ///< summed bank-time spent on refresh operations
};

/// One memory controller driving every channel of the geometry.
///
/// Each call to tick() is one command-bus slot; at most one command is
/// issued per channel per slot, and a HiRA sequence occupies the bus until
/// its second ACT.
class Controller : public ControllerView {
 public:
  Controller(const dram::Geometry& g, const dram::TimingParams& t, const dram::HiraTimings& h,
             const SchedulerConfig& cfg, Mitigation* mitigation, RefreshEngine* refresh,
             CommandListener* listener);

  /// False if the queue is full or the mitigation refuses admission.
  bool enqueue(MemoryRequest r, Picos now);
  void tick(Picos now);

  /// No queued requests, pending preventive refreshes or banks the
  /// row policy wants closed.
  bool idle() const;
  Picos next_wakeup(Picos now) const;

  std::size_t queued() const;
  std::uint32_t in_flight(std::uint32_t thread, const BankRef& bank) const;
  const ControllerStats& stats() const { return stats_; }
  /// Oldest queued arrival, or kNever.
  Picos oldest_arrival() const;

  // ControllerView
  const dram::Geometry& geometry() const override { return g_; }
  const dram::TimingParams& timing() const override { return t_; }
  const dram::HiraTimings& hira_timings() const override { return h_; }
  const dram::RankState& rank(std::uint32_t channel, std::uint32_t r) const override {
    return ranks_[channel * g_.ranks_per_channel + r];
  }
  Picos earliest(const dram::DramCommand& cmd, Picos now) const override;
  bool open_for_refresh(const BankRef& bank) const override;

 private:
  struct Entry {
    MemoryRequest req;
    bool caused_act = false;
    bool saw_conflict = false;
    std::optional<Picos> blocked_since;
  };
  struct BankCtl {
    dram::CommandPurpose open_purpose = dram::CommandPurpose::Demand;
    std::uint32_t open_thread = 0;
    std::uint32_t streak = 0;  ///< column commands since the last ACT
    std::deque<RowId> preventive;
  };

  void schedule_channel(std::uint32_t ch, Picos now);
  bool try_preventive(std::uint32_t ch, Picos now);
  bool try_demand(std::uint32_t ch, Picos now);
  void issue(std::uint32_t ch, const dram::DramCommand& cmd, Picos now, Entry* for_entry);
  void complete(std::uint32_t ch, std::size_t idx, Picos now);
  dram::RankState& rank_of(const BankRef& b) { return ranks_[b.channel * g_.ranks_per_channel + b.rank]; }
  const dram::RankState& rank_of(const BankRef& b) const {
    return ranks_[b.channel * g_.ranks_per_channel + b.rank];
  }
  BankCtl& ctl(const BankRef& b) { return banks_[dram::flat_bank(g_, b)]; }
  const BankCtl& ctl(const BankRef& b) const { return banks_[dram::flat_bank(g_, b)]; }

  dram::Geometry g_;
  dram::TimingParams t_;
  dram::HiraTimings h_;
  SchedulerConfig cfg_;
  Mitigation* mitigation_;
  RefreshEngine* refresh_;
  CommandListener* listener_;

  std::vector<dram::RankState> ranks_;
  std::vector<BankCtl> banks_;
  std::vector<std::vector<Entry>> queues_;  ///< per channel, arrival order
  std::vector<std::uint32_t> reads_queued_, writes_queued_;
  std::vector<Picos> bus_free_;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> in_flight_;
  std::uint64_t preventive_pending_ = 0;  ///< queued victims, plain mode
  std::uint64_t preventive_open_ = 0;     ///< banks holding a victim row open
  std::vector<std::uint8_t> scratch_hit_, scratch_conflict_, scratch_seen_;
  ControllerStats stats_;
};

}  // namespace disturb::memctrl
