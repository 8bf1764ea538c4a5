#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "disturbsim/hira/spt.hpp"
#include "disturbsim/memctrl/hooks.hpp"

namespace disturb::hira {

enum class RefreshKind : std::uint8_t { Periodic, Preventive };

struct RefreshRequest {
  Picos generated = 0;
  Picos deadline = 0;
  memctrl::BankRef bank;
  RefreshKind kind = RefreshKind::Periodic;
  /// Preventive: the victim row. Periodic requests resolve their row
  /// through the RefPtr table when performed.
  std::optional<dram::RowId> target;
  /// Pushed out of a full PR-FIFO; performed as soon as possible.
  bool forced = false;
  /// Latest start that still leaves room for the bank's later entries.
  Picos due = 0;
};

/// Per (bank, subarray) refresh pointer and refreshed-this-round count.
///
/// Subarrays are advanced in a balanced way: only subarrays whose count
/// equals the bank's current minimum may be chosen, so within a round
/// of rows_per_bank periodic refreshes every row is refreshed exactly once.
class RefPtrTable {
 public:
  RefPtrTable(std::uint32_t banks, std::uint32_t subarrays, std::uint32_t rows_per_subarray);

  /// Lowest-index subarray at the minimum count that `ok` accepts.
  template <typename Pred>
  std::optional<std::uint32_t> pick(std::uint32_t bank, Pred ok) const {
    const Bank& b = banks_[bank];
    for (std::uint32_t s = 0; s < subarrays_; ++s) {
      if (b.count[s] == b.min && ok(s)) return s;
    }
    return std::nullopt;
  }
  /// Next row of subarray `s`; advances its pointer and count.
  dram::RowId advance(std::uint32_t bank, std::uint32_t s);

  std::uint32_t count(std::uint32_t bank, std::uint32_t s) const { return banks_[bank].count[s]; }
  std::uint32_t min_count(std::uint32_t bank) const { return banks_[bank].min; }
  std::uint32_t subarrays() const { return subarrays_; }
  std::uint32_t rows_per_subarray() const { return rows_; }

  struct Bank {
    std::vector<std::uint32_t> ptr;
    std::vector<std::uint32_t> count;
    std::uint32_t min = 0;
    std::uint32_t at_min = 0;
  };
  const Bank& bank_state(std::uint32_t bank) const { return banks_[bank]; }
  void restore(std::uint32_t bank, const Bank& saved) { banks_[bank] = saved; }

 private:
  std::uint32_t subarrays_;
  std::uint32_t rows_;
  std::vector<Bank> banks_;
};

struct HiraMcConfig {
  /// Allowed wait of a refresh request, in multiples of t_rc.
  std::uint32_t slack_rc_multiples = 2;
  bool preventive = false;
};

/// Periodic-refresh timing the engine derives from the geometry.
struct PeriodicPlan {
  Picos nominal_period = 0;  ///< t_refi / rows_per_ref
  Picos period = 0;          ///< per-bank request interval actually used
  Picos stagger = 0;         ///< offset between consecutive banks
};

PeriodicPlan plan_periodic(const dram::Geometry& g, const dram::TimingParams& t, Picos slack);
/// Refresh Table entries per rank: preventive entries of every bank plus
/// the periodic requests that can be alive within one slack interval.
std::uint32_t refresh_table_capacity(const dram::Geometry& g, const dram::TimingParams& t, Picos slack,
                                     Picos stagger);
/// PR-FIFO entries per bank: ceil(slack / t_rc), at least one.
std::uint32_t pr_fifo_capacity(const dram::TimingParams& t, Picos slack);

/// HiRA memory controller refresh engine.
///
/// Periodic requests are generated per bank with a staggered period and
/// queued with a deadline. A queued request is hidden behind a demand
/// activation of an isolated subarray when one comes along (refresh-access);
/// otherwise, close to its deadline, the bank is precharged and the row is
/// refreshed, paired with another queued refresh of an isolated subarray
/// when possible (refresh-refresh).
class HiraMc : public memctrl::RefreshEngine {
 public:
  HiraMc(const dram::Geometry& g, const dram::TimingParams& t, const dram::HiraTimings& h,
         const SubarrayPairsTable& spt, const HiraMcConfig& cfg);

  void on_tick(Picos now, const memctrl::ControllerView& view) override;
  std::optional<dram::DramCommand> urgent(std::uint32_t channel, Picos now,
                                          const memctrl::ControllerView& view) override;
  memctrl::ActVerdict demand_act(const dram::DramCommand& act, Picos now,
                                 const memctrl::ControllerView& view) override;
  void on_issued(const dram::IssuedCommand& /*c*/, const memctrl::ControllerView& /*view*/) override {}
  bool accepts_preventive() const override { return cfg_.preventive; }
  void preventive_enqueue(const memctrl::BankRef& bank, dram::RowId victim, Picos now) override;
  Picos next_wakeup(Picos now) const override;
  std::uint64_t violations() const override { return deadline_misses_; }
  void finish(Picos end) override;
  void write_stats(nlohmann::json& out) const override;

  Picos slack() const { return slack_; }
  /// Deadline offset actually applied: the slack, but never less than the
  /// time needed to close a just-opened row and refresh under tFAW.
  Picos deadline_offset() const { return deadline_offset_; }
  const PeriodicPlan& plan() const { return plan_; }
  std::uint32_t table_capacity() const { return table_cap_; }
  std::uint32_t fifo_capacity() const { return fifo_cap_; }
  std::uint32_t max_fifo_occupancy() const { return max_fifo_; }
  std::uint32_t max_table_occupancy() const { return max_table_; }
  std::size_t pending() const;

  struct Counters {
    std::uint64_t periodic_generated = 0;
    std::uint64_t preventive_generated = 0;
    std::uint64_t forced = 0;
    std::uint64_t hidden_refresh_access = 0;
    std::uint64_t refresh_refresh = 0;
    std::uint64_t plain = 0;
    std::uint64_t performed = 0;
  };
  const Counters& counters() const { return n_; }

 private:
  struct Rank {
    std::vector<RefreshRequest> entries;  ///< sorted by deadline
  };

  std::size_t rank_index(const memctrl::BankRef& b) const { return b.channel * g_.ranks_per_channel + b.rank; }
  std::uint32_t subarray_of(dram::RowId row) const { return row / g_.rows_per_subarray(); }
  bool urgent_entry(const RefreshRequest& e, Picos now) const;
  void insert(RefreshRequest e);
  void erase(Rank& rank, std::size_t i);
  void update_due(Rank& rank) const;
  void performed(const RefreshRequest& e, Picos at);
  bool bank_reserved(const Rank& rank, const memctrl::BankRef& bank, Picos now, Picos extra,
                     std::optional<std::size_t> skip) const;

  dram::Geometry g_;
  dram::TimingParams t_;
  dram::HiraTimings h_;
  SubarrayPairsTable spt_;
  HiraMcConfig cfg_;
  Picos slack_;
  Picos deadline_offset_;
  Picos guard_;
  Picos occupancy_;  ///< bank time of one refresh operation, slot-aligned
  Picos act_gap_;    ///< tFAW / 4, slot-aligned
  PeriodicPlan plan_;
  std::uint32_t table_cap_;
  std::uint32_t fifo_cap_;
  RefPtrTable refptr_;
  std::vector<Rank> ranks_;
  std::vector<Picos> next_gen_;        ///< per flat bank
  std::vector<std::uint32_t> fifo_;    ///< per flat bank, preventive entries queued
  std::uint32_t max_fifo_ = 0;
  std::uint32_t max_table_ = 0;
  std::uint64_t deadline_misses_ = 0;
  Picos max_lateness_ = 0;
  Counters n_;
};

}  // namespace disturb::hira
