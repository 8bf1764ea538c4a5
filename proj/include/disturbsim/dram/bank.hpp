#pragma once

#include <array>
#include <optional>
#include <vector>

#include "disturbsim/common/time.hpp"
#include "disturbsim/dram/command.hpp"
#include "disturbsim/dram/timing.hpp"

namespace disturb::dram {

enum class Phase {
  Precharged,
  Precharging,
  Activating,
  Active,
  HiraActivating,  ///< a HiRA refresh row is restoring, access row not yet readable
  HiraActive,      ///< a HiRA refresh row is restoring, access row readable
};

const char* to_string(Phase p);

class RankState;

/// Per-bank row-buffer state. Sub-phases (Activating vs Active, Precharging
/// vs Precharged) are derived from the stored timestamps.
class BankState {
 public:
  Phase phase(Picos now, const TimingParams& t) const;

  /// The row available for column commands, if any.
  const std::optional<RowId>& open_row() const { return open_row_; }
  /// HiRA: the first-ACT row still restoring in another subarray.
  const std::optional<RowId>& restoring_row() const { return restoring_row_; }
  bool is_open() const { return open_row_.has_value(); }

  /// The most recent ACT (for HiRA: the second ACT).
  Picos last_act() const { return last_act_; }
  /// The first ACT of the current activation (differs from last_act only for HiRA).
  Picos first_act() const { return first_act_; }
  Picos last_pre() const { return last_pre_; }

 private:
  friend void apply_command(RankState&, const DramCommand&, Picos, const TimingParams&, const HiraTimings&);
  std::optional<RowId> open_row_;
  std::optional<RowId> restoring_row_;
  Picos last_act_ = kDistantPast;
  Picos first_act_ = kDistantPast;
  Picos last_pre_ = kDistantPast;
};

/// A rank: its banks, the tFAW activation window and the REF busy window.
class RankState {
 public:
  explicit RankState(std::uint32_t banks) : banks_(banks) {}

  const BankState& bank(std::uint32_t b) const { return banks_.at(b); }
  std::size_t bank_count() const { return banks_.size(); }

  /// Most recent rank-level ACT times, newest first; unused slots hold kDistantPast.
  const std::array<Picos, 4>& recent_acts() const { return recent_acts_; }
  Picos refresh_until() const { return refresh_until_; }
  bool all_banks_closed() const;

 private:
  friend void apply_command(RankState&, const DramCommand&, Picos, const TimingParams&, const HiraTimings&);
  void record_act(Picos t);

  std::vector<BankState> banks_;
  std::array<Picos, 4> recent_acts_{kDistantPast, kDistantPast, kDistantPast, kDistantPast};
  Picos refresh_until_ = kDistantPast;
};

/// Earliest time >= now at which `cmd` can be issued without violating
/// tRCD, tRAS, tRP, tRC, tFAW or the REF busy window.
///
/// Throws ProtocolError when the command is illegal in the bank's current
/// phase (e.g. RD to a closed bank, ACT to an open bank).
Picos earliest_issue(const RankState& rank, const DramCommand& cmd, Picos now, const TimingParams& t,
                     const HiraTimings& hira = {});

/// Applies `cmd` at `now`. Throws ProtocolError if now < earliest_issue.
void apply_command(RankState& rank, const DramCommand& cmd, Picos now, const TimingParams& t,
                   const HiraTimings& hira = {});

}  // namespace disturb::dram
