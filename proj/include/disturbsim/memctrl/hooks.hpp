#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "disturbsim/common/time.hpp"
#include "disturbsim/dram/bank.hpp"
#include "disturbsim/dram/command.hpp"
#include "disturbsim/dram/geometry.hpp"
#include "disturbsim/dram/timing.hpp"
#include "disturbsim/memctrl/request.hpp"
#include "json.hpp"

namespace disturb::memctrl {

using dram::BankRef;
using dram::RowId;

/// Answer of a mitigation's safety query for a candidate ACT.
struct ActDecision {
  bool safe = true;
  Picos retry_after = 0;

  static ActDecision Safe() { return {}; }
  static ActDecision Unsafe(Picos retry_after) { return {false, retry_after}; }
};

/// A read-disturbance mitigation that observes or vetoes demand traffic.
///
/// Call order within a command slot: on_tick, then admission of arrivals,
/// then scheduling (is_act_safe for each candidate ACT, on_act/on_close for
/// the issued command).
class Mitigation {
 public:
  virtual ~Mitigation() = default;

  virtual void on_tick(Picos /*now*/) {}
  /// Admission control for a new request of `thread` to `bank` while it
  /// already has `in_flight` requests queued there.
  virtual bool admit(std::uint32_t /*thread*/, const BankRef& /*bank*/, std::uint32_t /*in_flight*/) {
    return true;
  }
  virtual ActDecision is_act_safe(const BankRef& /*bank*/, RowId /*row*/, Picos /*now*/) {
    return ActDecision::Safe();
  }
  virtual void on_act(const BankRef& /*bank*/, RowId /*row*/, std::uint32_t /*thread*/, Picos /*now*/) {}
  /// A demand-activated row was closed. May return a victim row to refresh.
  virtual std::optional<RowId> on_close(const BankRef& /*bank*/, RowId /*row*/, Picos /*now*/) {
    return std::nullopt;
  }
  /// Earliest time the mitigation needs a tick even if the system is idle.
  virtual Picos next_wakeup(Picos /*now*/) const { return kNever; }
  virtual void write_stats(nlohmann::json& /*out*/) const {}
};

/// Receives every issued command and every row refresh, for validators,
/// oracles and statistics.
class CommandListener {
 public:
  virtual ~CommandListener() = default;
  virtual void on_command(const dram::IssuedCommand& /*c*/) {}
  virtual void on_rows_refreshed(const BankRef& /*bank*/, RowId /*first*/, std::uint32_t /*count*/,
                                 Picos /*t*/, dram::CommandPurpose /*why*/) {}
  virtual void on_request_done(const MemoryRequest& /*r*/) {}
};

/// Fan-out of CommandListener callbacks.
class ListenerList : public CommandListener {
 public:
  void add(CommandListener* l) {
    if (l) listeners_.push_back(l);
  }
  void on_command(const dram::IssuedCommand& c) override {
    for (auto* l : listeners_) l->on_command(c);
  }
  void on_rows_refreshed(const BankRef& b, RowId first, std::uint32_t count, Picos t,
                         dram::CommandPurpose why) override {
    for (auto* l : listeners_) l->on_rows_refreshed(b, first, count, t, why);
  }
  void on_request_done(const MemoryRequest& r) override {
    for (auto* l : listeners_) l->on_request_done(r);
  }

 private:
  std::vector<CommandListener*> listeners_;
};

/// Read-only view of the controller that refresh engines schedule against.
class ControllerView {
 public:
  virtual ~ControllerView() = default;
  virtual const dram::Geometry& geometry() const = 0;
  virtual const dram::TimingParams& timing() const = 0;
  virtual const dram::HiraTimings& hira_timings() const = 0;
  virtual const dram::RankState& rank(std::uint32_t channel, std::uint32_t rank) const = 0;
  /// Earliest legal issue time of `cmd`, or kNever if illegal in the current phase.
  virtual Picos earliest(const dram::DramCommand& cmd, Picos now) const = 0;
  /// True if the row open in `bank` was opened for a refresh.
  virtual bool open_for_refresh(const BankRef& bank) const = 0;
};

/// What a refresh engine says about a demand ACT the scheduler wants to issue.
struct ActVerdict {
  bool allowed = true;
  /// Replacement command (a HiRA refresh-access) to issue instead of the ACT.
  std::optional<dram::DramCommand> replacement;
};

/// Owns periodic (and, for HiRA-MC, preventive) refresh scheduling.
class RefreshEngine {
 public:
  virtual ~RefreshEngine() = default;

  void attach(CommandListener* listener) { listener_ = listener; }

  /// Generate refresh work that becomes due at `now`.
  virtual void on_tick(Picos now, const ControllerView& view) = 0;
  /// A refresh-related command that must go out in this slot on `channel`,
  /// if one is legal right now. Takes priority over all demand traffic.
  virtual std::optional<dram::DramCommand> urgent(std::uint32_t channel, Picos now, const ControllerView& view) = 0;
  /// Whether a demand (or plain preventive) ACT may be issued now.
  virtual ActVerdict demand_act(const dram::DramCommand& act, Picos now, const ControllerView& view) = 0;
  /// Called for every command the controller issues, after it is applied.
  virtual void on_issued(const dram::IssuedCommand& c, const ControllerView& view) = 0;

  virtual bool accepts_preventive() const { return false; }
  virtual void preventive_enqueue(const BankRef& /*bank*/, RowId /*victim*/, Picos /*now*/) {}

  virtual Picos next_wakeup(Picos now) const = 0;
  /// Deadline misses and other guarantee failures seen so far.
  virtual std::uint64_t violations() const { return 0; }
  virtual void finish(Picos /*end*/) {}
  virtual void write_stats(nlohmann::json& /*out*/) const {}

 protected:
  CommandListener* listener_ = nullptr;
};

}  // namespace disturb::memctrl
