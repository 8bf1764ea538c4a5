#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "disturbsim/dram/command.hpp"
#include "disturbsim/dram/geometry.hpp"
#include "disturbsim/dram/timing.hpp"

namespace disturb::dram {

/// Replays an issued command stream and checks every pairwise timing
/// inequality directly from the command history.
///
/// Written independently of earliest_issue/apply_command so that the
/// scheduler's bookkeeping is cross-checked rather than trusted. Violations
/// are collected, not thrown, so a run can report all of them.
class ProtocolValidator {
 public:
  ProtocolValidator(const Geometry& g, const TimingParams& t, const HiraTimings& h);

  void observe(const IssuedCommand& c);
  void observe(Picos time, const DramCommand& cmd) { observe(IssuedCommand{time, cmd}); }

  const std::vector<std::string>& violations() const { return violations_; }
  bool clean() const { return violations_.empty(); }
  std::uint64_t commands_seen() const { return seen_; }

  /// Largest number of ACTs any rank saw inside one t_faw window.
  int max_acts_in_faw_window() const { return max_faw_; }
  /// Shortest open-to-close time observed for any row, HiRA rows included.
  Picos min_restore_time() const { return min_restore_; }

 private:
  struct Bank {
    std::optional<RowId> open;
    std::optional<RowId> hidden;  // HiRA first row
    Picos act = kDistantPast;
    Picos hidden_act = kDistantPast;
    Picos pre = kDistantPast;
  };
  struct Rank {
    std::deque<Picos> acts;
    Picos ref_end = kDistantPast;
  };

  void fail(Picos time, const std::string& what);
  void check_act(Rank& r, Bank& b, Picos at, bool hira_second);
  void check_close(Bank& b, Picos at);

  Geometry g_;
  TimingParams t_;
  HiraTimings h_;
  std::vector<Bank> banks_;
  std::vector<Rank> ranks_;
  std::vector<Picos> channel_last_;
  std::vector<std::string> violations_;
  std::uint64_t seen_ = 0;
  int max_faw_ = 0;
  Picos min_restore_ = kNever;
};

}  // namespace disturb::dram
