#pragma once

#include <vector>

#include "disturbsim/memctrl/hooks.hpp"

namespace disturb::memctrl {

/// Rank-level all-bank REF every t_refi.
///
/// Ahead of each due time the engine stops new activations in the rank
/// and closes open banks so that the REF goes out exactly when due; each
/// REF refreshes the next block of rows_per_ref rows in every bank.
class AllBankRefresh : public RefreshEngine {
 public:
  AllBankRefresh(const dram::Geometry& g, const dram::TimingParams& t);

  void on_tick(Picos /*now*/, const ControllerView& /*view*/) override {}
  std::optional<dram::DramCommand> urgent(std::uint32_t channel, Picos now, const ControllerView& view) override;
  ActVerdict demand_act(const dram::DramCommand& act, Picos now, const ControllerView& view) override;
  void on_issued(const dram::IssuedCommand& c, const ControllerView& view) override;
  Picos next_wakeup(Picos now) const override;
  void write_stats(nlohmann::json& out) const override;

  std::uint32_t rows_per_ref() const { return rows_per_ref_; }
  /// Time before a due REF from which the rank accepts no new ACT.
  Picos drain_lead() const { return lead_; }
  std::uint64_t refs_issued() const { return refs_; }
  Picos max_lateness() const { return max_late_; }

 private:
  std::size_t rank_index(std::uint32_t ch, std::uint32_t r) const { return ch * g_.ranks_per_channel + r; }

  dram::Geometry g_;
  dram::TimingParams t_;
  std::uint32_t rows_per_ref_;
  std::uint32_t blocks_;
  Picos lead_;
  std::vector<Picos> due_;
  std::vector<std::uint64_t> index_;
  std::uint64_t refs_ = 0;
  Picos max_late_ = 0;
};

}  // namespace disturb::memctrl
