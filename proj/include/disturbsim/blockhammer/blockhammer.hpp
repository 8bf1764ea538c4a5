#pragma once

#include <memory>
#include <vector>

#include "disturbsim/blockhammer/config.hpp"
#include "disturbsim/blockhammer/history_buffer.hpp"
#include "disturbsim/blockhammer/throttler.hpp"
#include "disturbsim/common/rng.hpp"
#include "disturbsim/memctrl/hooks.hpp"
#include "disturbsim/sketch/cbf.hpp"

namespace disturb::blockhammer {

/// Blacklist (per-bank D-CBF), per-rank history buffer and per-thread
/// throttling. In ObserveOnly mode all bookkeeping runs but no ACT is
/// delayed and no request refused.
class BlockHammer : public memctrl::Mitigation {
 public:
  BlockHammer(const BlockHammerConfig& cfg, const dram::Geometry& g, std::uint64_t seed);

  void on_tick(Picos now) override;
  bool admit(std::uint32_t thread, const memctrl::BankRef& bank, std::uint32_t in_flight) override;
  memctrl::ActDecision is_act_safe(const memctrl::BankRef& bank, dram::RowId row, Picos now) override;
  void on_act(const memctrl::BankRef& bank, dram::RowId row, std::uint32_t thread, Picos now) override;
  Picos next_wakeup(Picos now) const override;
  void write_stats(nlohmann::json& out) const override;

  bool blacklisted(const memctrl::BankRef& bank, dram::RowId row) const;
  double rhli(std::uint32_t thread, const memctrl::BankRef& bank) const;
  std::uint32_t quota(std::uint32_t thread, const memctrl::BankRef& bank) const;

  const BlockHammerConfig& config() const { return cfg_; }
  const sketch::DualCbf& dcbf(const memctrl::BankRef& bank) const { return dcbf_[dram::flat_bank(g_, bank)]; }
  const HistoryBuffer& history(std::uint32_t channel, std::uint32_t rank) const {
    return hb_[channel * g_.ranks_per_channel + rank];
  }
  const Throttler& throttler() const { return throttler_; }
  std::uint64_t blacklisted_acts() const { return blacklisted_acts_; }
  std::uint32_t max_history_occupancy() const;

 private:
  std::uint64_t row_key(const memctrl::BankRef& bank, dram::RowId row) const {
    return std::uint64_t{bank.bank} * g_.rows_per_bank + row;
  }

  BlockHammerConfig cfg_;
  dram::Geometry g_;
  std::vector<sketch::DualCbf> dcbf_;
  std::vector<HistoryBuffer> hb_;
  Throttler throttler_;
  Rng rng_;
  Picos next_swap_;
  std::uint64_t blacklisted_acts_ = 0;
  std::uint64_t swaps_ = 0;
};

}  // namespace disturb::blockhammer
