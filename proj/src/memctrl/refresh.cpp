#include "disturbsim/memctrl/refresh.hpp"

#include <algorithm>

namespace disturb::memctrl {

using dram::CommandKind;
using dram::DramCommand;

AllBankRefresh::AllBankRefresh(const dram::Geometry& g, const dram::TimingParams& t)
    : g_(g),
      t_(t),
      due_(std::size_t{g.channels} * g.ranks_per_channel, t.t_refi),
      index_(due_.size(), 0) {
  const auto refs = static_cast<std::uint64_t>(t.refs_per_window());
  rows_per_ref_ = static_cast<std::uint32_t>((g.rows_per_bank + refs - 1) / refs);
  blocks_ = (g.rows_per_bank + rows_per_ref_ - 1) / rows_per_ref_;
  lead_ = t.t_rc + static_cast<Picos>(g.banks_per_rank + 4) * t.t_cmd;
}

std::optional<DramCommand> AllBankRefresh::urgent(std::uint32_t channel, Picos now, const ControllerView& view) {
  for (std::uint32_t r = 0; r < g_.ranks_per_channel; ++r) {
    const Picos due = due_[rank_index(channel, r)];
    if (now < due - lead_) continue;
    auto ref = DramCommand::ref(channel, r);
    if (now >= due && view.earliest(ref, now) <= now) return ref;
    for (std::uint32_t b = 0; b < g_.banks_per_rank; ++b) {
      auto pre = DramCommand::pre({channel, r, b});
      if (view.earliest(pre, now) <= now) return pre;
    }
  }
  return std::nullopt;
}

ActVerdict AllBankRefresh::demand_act(const DramCommand& act, Picos now, const ControllerView& /*view*/) {
  const Picos due = due_[rank_index(act.bank.channel, act.bank.rank)];
  return {now < due - lead_, std::nullopt};
}

void AllBankRefresh::on_issued(const dram::IssuedCommand& c, const ControllerView& /*view*/) {
  if (c.cmd.kind != CommandKind::Ref) return;
  const std::size_t ri = rank_index(c.cmd.bank.channel, c.cmd.bank.rank);
  max_late_ = std::max(max_late_, c.time - due_[ri]);
  const std::uint32_t block = static_cast<std::uint32_t>(index_[ri] % blocks_);
  const dram::RowId first = block * rows_per_ref_;
  const std::uint32_t count = std::min(rows_per_ref_, g_.rows_per_bank - first);
  if (listener_) {
    for (std::uint32_t b = 0; b < g_.banks_per_rank; ++b) {
      listener_->on_rows_refreshed({c.cmd.bank.channel, c.cmd.bank.rank, b}, first, count, c.time,
                                   dram::CommandPurpose::PeriodicRefresh);
    }
  }
  ++index_[ri];
  ++refs_;
  due_[ri] += t_.t_refi;
}

Picos AllBankRefresh::next_wakeup(Picos /*now*/) const {
  Picos t = kNever;
  for (Picos d : due_) t = std::min(t, d - lead_);
  return t;
}

void AllBankRefresh::write_stats(nlohmann::json& out) const {
  out["refresh"] = {{"engine", "all_bank_ref"},
                    {"refs", refs_},
                    {"rows_per_ref", rows_per_ref_},
                    {"max_lateness_ps", max_late_}};
}

}  // namespace disturb::memctrl
