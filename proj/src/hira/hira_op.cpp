#include "disturbsim/hira/hira_op.hpp"

#include "disturbsim/common/errors.hpp"

namespace disturb::hira {

HiraReport hira_issue(dram::RankState& rank, const dram::Geometry& g, const SubarrayPairsTable& spt,
                      const dram::TimingParams& t, const dram::HiraTimings& h, const dram::BankRef& bank,
                      dram::RowId refresh_row, dram::RowId second_row, bool second_is_refresh, Picos now) {
  h.validate(t);
  const std::uint32_t rps = g.rows_per_subarray();
  if (!spt.can_pair(refresh_row / rps, second_row / rps)) {
    throw PairingError("HiRA rows " + std::to_string(refresh_row) + " and " + std::to_string(second_row) +
                       " are not in isolated subarrays");
  }
  if (rank.bank(bank.bank).is_open()) throw ProtocolError("HiRA requires a precharged bank");
  const auto cmd = dram::DramCommand::hira(bank, refresh_row, second_row, second_is_refresh,
                                           dram::CommandPurpose::PeriodicRefresh);
  dram::apply_command(rank, cmd, now, t, h);

  HiraReport r;
  r.first_act = now;
  r.pre = now + h.t1;
  r.second_act = now + h.t1 + h.t2;
  if (!second_is_refresh) r.data_ready = r.second_act + t.t_rcd;
  r.close = dram::earliest_issue(rank, dram::DramCommand::pre(bank), now, t, h);
  r.restore_first = r.close - r.first_act;
  r.restore_second = r.close - r.second_act;
  return r;
}

}  // namespace disturb::hira
