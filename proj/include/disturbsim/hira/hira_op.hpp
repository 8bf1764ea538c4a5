#pragma once

#include <optional>

#include "disturbsim/dram/bank.hpp"
#include "disturbsim/hira/spt.hpp"

namespace disturb::hira {

/// Timeline of one HiRA operation issued at `first_act`.
struct HiraReport {
  Picos first_act = 0;
  Picos pre = 0;
  Picos second_act = 0;
  /// Refresh-access only: when the access row's data can be read.
  std::optional<Picos> data_ready;
  /// Earliest legal closing PRE (closes both rows).
  Picos close = 0;
  Picos restore_first = 0;   ///< first row open-to-close at the earliest close
  Picos restore_second = 0;  ///< second row open-to-close at the earliest close
  /// Time until both rows are refreshed and the bank can be closed.
  Picos two_row_latency() const { return close - first_act; }
};

/// Issues ACT(refresh_row) - PRE - ACT(second_row) on a precharged bank
/// and applies it to `rank`. `second_is_refresh` selects refresh-refresh
/// versus refresh-access. Throws PairingError if the two rows' subarrays
/// are not isolated and ProtocolError if the bank is not ready.
HiraReport hira_issue(dram::RankState& rank, const dram::Geometry& g, const SubarrayPairsTable& spt,
                      const dram::TimingParams& t, const dram::HiraTimings& h, const dram::BankRef& bank,
                      dram::RowId refresh_row, dram::RowId second_row, bool second_is_refresh, Picos now);

/// Two rows refreshed back to back without HiRA: ACT, PRE, ACT, PRE.
inline Picos conventional_two_row_latency(const dram::TimingParams& t) { return t.t_ras + t.t_rp + t.t_ras; }

}  // namespace disturb::hira
