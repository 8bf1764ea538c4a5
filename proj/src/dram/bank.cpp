#include "disturbsim/dram/bank.hpp"

#include <algorithm>
#include <string>

#include "disturbsim/common/errors.hpp"

namespace disturb::dram {

std::string to_string(CommandKind k) {
  switch (k) {
    case CommandKind::Act: return "ACT";
    case CommandKind::Pre: return "PRE";
    case CommandKind::Rd: return "RD";
    case CommandKind::Wr: return "WR";
    case CommandKind::Ref: return "REF";
    case CommandKind::Hira: return "HIRA";
  }
  return "?";
}

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Precharged: return "Precharged";
    case Phase::Precharging: return "Precharging";
    case Phase::Activating: return "Activating";
    case Phase::Active: return "Active";
    case Phase::HiraActivating: return "HiraActivating";
    case Phase::HiraActive: return "HiraActive";
  }
  return "?";
}

void TimingParams::validate() const {
  for (Picos v : {t_rc, t_ras, t_rp, t_rcd, t_faw, t_refw, t_refi, t_rfc, t_cl, t_cmd}) {
    if (v <= 0) throw ConfigError("timing parameters must be strictly positive");
  }
  if (t_rc < std::max(t_ras, t_rp)) throw ConfigError("t_rc must be >= max(t_ras, t_rp)");
  if (t_refi >= t_refw) throw ConfigError("t_refi must be < t_refw");
}

void HiraTimings::validate(const TimingParams& t) const {
  if (t1 <= 0 || t2 <= 0) throw ConfigError("HiRA t1 and t2 must be > 0");
  if (t1 + t2 >= t.t_rc) throw ConfigError("HiRA t1 + t2 must be < t_rc");
}

Phase BankState::phase(Picos now, const TimingParams& t) const {
  if (!open_row_) return now < last_pre_ + t.t_rp ? Phase::Precharging : Phase::Precharged;
  const bool readable = now >= last_act_ + t.t_rcd;
  if (restoring_row_) return readable ? Phase::HiraActive : Phase::HiraActivating;
  return readable ? Phase::Active : Phase::Activating;
}

bool RankState::all_banks_closed() const {
  return std::none_of(banks_.begin(), banks_.end(), [](const BankState& b) { return b.is_open(); });
}

void RankState::record_act(Picos t) {
  // Keep newest-first order; HiRA inserts a future second ACT, so insert sorted.
  std::array<Picos, 5> all{};
  std::copy(recent_acts_.begin(), recent_acts_.end(), all.begin());
  all[4] = t;
  std::sort(all.begin(), all.end(), std::greater<>());
  std::copy(all.begin(), all.begin() + 4, recent_acts_.begin());
}

namespace {

const BankState& target_bank(const RankState& rank, const DramCommand& cmd) {
  if (cmd.bank.bank >= rank.bank_count()) throw ProtocolError("bank index out of range");
  return rank.bank(cmd.bank.bank);
}

Picos act_constraints(const RankState& rank, const BankState& b, Picos now, const TimingParams& t) {
  Picos e = std::max({now, b.last_pre() + t.t_rp, b.last_act() + t.t_rc, rank.refresh_until()});
  // tFAW: the fourth most recent ACT must have left the window.
  return std::max(e, rank.recent_acts()[3] + t.t_faw);
}

}  // namespace

Picos earliest_issue(const RankState& rank, const DramCommand& cmd, Picos now, const TimingParams& t,
                     const HiraTimings& hira) {
  switch (cmd.kind) {
    case CommandKind::Act: {
      const BankState& b = target_bank(rank, cmd);
      if (b.is_open()) throw ProtocolError("ACT to a bank with an open row");
      return act_constraints(rank, b, now, t);
    }
    case CommandKind::Hira: {
      const BankState& b = target_bank(rank, cmd);
      if (b.is_open()) throw ProtocolError("HiRA requires a precharged bank");
      const Picos second = hira.t1 + hira.t2;
      Picos e = act_constraints(rank, b, now, t);
      // The second ACT joins the first one in the window.
      return std::max(e, rank.recent_acts()[2] + t.t_faw - second);
    }
    case CommandKind::Pre: {
      const BankState& b = target_bank(rank, cmd);
      if (!b.is_open()) throw ProtocolError("PRE to a precharged bank");
      return std::max(now, b.last_act() + t.t_ras);
    }
    case CommandKind::Rd:
    case CommandKind::Wr: {
      const BankState& b = target_bank(rank, cmd);
      if (!b.open_row() || *b.open_row() != cmd.row) {
        throw ProtocolError(to_string(cmd.kind) + " to a row that is not open");
      }
      return std::max(now, b.last_act() + t.t_rcd);
    }
    case CommandKind::Ref: {
      if (!rank.all_banks_closed()) throw ProtocolError("REF with an open bank");
      Picos e = std::max(now, rank.refresh_until());
      for (std::size_t i = 0; i < rank.bank_count(); ++i) {
        const BankState& b = rank.bank(static_cast<std::uint32_t>(i));
        e = std::max({e, b.last_pre() + t.t_rp, b.last_act() + t.t_rc});
      }
      return e;
    }
  }
  throw ProtocolError("unknown command kind");
}

void apply_command(RankState& rank, const DramCommand& cmd, Picos now, const TimingParams& t,
                   const HiraTimings& hira) {
  const Picos earliest = earliest_issue(rank, cmd, now, t, hira);
  if (now < earliest) {
    throw ProtocolError(to_string(cmd.kind) + " issued at " + std::to_string(now) + " ps, earliest legal " +
                        std::to_string(earliest) + " ps");
  }
  switch (cmd.kind) {
    case CommandKind::Act: {
      BankState& b = rank.banks_[cmd.bank.bank];
      b.open_row_ = cmd.row;
      b.restoring_row_.reset();
      b.last_act_ = b.first_act_ = now;
      rank.record_act(now);
      break;
    }
    case CommandKind::Hira: {
      BankState& b = rank.banks_[cmd.bank.bank];
      const Picos second = now + hira.t1 + hira.t2;
      b.restoring_row_ = cmd.refresh_row;
      b.open_row_ = cmd.row;
      b.first_act_ = now;
      b.last_act_ = second;
      rank.record_act(now);
      rank.record_act(second);
      break;
    }
    case CommandKind::Pre: {
      // One PRE closes both rows of a HiRA pair.
      BankState& b = rank.banks_[cmd.bank.bank];
      b.open_row_.reset();
      b.restoring_row_.reset();
      b.last_pre_ = now;
      break;
    }
    case CommandKind::Rd:
    case CommandKind::Wr:
      break;
    case CommandKind::Ref:
      rank.refresh_until_ = now + t.t_rfc;
      break;
  }
}

}  // namespace disturb::dram
