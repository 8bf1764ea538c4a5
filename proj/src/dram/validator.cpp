#include "disturbsim/dram/validator.hpp"

#include <algorithm>

namespace disturb::dram {

ProtocolValidator::ProtocolValidator(const Geometry& g, const TimingParams& t, const HiraTimings& h)
    : g_(g),
      t_(t),
      h_(h),
      banks_(g.total_banks()),
      ranks_(std::size_t{g.channels} * g.ranks_per_channel),
      channel_last_(g.channels, kDistantPast) {}

void ProtocolValidator::fail(Picos time, const std::string& what) {
  if (violations_.size() < 1000) violations_.push_back("@" + std::to_string(time) + "ps: " + what);
}

void ProtocolValidator::check_act(Rank& r, Bank& b, Picos at, bool hira_second) {
  if (at < r.ref_end) fail(at, "ACT during tRFC");
  if (!hira_second) {
    if (at - b.pre < t_.t_rp) fail(at, "PRE->ACT < tRP");
    if (at - b.act < t_.t_rc) fail(at, "ACT->ACT same bank < tRC");
  }
  while (!r.acts.empty() && r.acts.front() <= at - t_.t_faw) r.acts.pop_front();
  r.acts.push_back(at);
  max_faw_ = std::max(max_faw_, static_cast<int>(r.acts.size()));
  if (r.acts.size() > 4) fail(at, "more than four ACTs in a tFAW window");
}

void ProtocolValidator::check_close(Bank& b, Picos at) {
  if (at - b.act < t_.t_ras) fail(at, "ACT->PRE < tRAS");
  min_restore_ = std::min(min_restore_, at - b.act);
  if (b.hidden) {
    if (at - b.hidden_act < t_.t_ras) fail(at, "HiRA refresh row restore < tRAS");
    min_restore_ = std::min(min_restore_, at - b.hidden_act);
  }
  b.open.reset();
  b.hidden.reset();
  b.pre = at;
}

void ProtocolValidator::observe(const IssuedCommand& c) {
  ++seen_;
  const DramCommand& cmd = c.cmd;
  const Picos at = c.time;
  if (cmd.bank.channel >= g_.channels || cmd.bank.rank >= g_.ranks_per_channel ||
      (cmd.kind != CommandKind::Ref && cmd.bank.bank >= g_.banks_per_rank)) {
    fail(at, "command addresses a bank outside the geometry");
    return;
  }
  Picos& last = channel_last_[cmd.bank.channel];
  if (at < last) fail(at, "non-monotone command timestamp");
  last = at;

  Rank& rank = ranks_[cmd.bank.channel * g_.ranks_per_channel + cmd.bank.rank];
  const std::size_t rank_base = (std::size_t{cmd.bank.channel} * g_.ranks_per_channel + cmd.bank.rank) *
                                g_.banks_per_rank;

  switch (cmd.kind) {
    case CommandKind::Act: {
      Bank& b = banks_[rank_base + cmd.bank.bank];
      if (b.open) fail(at, "ACT to open bank");
      check_act(rank, b, at, false);
      b.open = cmd.row;
      b.act = at;
      break;
    }
    case CommandKind::Hira: {
      Bank& b = banks_[rank_base + cmd.bank.bank];
      if (b.open) fail(at, "HiRA to open bank");
      if (h_.t1 + h_.t2 >= t_.t_rc) fail(at, "HiRA t1 + t2 >= tRC");
      check_act(rank, b, at, false);
      // The intermediate PRE at at + t1 deliberately violates tRAS; the
      // second ACT at at + t1 + t2 deliberately violates tRP.
      check_act(rank, b, at + h_.t1 + h_.t2, true);
      b.hidden = cmd.refresh_row;
      b.hidden_act = at;
      b.open = cmd.row;
      b.act = at + h_.t1 + h_.t2;
      break;
    }
    case CommandKind::Pre: {
      Bank& b = banks_[rank_base + cmd.bank.bank];
      if (!b.open) {
        fail(at, "PRE to closed bank");
        break;
      }
      check_close(b, at);
      break;
    }
    case CommandKind::Rd:
    case CommandKind::Wr: {
      Bank& b = banks_[rank_base + cmd.bank.bank];
      if (!b.open || *b.open != cmd.row) fail(at, "column command to a row that is not open");
      if (at - b.act < t_.t_rcd) fail(at, "ACT->column < tRCD");
      break;
    }
    case CommandKind::Ref: {
      for (std::size_t i = 0; i < g_.banks_per_rank; ++i) {
        const Bank& b = banks_[rank_base + i];
        if (b.open) fail(at, "REF with open bank");
        if (at - b.pre < t_.t_rp) fail(at, "PRE->REF < tRP");
      }
      if (at < rank.ref_end) fail(at, "REF during tRFC");
      rank.ref_end = at + t_.t_rfc;
      break;
    }
  }
}

}  // namespace disturb::dram
