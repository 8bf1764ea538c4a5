#include "disturbsim/memctrl/controller.hpp"

#include <algorithm>
#include <bit>

#include "disturbsim/common/errors.hpp"

namespace disturb::memctrl {

using dram::CommandKind;
using dram::CommandPurpose;
using dram::DramCommand;

void SchedulerConfig::validate() const {
  if (read_queue_len < 1 || write_queue_len < 1) throw ConfigError("queue lengths must be >= 1");
  if (column_cap < 1) throw ConfigError("column_cap must be >= 1");
}

Controller::Controller(const dram::Geometry& g, const dram::TimingParams& t, const dram::HiraTimings& h,
                       const SchedulerConfig& cfg, Mitigation* mitigation, RefreshEngine* refresh,
                       CommandListener* listener)
    : g_(g),
      t_(t),
      h_(h),
      cfg_(cfg),
      mitigation_(mitigation),
      refresh_(refresh),
      listener_(listener),
      banks_(g.total_banks()),
      queues_(g.channels),
      reads_queued_(g.channels, 0),
      writes_queued_(g.channels, 0),
      bus_free_(g.channels, 0) {
  g_.validate();
  t_.validate();
  cfg_.validate();
  for (std::uint32_t i = 0; i < g.channels * g.ranks_per_channel; ++i) ranks_.emplace_back(g.banks_per_rank);
  const std::size_t per_channel = std::size_t{g.ranks_per_channel} * g.banks_per_rank;
  scratch_hit_.resize(per_channel);
  scratch_conflict_.resize(per_channel);
  scratch_seen_.resize(per_channel);
  if (refresh_) refresh_->attach(listener_);
}

bool Controller::enqueue(MemoryRequest r, Picos now) {
  const std::uint32_t ch = r.addr.channel;
  const bool read = r.kind == ReqKind::Read;
  if ((read ? reads_queued_[ch] >= cfg_.read_queue_len : writes_queued_[ch] >= cfg_.write_queue_len)) {
    ++stats_.rejected_full;
    return false;
  }
  const BankRef bank = dram::bank_of(r.addr);
  const auto key = std::make_pair(r.thread, dram::flat_bank(g_, bank));
  auto it = in_flight_.find(key);
  const std::uint32_t inflight = it == in_flight_.end() ? 0 : it->second;
  if (mitigation_ && !mitigation_->admit(r.thread, bank, inflight)) {
    ++stats_.rejected_quota;
    return false;
  }
  ++in_flight_[key];
  (read ? reads_queued_ : writes_queued_)[ch]++;
  (void)now;
  queues_[ch].push_back(Entry{std::move(r), false, false, std::nullopt});
  return true;
}

std::uint32_t Controller::in_flight(std::uint32_t thread, const BankRef& bank) const {
  auto it = in_flight_.find({thread, dram::flat_bank(g_, bank)});
  return it == in_flight_.end() ? 0 : it->second;
}

std::size_t Controller::queued() const {
  std::size_t n = 0;
  for (const auto& q : queues_) n += q.size();
  return n;
}

Picos Controller::oldest_arrival() const {
  Picos t = kNever;
  for (const auto& q : queues_) {
    if (!q.empty()) t = std::min(t, q.front().req.arrival);
  }
  return t;
}

bool Controller::idle() const {
  if (preventive_pending_ > 0 || preventive_open_ > 0) return false;
  for (const auto& q : queues_) {
    if (!q.empty()) return false;
  }
  if (cfg_.row_policy == RowPolicy::Closed) {
    for (const auto& r : ranks_) {
      for (std::size_t b = 0; b < r.bank_count(); ++b) {
        if (r.bank(static_cast<std::uint32_t>(b)).is_open()) return false;
      }
    }
  }
  return true;
}

Picos Controller::next_wakeup(Picos now) const {
  if (!idle()) return now;
  Picos t = kNever;
  if (refresh_) t = std::min(t, refresh_->next_wakeup(now));
  if (mitigation_) t = std::min(t, mitigation_->next_wakeup(now));
  return t;
}

Picos Controller::earliest(const DramCommand& cmd, Picos now) const {
  const dram::RankState& r = rank_of(cmd.bank);
  switch (cmd.kind) {
    case CommandKind::Act:
    case CommandKind::Hira:
      if (r.bank(cmd.bank.bank).is_open()) return kNever;
      break;
    case CommandKind::Pre:
      if (!r.bank(cmd.bank.bank).is_open()) return kNever;
      break;
    case CommandKind::Rd:
    case CommandKind::Wr:
      if (r.bank(cmd.bank.bank).open_row() != cmd.row) return kNever;
      break;
    case CommandKind::Ref:
      if (!r.all_banks_closed()) return kNever;
      break;
  }
  return dram::earliest_issue(r, cmd, now, t_, h_);
}

bool Controller::open_for_refresh(const BankRef& bank) const {
  return rank_of(bank).bank(bank.bank).is_open() && ctl(bank).open_purpose != CommandPurpose::Demand;
}

void Controller::tick(Picos now) {
  if (mitigation_) mitigation_->on_tick(now);
  if (refresh_) refresh_->on_tick(now, *this);
  for (std::uint32_t ch = 0; ch < g_.channels; ++ch) {
    if (bus_free_[ch] <= now) schedule_channel(ch, now);
  }
}

void Controller::schedule_channel(std::uint32_t ch, Picos now) {
  if (refresh_) {
    if (auto cmd = refresh_->urgent(ch, now, *this)) {
      issue(ch, *cmd, now, nullptr);
      return;
    }
  }
  if ((preventive_pending_ > 0 || preventive_open_ > 0) && try_preventive(ch, now)) return;
  try_demand(ch, now);
}

bool Controller::try_preventive(std::uint32_t ch, Picos now) {
  for (std::uint32_t r = 0; r < g_.ranks_per_channel; ++r) {
    for (std::uint32_t b = 0; b < g_.banks_per_rank; ++b) {
      const BankRef bank{ch, r, b};
      BankCtl& c = ctl(bank);
      const auto& bs = rank_of(bank).bank(b);
      if (bs.is_open() && c.open_purpose == CommandPurpose::PreventiveRefresh) {
        auto pre = DramCommand::pre(bank, CommandPurpose::PreventiveRefresh);
        if (earliest(pre, now) <= now) {
          issue(ch, pre, now, nullptr);
          return true;
        }
        continue;
      }
      if (c.preventive.empty()) continue;
      if (bs.is_open()) {
        auto pre = DramCommand::pre(bank);
        if (earliest(pre, now) <= now) {
          issue(ch, pre, now, nullptr);
          return true;
        }
        continue;
      }
      auto act = DramCommand::act(bank, c.preventive.front(), CommandPurpose::PreventiveRefresh);
      if (earliest(act, now) > now) continue;
      if (refresh_ && !refresh_->demand_act(act, now, *this).allowed) continue;
      c.preventive.pop_front();
      --preventive_pending_;
      issue(ch, act, now, nullptr);
      return true;
    }
  }
  return false;
}

bool Controller::try_demand(std::uint32_t ch, Picos now) {
  auto& q = queues_[ch];
  const std::uint32_t nb = g_.banks_per_rank;
  auto local = [&](const dram::DecodedAddress& a) { return a.rank * nb + a.bank; };
  auto blocked = [&](const BankRef& b) {
    const BankCtl& c = ctl(b);
    return !c.preventive.empty() || open_for_refresh(b);
  };

  std::fill(scratch_hit_.begin(), scratch_hit_.end(), 0);
  std::fill(scratch_conflict_.begin(), scratch_conflict_.end(), 0);
  for (const Entry& e : q) {
    const auto& bs = rank_of(dram::bank_of(e.req.addr)).bank(e.req.addr.bank);
    if (!bs.is_open()) continue;
    if (*bs.open_row() == e.req.addr.row) {
      scratch_hit_[local(e.req.addr)] = 1;
    } else {
      scratch_conflict_[local(e.req.addr)] = 1;
    }
  }
  auto capped = [&](const BankRef& b, std::uint32_t li) {
    return scratch_conflict_[li] && ctl(b).streak >= cfg_.column_cap;
  };

  // Row hits, oldest first.
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Entry& e = q[i];
    const BankRef b = dram::bank_of(e.req.addr);
    const auto& bs = rank_of(b).bank(b.bank);
    if (!bs.is_open() || *bs.open_row() != e.req.addr.row) continue;
    if (blocked(b) || capped(b, local(e.req.addr))) continue;
    DramCommand cmd = e.req.kind == ReqKind::Read ? DramCommand::rd(b, e.req.addr.row) : DramCommand::wr(b, e.req.addr.row);
    if (earliest(cmd, now) > now) continue;
    issue(ch, cmd, now, nullptr);
    complete(ch, i, now);
    return true;
  }

  // Row misses and conflicts: the oldest request of each bank decides.
  std::fill(scratch_seen_.begin(), scratch_seen_.end(), 0);
  for (Entry& e : q) {
    const std::uint32_t li = local(e.req.addr);
    if (scratch_seen_[li]) continue;
    const BankRef b = dram::bank_of(e.req.addr);
    const auto& bs = rank_of(b).bank(b.bank);
    if (bs.is_open() && *bs.open_row() == e.req.addr.row) continue;  // waits for its hit turn
    scratch_seen_[li] = 1;
    if (blocked(b)) continue;
    if (bs.is_open()) {
      if (scratch_hit_[li] && !capped(b, li)) continue;
      auto pre = DramCommand::pre(b);
      if (earliest(pre, now) > now) continue;
      e.saw_conflict = true;
      issue(ch, pre, now, nullptr);
      return true;
    }
    auto act = DramCommand::act(b, e.req.addr.row);
    if (earliest(act, now) > now) continue;
    if (mitigation_) {
      ActDecision d = mitigation_->is_act_safe(b, e.req.addr.row, now);
      if (!d.safe) {
        if (!e.blocked_since) {
          e.blocked_since = now;
          ++stats_.blocked_acts;
        }
        continue;
      }
    }
    DramCommand cmd = act;
    if (refresh_) {
      ActVerdict v = refresh_->demand_act(act, now, *this);
      if (!v.allowed) continue;
      if (v.replacement) cmd = *v.replacement;
    }
    if (e.blocked_since) {
      const Picos delay = now - *e.blocked_since;
      stats_.max_block_delay = std::max(stats_.max_block_delay, delay);
      ++stats_.block_delay_hist[static_cast<int>(std::bit_width(static_cast<std::uint64_t>(delay / 1000)))];
      e.blocked_since.reset();
    }
    e.caused_act = true;
    issue(ch, cmd, now, &e);
    return true;
  }

  if (cfg_.row_policy == RowPolicy::Closed) {
    for (std::uint32_t r = 0; r < g_.ranks_per_channel; ++r) {
      for (std::uint32_t bi = 0; bi < nb; ++bi) {
        const BankRef b{ch, r, bi};
        if (scratch_hit_[r * nb + bi] || blocked(b)) continue;
        auto pre = DramCommand::pre(b);
        if (earliest(pre, now) > now) continue;
        issue(ch, pre, now, nullptr);
        return true;
      }
    }
  }
  return false;
}

void Controller::issue(std::uint32_t ch, const DramCommand& in, Picos now, Entry* for_entry) {
  DramCommand cmd = in;
  BankCtl* c = cmd.kind == CommandKind::Ref ? nullptr : &ctl(cmd.bank);
  dram::RankState& rank = rank_of(cmd.bank);
  std::optional<RowId> closing;
  if (cmd.kind == CommandKind::Pre) {
    closing = rank.bank(cmd.bank.bank).open_row();
    cmd.purpose = c->open_purpose;
  }
  dram::apply_command(rank, cmd, now, t_, h_);
  bus_free_[ch] = now + t_.t_cmd + (cmd.kind == CommandKind::Hira ? h_.t1 + h_.t2 : 0);

  const dram::IssuedCommand issued{now, cmd};
  if (listener_) listener_->on_command(issued);

  switch (cmd.kind) {
    case CommandKind::Act:
      ++stats_.acts;
      c->open_purpose = cmd.purpose;
      c->streak = 0;
      if (cmd.purpose == CommandPurpose::Demand) {
        ++stats_.demand_acts;
        c->open_thread = for_entry ? for_entry->req.thread : 0;
        if (mitigation_) mitigation_->on_act(cmd.bank, cmd.row, c->open_thread, now);
      } else {
        if (cmd.purpose == CommandPurpose::PreventiveRefresh) {
          ++stats_.preventive_acts;
          ++preventive_open_;
        } else {
          ++stats_.refresh_acts;
        }
        stats_.refresh_busy += t_.t_ras + t_.t_rp;
        if (listener_) listener_->on_rows_refreshed(cmd.bank, cmd.row, 1, now, cmd.purpose);
      }
      break;
    case CommandKind::Hira:
      stats_.acts += 2;
      c->streak = 0;
      if (listener_) listener_->on_rows_refreshed(cmd.bank, cmd.refresh_row, 1, now, cmd.purpose);
      if (cmd.second_is_refresh) {
        ++stats_.hira_refresh_refresh;
        c->open_purpose = cmd.purpose;
        stats_.refresh_busy += h_.t1 + h_.t2 + t_.t_ras + t_.t_rp;
        if (listener_) listener_->on_rows_refreshed(cmd.bank, cmd.row, 1, now + h_.t1 + h_.t2, cmd.purpose);
      } else {
        ++stats_.hira_refresh_access;
        ++stats_.demand_acts;
        c->open_purpose = CommandPurpose::Demand;
        c->open_thread = for_entry ? for_entry->req.thread : 0;
        stats_.refresh_busy += h_.t1 + h_.t2;
        if (mitigation_) mitigation_->on_act(cmd.bank, cmd.row, c->open_thread, now + h_.t1 + h_.t2);
      }
      break;
    case CommandKind::Pre:
      ++stats_.pres;
      if (cmd.purpose == CommandPurpose::PreventiveRefresh) --preventive_open_;
      if (cmd.purpose == CommandPurpose::Demand && closing && mitigation_) {
        if (auto victim = mitigation_->on_close(cmd.bank, *closing, now)) {
          ++stats_.preventive_refreshes;
          if (refresh_ && refresh_->accepts_preventive()) {
            refresh_->preventive_enqueue(cmd.bank, *victim, now);
          } else {
            c->preventive.push_back(*victim);
            ++preventive_pending_;
          }
        }
      }
      c->open_purpose = CommandPurpose::Demand;
      break;
    case CommandKind::Rd:
      ++stats_.reads;
      ++c->streak;
      break;
    case CommandKind::Wr:
      ++stats_.writes;
      ++c->streak;
      break;
    case CommandKind::Ref:
      ++stats_.refs;
      stats_.refresh_busy += t_.t_rfc * static_cast<Picos>(g_.banks_per_rank);
      break;
  }
  if (refresh_) refresh_->on_issued(issued, *this);
}

void Controller::complete(std::uint32_t ch, std::size_t idx, Picos now) {
  auto& q = queues_[ch];
  Entry e = std::move(q[idx]);
  q.erase(q.begin() + static_cast<std::ptrdiff_t>(idx));
  const bool read = e.req.kind == ReqKind::Read;
  e.req.completion = now + (read ? t_.t_cl : 0);
  (read ? reads_queued_ : writes_queued_)[ch]--;
  if (e.saw_conflict) {
    ++stats_.row_conflicts;
  } else if (e.caused_act) {
    ++stats_.row_misses;
  } else {
    ++stats_.row_hits;
  }
  auto it = in_flight_.find({e.req.thread, dram::flat_bank(g_, dram::bank_of(e.req.addr))});
  if (it != in_flight_.end() && --it->second == 0) in_flight_.erase(it);
  if (listener_) listener_->on_request_done(e.req);
}

}  // namespace disturb::memctrl
