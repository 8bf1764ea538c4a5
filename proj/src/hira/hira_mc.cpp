#include "disturbsim/hira/hira_mc.hpp"

#include <algorithm>

#include "disturbsim/common/errors.hpp"

namespace disturb::hira {

using dram::CommandPurpose;
using dram::DramCommand;

RefPtrTable::RefPtrTable(std::uint32_t banks, std::uint32_t subarrays, std::uint32_t rows_per_subarray)
    : subarrays_(subarrays), rows_(rows_per_subarray) {
  Bank b;
  b.ptr.assign(subarrays, 0);
  b.count.assign(subarrays, 0);
  b.at_min = subarrays;
  banks_.assign(banks, b);
}

dram::RowId RefPtrTable::advance(std::uint32_t bank, std::uint32_t s) {
  Bank& b = banks_[bank];
  if (b.count[s] != b.min) throw InvariantError("refresh pointer advanced out of balance");
  const dram::RowId row = s * rows_ + b.ptr[s];
  b.ptr[s] = (b.ptr[s] + 1) % rows_;
  ++b.count[s];
  if (--b.at_min == 0) {
    ++b.min;
    b.at_min = subarrays_;
    if (b.min == rows_) {
      std::fill(b.count.begin(), b.count.end(), 0);
      b.min = 0;
    }
  }
  return row;
}

PeriodicPlan plan_periodic(const dram::Geometry& g, const dram::TimingParams& t, Picos deadline_offset) {
  PeriodicPlan p;
  const auto refs = static_cast<std::uint64_t>(t.refs_per_window());
  const auto rows_per_ref = static_cast<Picos>((g.rows_per_bank + refs - 1) / refs);
  p.nominal_period = t.t_refi / rows_per_ref;
  // A row can wait up to rows_per_bank + subarrays - 1 requests between two
  // refreshes under balanced pointer advance, plus one deadline offset.
  const Picos bound = (t.t_refw - deadline_offset) / (static_cast<Picos>(g.rows_per_bank) + g.subarrays_per_bank - 1);
  p.period = std::min(p.nominal_period, bound);
  if (p.period <= 0) throw ConfigError("hira: refresh window too short for the row count");
  p.stagger = p.period / g.banks_per_rank;
  return p;
}

std::uint32_t pr_fifo_capacity(const dram::TimingParams& t, Picos slack) {
  return static_cast<std::uint32_t>(std::max<Picos>(1, ceil_div(slack, t.t_rc)));
}

std::uint32_t refresh_table_capacity(const dram::Geometry& g, const dram::TimingParams& t, Picos slack,
                                     Picos stagger) {
  const Picos periodic = (stagger > 0 ? slack / stagger : 0) + 1;
  return pr_fifo_capacity(t, slack) * g.banks_per_rank + static_cast<std::uint32_t>(periodic);
}

HiraMc::HiraMc(const dram::Geometry& g, const dram::TimingParams& t, const dram::HiraTimings& h,
               const SubarrayPairsTable& spt, const HiraMcConfig& cfg)
    : g_(g),
      t_(t),
      h_(h),
      spt_(spt),
      cfg_(cfg),
      slack_(static_cast<Picos>(cfg.slack_rc_multiples) * t.t_rc),
      deadline_offset_(std::max(slack_, t.t_rc + t.t_faw + 4 * t.t_cmd)),
      guard_(4 * t.t_cmd),
      occupancy_(ceil_div(h.t1 + h.t2 + t.t_ras, t.t_cmd) * t.t_cmd + ceil_div(t.t_rp, t.t_cmd) * t.t_cmd),
      act_gap_(ceil_div(t.t_faw, 4 * t.t_cmd) * t.t_cmd),
      plan_(plan_periodic(g, t, deadline_offset_)),
      table_cap_(refresh_table_capacity(g, t, deadline_offset_, plan_.stagger)),
      fifo_cap_(pr_fifo_capacity(t, slack_)),
      refptr_(g.total_banks(), g.subarrays_per_bank, g.rows_per_subarray()),
      ranks_(std::size_t{g.channels} * g.ranks_per_channel),
      next_gen_(g.total_banks()),
      fifo_(g.total_banks(), 0) {
  h_.validate(t_);
  if (spt_.subarrays() != g.subarrays_per_bank) throw ConfigError("hira: SPT size does not match subarrays_per_bank");
  for (std::uint32_t fb = 0; fb < g.total_banks(); ++fb) next_gen_[fb] = (fb % g.banks_per_rank) * plan_.stagger;
}

std::size_t HiraMc::pending() const {
  std::size_t n = 0;
  for (const auto& r : ranks_) n += r.entries.size();
  return n;
}

bool HiraMc::urgent_entry(const RefreshRequest& e, Picos now) const {
  return e.forced || e.due - now <= t_.t_rp + t_.t_faw + guard_;
}

void HiraMc::update_due(Rank& rank) const {
  // Entries of one bank are served one after another, and the rank issues
  // at most four ACTs per tFAW, so each entry must start early enough for
  // the entries queued behind it. Both passes only move `due` earlier and
  // keep the order of the entries they touch, so alternating them settles.
  for (auto& e : rank.entries) e.due = e.deadline;
  std::vector<std::size_t> order(rank.entries.size());
  std::vector<std::pair<memctrl::BankRef, Picos>> next;
  for (bool changed = true; changed;) {
    changed = false;
    next.clear();
    for (auto it = rank.entries.rbegin(); it != rank.entries.rend(); ++it) {
      auto n = std::find_if(next.begin(), next.end(), [&](const auto& x) { return x.first == it->bank; });
      if (n == next.end()) {
        next.emplace_back(it->bank, it->due);
        continue;
      }
      if (n->second - occupancy_ < it->due) {
        it->due = n->second - occupancy_;
        changed = true;
      }
      n->second = it->due;
    }
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return rank.entries[a].due != rank.entries[b].due ? rank.entries[a].due > rank.entries[b].due : a > b;
    });
    for (std::size_t k = 1; k < order.size(); ++k) {
      Picos& d = rank.entries[order[k]].due;
      const Picos limit = rank.entries[order[k - 1]].due - act_gap_;
      if (limit < d) {
        d = limit;
        changed = true;
      }
    }
  }
}

void HiraMc::erase(Rank& rank, std::size_t i) {
  rank.entries.erase(rank.entries.begin() + static_cast<std::ptrdiff_t>(i));
  update_due(rank);
}

void HiraMc::insert(RefreshRequest e) {
  Rank& r = ranks_[rank_index(e.bank)];
  auto pos = std::upper_bound(r.entries.begin(), r.entries.end(), e.deadline,
                              [](Picos d, const RefreshRequest& x) { return d < x.deadline; });
  r.entries.insert(pos, e);
  update_due(r);
  const auto live = static_cast<std::uint32_t>(
      std::count_if(r.entries.begin(), r.entries.end(), [](const RefreshRequest& x) { return !x.forced; }));
  max_table_ = std::max(max_table_, live);
  if (live > table_cap_) throw InvariantError("hira: Refresh Table overflow");
}

void HiraMc::on_tick(Picos now, const memctrl::ControllerView& /*view*/) {
  for (std::uint32_t fb = 0; fb < next_gen_.size(); ++fb) {
    while (next_gen_[fb] <= now) {
      const std::uint32_t per_rank = g_.banks_per_rank;
      const memctrl::BankRef b{fb / (per_rank * g_.ranks_per_channel), (fb / per_rank) % g_.ranks_per_channel,
                               fb % per_rank};
      insert({next_gen_[fb], next_gen_[fb] + deadline_offset_, b, RefreshKind::Periodic, std::nullopt, false});
      ++n_.periodic_generated;
      next_gen_[fb] += plan_.period;
    }
  }
}

void HiraMc::preventive_enqueue(const memctrl::BankRef& bank, dram::RowId victim, Picos now) {
  const std::uint32_t fb = dram::flat_bank(g_, bank);
  if (fifo_[fb] >= fifo_cap_) {
    Rank& r = ranks_[rank_index(bank)];
    auto oldest = std::min_element(r.entries.begin(), r.entries.end(), [&](const auto& a, const auto& b) {
      auto key = [&](const RefreshRequest& x) {
        const bool mine = x.bank == bank && x.kind == RefreshKind::Preventive && !x.forced;
        return mine ? x.generated : kNever;
      };
      return key(a) < key(b);
    });
    oldest->forced = true;
    --fifo_[fb];
    ++n_.forced;
  }
  insert({now, now + deadline_offset_, bank, RefreshKind::Preventive, victim, false});
  ++fifo_[fb];
  max_fifo_ = std::max(max_fifo_, fifo_[fb]);
  ++n_.preventive_generated;
}

void HiraMc::performed(const RefreshRequest& e, Picos at) {
  ++n_.performed;
  if (at > e.deadline) {
    ++deadline_misses_;
    max_lateness_ = std::max(max_lateness_, at - e.deadline);
  }
  if (e.kind == RefreshKind::Preventive && !e.forced) --fifo_[dram::flat_bank(g_, e.bank)];
}

bool HiraMc::bank_reserved(const Rank& rank, const memctrl::BankRef& bank, Picos now, Picos extra,
                           std::optional<std::size_t> skip) const {
  // True if an ACT now would leave some queued refresh of `bank` unable to
  // close the row and activate before its deadline.
  for (std::size_t i = 0; i < rank.entries.size(); ++i) {
    const RefreshRequest& e = rank.entries[i];
    if (e.bank != bank || (skip && *skip == i)) continue;
    if (e.forced || e.due - now < extra + t_.t_rc + t_.t_faw + guard_) return true;
  }
  return false;
}

std::optional<DramCommand> HiraMc::urgent(std::uint32_t channel, Picos now, const memctrl::ControllerView& view) {
  // Close rows that were opened only to be refreshed.
  for (std::uint32_t r = 0; r < g_.ranks_per_channel; ++r) {
    for (std::uint32_t b = 0; b < g_.banks_per_rank; ++b) {
      const memctrl::BankRef bank{channel, r, b};
      if (!view.open_for_refresh(bank)) continue;
      auto pre = DramCommand::pre(bank, CommandPurpose::PeriodicRefresh);
      if (view.earliest(pre, now) <= now) return pre;
    }
  }

  for (std::uint32_t r = 0; r < g_.ranks_per_channel; ++r) {
    Rank& rank = ranks_[channel * g_.ranks_per_channel + r];
    std::uint64_t seen = 0;  // banks already considered this slot
    for (std::size_t i = 0; i < rank.entries.size(); ++i) {
      const RefreshRequest e = rank.entries[i];
      if (!urgent_entry(e, now)) continue;
      if (seen & (std::uint64_t{1} << (e.bank.bank % 64))) continue;
      seen |= std::uint64_t{1} << (e.bank.bank % 64);
      const auto& bs = view.rank(channel, r).bank(e.bank.bank);
      if (bs.is_open()) {
        if (view.open_for_refresh(e.bank)) continue;
        auto pre = DramCommand::pre(e.bank);
        if (view.earliest(pre, now) <= now) return pre;
        continue;
      }
      const CommandPurpose why =
          e.kind == RefreshKind::Periodic ? CommandPurpose::PeriodicRefresh : CommandPurpose::PreventiveRefresh;
      if (view.earliest(DramCommand::act(e.bank, 0, why), now) > now) continue;
      const bool hira_ok = view.earliest(DramCommand::hira(e.bank, 0, 0, true, why), now) <= now;
      const std::uint32_t fb = dram::flat_bank(g_, e.bank);

      dram::RowId r1;
      if (e.kind == RefreshKind::Periodic) {
        r1 = refptr_.advance(fb, *refptr_.pick(fb, [](std::uint32_t) { return true; }));
      } else {
        r1 = *e.target;
      }
      const std::uint32_t s1 = subarray_of(r1);

      // Refresh-refresh: another queued refresh of this bank in an isolated subarray.
      if (hira_ok) {
        for (std::size_t j = 0; j < rank.entries.size(); ++j) {
          if (j == i || rank.entries[j].bank != e.bank) continue;
          const RefreshRequest e2 = rank.entries[j];
          std::optional<dram::RowId> r2;
          if (e2.kind == RefreshKind::Periodic) {
            if (auto s2 = refptr_.pick(fb, [&](std::uint32_t s) { return spt_.can_pair(s, s1); })) {
              r2 = refptr_.advance(fb, *s2);
            }
          } else if (spt_.can_pair(subarray_of(*e2.target), s1)) {
            r2 = e2.target;
          }
          if (!r2) continue;
          performed(e, now);
          performed(e2, now + h_.t1 + h_.t2);
          rank.entries.erase(rank.entries.begin() + static_cast<std::ptrdiff_t>(std::max(i, j)));
          erase(rank, std::min(i, j));
          ++n_.refresh_refresh;
          return DramCommand::hira(e.bank, r1, *r2, true, why);
        }
      }
      performed(e, now);
      erase(rank, i);
      ++n_.plain;
      return DramCommand::act(e.bank, r1, why);
    }
  }
  return std::nullopt;
}

memctrl::ActVerdict HiraMc::demand_act(const DramCommand& act, Picos now, const memctrl::ControllerView& view) {
  Rank& rank = ranks_[rank_index(act.bank)];
  for (const auto& e : rank.entries) {
    // Keep the rank's tFAW budget free for a refresh about to be due.
    if (e.forced || e.due - now <= t_.t_faw + guard_) return {false, std::nullopt};
  }
  if (act.purpose != CommandPurpose::Demand) return {!bank_reserved(rank, act.bank, now, 0, std::nullopt), std::nullopt};

  auto first = std::find_if(rank.entries.begin(), rank.entries.end(),
                            [&](const RefreshRequest& e) { return e.bank == act.bank; });
  if (first != rank.entries.end()) {
    const std::size_t idx = static_cast<std::size_t>(first - rank.entries.begin());
    const RefreshRequest e = *first;
    const CommandPurpose why =
        e.kind == RefreshKind::Periodic ? CommandPurpose::PeriodicRefresh : CommandPurpose::PreventiveRefresh;
    const std::uint32_t access_sub = subarray_of(act.row);
    const std::uint32_t fb = dram::flat_bank(g_, act.bank);
    if (view.earliest(DramCommand::hira(act.bank, 0, act.row, false, why), now) <= now &&
        !bank_reserved(rank, act.bank, now, h_.t1 + h_.t2, idx)) {
      std::optional<dram::RowId> row;
      if (e.kind == RefreshKind::Periodic) {
        if (auto s = refptr_.pick(fb, [&](std::uint32_t s) { return spt_.can_pair(s, access_sub); })) {
          row = refptr_.advance(fb, *s);
        }
      } else if (spt_.can_pair(subarray_of(*e.target), access_sub)) {
        row = e.target;
      }
      if (row) {
        performed(e, now);
        erase(rank, idx);
        ++n_.hidden_refresh_access;
        return {true, DramCommand::hira(act.bank, *row, act.row, false, why)};
      }
    }
  }
  return {!bank_reserved(rank, act.bank, now, 0, std::nullopt), std::nullopt};
}

Picos HiraMc::next_wakeup(Picos now) const {
  if (pending() > 0) return now;
  return *std::min_element(next_gen_.begin(), next_gen_.end());
}

void HiraMc::finish(Picos end) {
  for (const auto& r : ranks_) {
    for (const auto& e : r.entries) {
      if (e.deadline < end) ++deadline_misses_;
    }
  }
}

void HiraMc::write_stats(nlohmann::json& out) const {
  out["refresh"] = {
      {"engine", "hira_mc"},
      {"slack_ps", slack_},
      {"deadline_offset_ps", deadline_offset_},
      {"period_ps", plan_.period},
      {"stagger_ps", plan_.stagger},
      {"table_capacity", table_cap_},
      {"max_table_occupancy", max_table_},
      {"pr_fifo_capacity", fifo_cap_},
      {"max_pr_fifo_occupancy", max_fifo_},
      {"periodic_generated", n_.periodic_generated},
      {"preventive_generated", n_.preventive_generated},
      {"forced", n_.forced},
      {"hidden_refresh_access", n_.hidden_refresh_access},
      {"refresh_refresh", n_.refresh_refresh},
      {"plain", n_.plain},
      {"performed", n_.performed},
      {"deadline_misses", deadline_misses_},
      {"max_lateness_ps", max_lateness_},
  };
}

}  // namespace disturb::hira
