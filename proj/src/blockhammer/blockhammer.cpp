#include "disturbsim/blockhammer/blockhammer.hpp"

#include <algorithm>

namespace disturb::blockhammer {

BlockHammer::BlockHammer(const BlockHammerConfig& cfg, const dram::Geometry& g, std::uint64_t seed)
    : cfg_(cfg),
      g_(g),
      throttler_(cfg.rhli_denominator(), cfg.throttle_saturation(), cfg.q_max),
      rng_(derive_seed(seed, "blockhammer/reseed")),
      next_swap_(cfg.t_cbf / 2) {
  cfg_.validate();
  const unsigned width = cfg_.counter_width();
  for (std::uint32_t b = 0; b < g.total_banks(); ++b) {
    dcbf_.emplace_back(cfg_.cbf_size, width, cfg_.t_cbf / 2, derive_seed(seed, "blockhammer/dcbf/" + std::to_string(b)));
  }
  for (std::uint32_t r = 0; r < g.channels * g.ranks_per_channel; ++r) hb_.emplace_back(cfg_.hb_capacity, cfg_.t_delay);
}

void BlockHammer::on_tick(Picos now) {
  while (now >= next_swap_) {
    for (auto& d : dcbf_) d.clear_and_swap(next_swap_, rng_);
    throttler_.swap();
    ++swaps_;
    next_swap_ += cfg_.t_cbf / 2;
  }
}

bool BlockHammer::blacklisted(const memctrl::BankRef& bank, dram::RowId row) const {
  return dcbf(bank).test(row) >= static_cast<std::uint32_t>(cfg_.n_bl);
}

double BlockHammer::rhli(std::uint32_t thread, const memctrl::BankRef& bank) const {
  return throttler_.rhli(thread, dram::flat_bank(g_, bank));
}

std::uint32_t BlockHammer::quota(std::uint32_t thread, const memctrl::BankRef& bank) const {
  return throttler_.quota(thread, dram::flat_bank(g_, bank));
}

bool BlockHammer::admit(std::uint32_t thread, const memctrl::BankRef& bank, std::uint32_t in_flight) {
  if (cfg_.mode == Mode::ObserveOnly) return true;
  return in_flight < quota(thread, bank);
}

memctrl::ActDecision BlockHammer::is_act_safe(const memctrl::BankRef& bank, dram::RowId row, Picos now) {
  if (cfg_.mode == Mode::ObserveOnly || !blacklisted(bank, row)) return memctrl::ActDecision::Safe();
  auto& hb = hb_[bank.channel * g_.ranks_per_channel + bank.rank];
  if (auto last = hb.last_valid(row_key(bank, row), now)) return memctrl::ActDecision::Unsafe(*last + cfg_.t_delay);
  return memctrl::ActDecision::Safe();
}

void BlockHammer::on_act(const memctrl::BankRef& bank, dram::RowId row, std::uint32_t thread, Picos now) {
  const bool was_blacklisted = blacklisted(bank, row);
  dcbf_[dram::flat_bank(g_, bank)].insert(row);
  hb_[bank.channel * g_.ranks_per_channel + bank.rank].push(row_key(bank, row), now);
  if (was_blacklisted) {
    ++blacklisted_acts_;
    throttler_.record_blacklisted_act(thread, dram::flat_bank(g_, bank));
  }
}

Picos BlockHammer::next_wakeup(Picos /*now*/) const { return next_swap_; }

std::uint32_t BlockHammer::max_history_occupancy() const {
  std::uint32_t m = 0;
  for (const auto& h : hb_) m = std::max(m, h.max_occupancy());
  return m;
}

void BlockHammer::write_stats(nlohmann::json& out) const {
  nlohmann::json rhli = nlohmann::json::object();
  for (const auto& [key, counts] : throttler_.counters()) {
    const double v = static_cast<double>(counts[throttler_.active_index()]) / throttler_.denominator();
    rhli[std::to_string(key.first) + ":" + std::to_string(key.second)] = v;
  }
  out["blockhammer"] = {
      {"mode", cfg_.mode == Mode::ObserveOnly ? "observe" : "full"},
      {"n_rh", cfg_.n_rh},
      {"n_rh_star", cfg_.n_rh_star},
      {"n_bl", cfg_.n_bl},
      {"t_delay_ps", cfg_.t_delay},
      {"hb_capacity", cfg_.hb_capacity},
      {"hb_max_occupancy", max_history_occupancy()},
      {"blacklisted_acts", blacklisted_acts_},
      {"filter_swaps", swaps_},
      {"rhli", rhli},
  };
}

}  // namespace disturb::blockhammer
