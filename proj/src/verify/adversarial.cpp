#include "disturbsim/verify/adversarial.hpp"

#include <algorithm>

#include "disturbsim/blockhammer/blockhammer.hpp"
#include "disturbsim/common/rng.hpp"
#include "disturbsim/sim/simulator.hpp"

namespace disturb::verify {

std::string to_string(Family f) {
  switch (f) {
    case Family::Single: return "single";
    case Family::DoubleSided: return "double_sided";
    case Family::ManySided: return "many_sided";
    case Family::BurstIdle: return "burst_idle";
    case Family::AliasProbe: return "alias_probe";
  }
  return "?";
}

const std::vector<Family>& all_families() {
  static const std::vector<Family> f{Family::Single, Family::DoubleSided, Family::ManySided, Family::BurstIdle,
                                     Family::AliasProbe};
  return f;
}

sim::WorkloadSpec attack_pattern(Family f, const sim::SimConfig& base, std::uint64_t seed) {
  const auto& g = base.geometry;
  Rng rng(derive_seed(seed, "adversarial/" + to_string(f)));
  sim::WorkloadSpec w;
  w.type = sim::WorkloadType::Attack;
  w.thread = 0;
  w.interval = 0;
  w.outstanding = 1;
  w.bank = {static_cast<std::uint32_t>(rng.below(g.channels)), static_cast<std::uint32_t>(rng.below(g.ranks_per_channel)),
            static_cast<std::uint32_t>(rng.below(g.banks_per_rank))};
  const std::uint32_t margin = std::min<std::uint32_t>(16, g.rows_per_bank / 4);
  const auto victim = static_cast<dram::RowId>(margin + rng.below(g.rows_per_bank - 2 * margin));

  std::int64_t n_bl = 64;
  Picos epoch = base.timing.t_refw / 2;
  if (base.mitigation.kind == sim::MitigationKind::BlockHammer) {
    const auto cfg = blockhammer::derive_config(base.mitigation.n_rh, base.mitigation.attack, base.timing,
                                                base.mitigation.overrides);
    n_bl = cfg.n_bl;
    epoch = cfg.t_cbf / 2;
  }

  switch (f) {
    case Family::Single:
      w.attack = sim::AttackKind::Single;
      w.rows = {victim};
      break;
    case Family::DoubleSided:
      w.attack = sim::AttackKind::DoubleSided;
      w.rows = {victim - 1, victim + 1};
      break;
    case Family::ManySided: {
      w.attack = sim::AttackKind::ManySided;
      const auto n = static_cast<std::uint32_t>(3 + rng.below(6));
      for (std::uint32_t i = 0; i < n && victim + 2 * i < g.rows_per_bank; ++i) w.rows.push_back(victim + 2 * i);
      break;
    }
    case Family::BurstIdle:
      // Double-sided bursts just under the blacklisting threshold, separated
      // by idle gaps that move the bursts across filter swaps.
      w.attack = sim::AttackKind::BurstIdle;
      w.rows = {victim - 1, victim + 1};
      w.burst = static_cast<std::uint32_t>(std::max<std::int64_t>(2, 2 * (n_bl - 1)));
      w.idle = static_cast<Picos>(rng.below(static_cast<std::uint64_t>(std::max<Picos>(1, epoch))));
      break;
    case Family::AliasProbe: {
      // The aggressor interleaved with companion rows that share its filter
      // counters where any can be found, random rows otherwise.
      w.attack = sim::AttackKind::ManySided;
      const dram::RowId aggressor = victim;
      std::vector<dram::RowId> companions;
      if (base.mitigation.kind == sim::MitigationKind::BlockHammer) {
        const auto cfg = blockhammer::derive_config(base.mitigation.n_rh, base.mitigation.attack, base.timing,
                                                    base.mitigation.overrides);
        blockhammer::BlockHammer probe(cfg, g, derive_seed(base.seed, "mitigation"));
        const auto& filter = probe.dcbf(w.bank).active();
        const std::uint64_t key_base = std::uint64_t{w.bank.bank} * g.rows_per_bank;
        for (dram::RowId r = 0; r < g.rows_per_bank && companions.size() < 8; ++r) {
          if (r != aggressor && filter.aliases(key_base + aggressor, key_base + r)) companions.push_back(r);
        }
      }
      while (companions.size() < 8) {
        const auto r = static_cast<dram::RowId>(rng.below(g.rows_per_bank));
        if (r != aggressor) companions.push_back(r);
      }
      for (auto c : companions) {
        w.rows.push_back(aggressor);
        w.rows.push_back(c);
      }
      break;
    }
  }
  return w;
}

AdversarialReport adversarial_search(const sim::SimConfig& base, const std::vector<Family>& families,
                                     const std::vector<std::uint64_t>& seeds) {
  AdversarialReport rep;
  for (Family f : families) {
    for (std::uint64_t seed : seeds) {
      sim::SimConfig c = base;
      c.seed = derive_seed(base.seed, "adversarial/" + std::to_string(seed));
      c.verify = true;
      c.workloads = {attack_pattern(f, c, seed)};
      if (f == Family::Single) c.scheduler.row_policy = memctrl::RowPolicy::Closed;
      sim::Simulator s(c);
      const auto res = s.run();
      AdversarialRun run;
      run.family = f;
      run.seed = seed;
      run.max_window = s.window_oracle()->max_count();
      run.max_row = s.window_oracle()->max_row();
      run.demand_acts = s.controller().stats().demand_acts;
      run.violations = res.violations;
      rep.max_window = std::max(rep.max_window, run.max_window);
      rep.runs.push_back(run);
    }
  }
  return rep;
}

}  // namespace disturb::verify
