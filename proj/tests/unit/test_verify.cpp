#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "disturbsim/common/rng.hpp"
#include "disturbsim/sim/simulator.hpp"
#include "disturbsim/verify/adversarial.hpp"
#include "disturbsim/verify/epoch_model.hpp"
#include "disturbsim/verify/window_oracle.hpp"

using namespace disturb;
using namespace disturb::verify;

namespace {

// Largest count of entries in [t_i, t_i + w) over all i, by direct scan.
std::uint64_t naive_window_max(const std::vector<Picos>& times, Picos w) {
  std::uint64_t best = 0;
  for (Picos a : times) {
    std::uint64_t n = 0;
    for (Picos b : times) n += b >= a && b - a < w;
    best = std::max(best, n);
  }
  return best;
}

// Per-epoch maxima straight from the epoch table, maximising over every N_BL*.
std::array<std::int64_t, 5> table_maxima(const EpochParams& p) {
  const long double ep = static_cast<long double>(p.t_cbf / 2);
  const long double td = static_cast<long double>(p.t_delay);
  std::int64_t t0 = 0, t2 = 0;
  for (std::int64_t star = 1; star <= p.n_bl; ++star) {
    t0 = std::max(t0, star - 1);
    const long double v = ep / td - (1.0L - static_cast<long double>(p.t_rc) / td) * star;
    t2 = std::max(t2, static_cast<std::int64_t>(std::floor(std::max(0.0L, v))));
  }
  return {t0, p.n_bl - 1, t2, p.n_bl - 1, static_cast<std::int64_t>(std::floor(ep / td))};
}

// Every n_0..n_4 with sum <= m, checked against the three constraints.
std::int64_t brute_force_best(const std::array<std::int64_t, 5>& e, std::int64_t m) {
  std::int64_t best = 0;
  for (std::int64_t a = 0; a <= m; ++a)
    for (std::int64_t b = 0; a + b <= m; ++b)
      for (std::int64_t c = 0; a + b + c <= m; ++c)
        for (std::int64_t d = 0; a + b + c + d <= m; ++d)
          for (std::int64_t f = 0; a + b + c + d + f <= m; ++f) {
            if (a + b + c > a + b + d + 1) continue;
            if (d + f > c + f + 1) continue;
            best = std::max(best, a * e[0] + b * e[1] + c * e[2] + d * e[3] + f * e[4]);
          }
  return best;
}

bool witness_ok(const Feasibility& f, const EpochParams& p) {
  const auto& n = f.n;
  std::int64_t sum = 0, acts = 0;
  for (int i = 0; i < 5; ++i) {
    if (n[i] < 0) return false;
    sum += n[i];
    acts += n[i] * f.n_ep_max[i];
  }
  return sum <= f.max_epochs && acts >= p.n_rh_star && n[2] <= n[3] + 1 && n[3] <= n[2] + 1;
}

sim::SimConfig scaled_base() {
  sim::SimConfig cfg;
  cfg.geometry.banks_per_rank = 8;
  cfg.geometry.subarrays_per_bank = 8;
  cfg.geometry.rows_per_bank = 512;
  cfg.timing.t_refw = us(640);
  cfg.timing.t_refi = us(5);
  cfg.mitigation.kind = sim::MitigationKind::BlockHammer;
  cfg.mitigation.n_rh = 64;
  cfg.mitigation.overrides.cbf_size = 1024;
  cfg.duration = 2 * cfg.timing.t_refw;
  cfg.seed = 21;
  cfg.verify = true;
  sim::WorkloadSpec w;
  w.type = sim::WorkloadType::Attack;
  w.attack = sim::AttackKind::DoubleSided;
  w.bank = {0, 0, 2};
  w.rows = {200, 202};
  w.interval = 0;
  cfg.workloads = {w};
  return cfg;
}

}  // namespace

TEST_CASE("window oracle matches a quadratic scan") {
  dram::Geometry g;
  g.rows_per_bank = 64;
  g.banks_per_rank = 1;
  const Picos w = us(10);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(seed);
    WindowOracle o(g, w);
    std::map<std::uint64_t, std::vector<Picos>> per_row;
    Picos t = 0;
    for (int i = 0; i < 10000; ++i) {
      t += static_cast<Picos>(rng.below(200)) * 50;  // repeats and exact-w gaps are both likely
      const auto row = rng.below(8);
      o.observe(row, t);
      per_row[row].push_back(t);
    }
    std::uint64_t expect = 0;
    for (const auto& [row, ts] : per_row) {
      const auto m = naive_window_max(ts, w);
      CHECK(o.row_max(row) == m);
      expect = std::max(expect, m);
    }
    CHECK(o.max_count() == expect);
    CHECK(o.observed() == 10000);
  }
}

TEST_CASE("window boundary: ACTs exactly t_refw apart do not share a window") {
  dram::Geometry g;
  WindowOracle o(g, 100);
  o.observe(3, 0);
  o.observe(3, 100);
  CHECK(o.max_count() == 1);
  o.observe(3, 199);
  CHECK(o.max_count() == 2);
}

TEST_CASE("epoch maxima match the table under exhaustive N_BL*") {
  for (std::int64_t n_rh : {64, 256, 1024, 32768}) {
    const auto cfg = blockhammer::derive_config(n_rh, blockhammer::AttackModel::double_sided(), {});
    const auto p = EpochParams::from(cfg);
    CHECK(max_epoch_acts(p) == table_maxima(p));
  }
  EpochParams fast{100, 50, us(100), ns(46.25), ns(46.25), us(100)};
  CHECK(max_epoch_acts(fast) == table_maxima(fast));
}

TEST_CASE("paper configuration is infeasible") {
  const auto cfg = blockhammer::derive_config(32768, blockhammer::AttackModel::double_sided(), {});
  const auto f = feasibility_check(cfg);
  CHECK_FALSE(f.feasible);
  CHECK(f.max_epochs == 2);
  CHECK(f.best_total == brute_force_best(f.n_ep_max, f.max_epochs));
  CHECK(f.best_total < cfg.n_rh_star);
}

TEST_CASE("scaled configuration is infeasible") {
  dram::TimingParams t;
  t.t_refw = us(640);
  blockhammer::Overrides o;
  o.cbf_size = 1024;
  const auto cfg = blockhammer::derive_config(64, blockhammer::AttackModel::double_sided(), t, o);
  const auto f = feasibility_check(cfg);
  CHECK_FALSE(f.feasible);
  CHECK(f.best_total == brute_force_best(f.n_ep_max, f.max_epochs));
}

TEST_CASE("sabotaged configurations are feasible with a valid witness") {
  const auto cfg = blockhammer::derive_config(32768, blockhammer::AttackModel::double_sided(), {});
  auto p = EpochParams::from(cfg);
  p.t_delay = p.t_rc;  // throttling no longer slows anything down
  auto f = feasibility_check(p);
  CHECK(f.feasible);
  CHECK(witness_ok(f, p));

  p = EpochParams::from(cfg);
  p.n_bl = p.n_rh_star + 1;  // blacklisting threshold above the safe count
  f = feasibility_check(p);
  CHECK(f.feasible);
  CHECK(witness_ok(f, p));
}

TEST_CASE("a threshold of one activation is always reachable") {
  EpochParams p{1, 1, ms(64), us(7), ns(46.25), ms(64)};
  const auto f = feasibility_check(p);
  CHECK(f.feasible);
  CHECK(witness_ok(f, p));
}

TEST_CASE("search matches brute force on small random parameter sets") {
  Rng rng(99);
  for (int i = 0; i < 200; ++i) {
    EpochParams p;
    p.t_rc = ns(46.25);
    p.n_bl = 1 + static_cast<std::int64_t>(rng.below(40));
    p.n_rh_star = 1 + static_cast<std::int64_t>(rng.below(200));
    p.t_cbf = us(2) * (1 + static_cast<Picos>(rng.below(20)));
    p.t_refw = p.t_cbf / 2 * (1 + static_cast<Picos>(rng.below(6)));
    p.t_delay = p.t_rc + static_cast<Picos>(rng.below(static_cast<std::uint64_t>(us(2))));
    const auto f = feasibility_check(p);
    REQUIRE(f.best_total == brute_force_best(f.n_ep_max, f.max_epochs));
    CHECK(f.feasible == (f.best_total >= p.n_rh_star));
    if (f.feasible) CHECK(witness_ok(f, p));
  }
}

TEST_CASE("without a mitigation the attack far exceeds the threshold") {
  auto cfg = scaled_base();
  cfg.mitigation.kind = sim::MitigationKind::None;
  sim::Simulator s(cfg);
  s.run();
  CHECK(s.window_oracle()->max_count() > 10 * 64);
}

TEST_CASE("observe-only BlockHammer leaves the ACT stream unchanged") {
  auto none = scaled_base();
  none.mitigation.kind = sim::MitigationKind::None;
  sim::Simulator a(none);
  const auto ra = a.run();
  auto obs = scaled_base();
  obs.mitigation.overrides.mode = blockhammer::Mode::ObserveOnly;
  sim::Simulator b(obs);
  const auto rb = b.run();
  CHECK(a.window_oracle()->max_count() == b.window_oracle()->max_count());
  CHECK(a.controller().stats().acts == b.controller().stats().acts);
  CHECK(ra.stats["requests"] == rb.stats["requests"]);
}

TEST_CASE("BlockHammer keeps every family under the scaled safe count") {
  const auto base = scaled_base();
  const auto cfg = blockhammer::derive_config(64, blockhammer::AttackModel::double_sided(), base.timing,
                                              base.mitigation.overrides);
  const auto rep = adversarial_search(base, all_families(), {1, 2});
  REQUIRE(rep.runs.size() == 2 * all_families().size());
  for (const auto& r : rep.runs) {
    INFO(to_string(r.family) << " seed " << r.seed);
    CHECK(r.max_window <= static_cast<std::uint64_t>(cfg.n_rh_star));
    CHECK(r.violations == 0);
    CHECK(r.demand_acts > 0);
  }
}
