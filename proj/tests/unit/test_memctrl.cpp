#include "doctest.h"

#include <vector>

#include "disturbsim/memctrl/controller.hpp"
#include "disturbsim/memctrl/refresh.hpp"
#include "disturbsim/sim/simulator.hpp"

using namespace disturb;
using namespace disturb::memctrl;
using dram::CommandKind;

namespace {

struct Recorder : CommandListener {
  std::vector<dram::IssuedCommand> cmds;
  std::vector<MemoryRequest> done;
  void on_command(const dram::IssuedCommand& c) override { cmds.push_back(c); }
  void on_request_done(const MemoryRequest& r) override { done.push_back(r); }
};

dram::Geometry small_geometry() {
  dram::Geometry g;
  g.banks_per_rank = 4;
  g.subarrays_per_bank = 4;
  g.rows_per_bank = 256;
  g.columns_per_row = 64;
  return g;
}

MemoryRequest req(std::uint64_t id, std::uint32_t bank, dram::RowId row, std::uint32_t col = 0,
                  std::uint32_t thread = 0) {
  MemoryRequest r;
  r.id = id;
  r.thread = thread;
  r.addr.bank = bank;
  r.addr.row = row;
  r.addr.column = col;
  return r;
}

void run_slots(Controller& c, Picos& now, int slots) {
  for (int i = 0; i < slots; ++i) {
    c.tick(now);
    now += ns(2.5);
  }
}

struct AlwaysUnsafe : Mitigation {
  ActDecision is_act_safe(const BankRef&, RowId, Picos now) override { return ActDecision::Unsafe(now + 1); }
};

struct QuotaOne : Mitigation {
  bool admit(std::uint32_t, const BankRef&, std::uint32_t in_flight) override { return in_flight < 1; }
};

}  // namespace

TEST_CASE("FR-FCFS serves a younger row hit before an older conflict") {
  const auto g = small_geometry();
  Recorder rec;
  Controller c(g, {}, {}, {}, nullptr, nullptr, &rec);
  Picos now = 0;
  REQUIRE(c.enqueue(req(0, 1, 5), now));
  run_slots(c, now, 40);
  REQUIRE(rec.done.size() == 1);
  rec.cmds.clear();
  REQUIRE(c.enqueue(req(1, 1, 9), now));
  REQUIRE(c.enqueue(req(2, 1, 5, 3), now));
  run_slots(c, now, 100);
  REQUIRE(rec.done.size() == 3);
  CHECK(rec.done[1].id == 2);
  CHECK(rec.done[2].id == 1);
  REQUIRE(!rec.cmds.empty());
  CHECK(rec.cmds.front().cmd.kind == CommandKind::Rd);
  CHECK(c.stats().row_hits == 1);
  CHECK(c.stats().row_conflicts == 1);
  CHECK(c.stats().row_misses == 1);
}

TEST_CASE("column cap bounds hits while a conflict waits") {
  const auto g = small_geometry();
  Recorder rec;
  SchedulerConfig cfg;
  cfg.column_cap = 16;
  Controller c(g, {}, {}, cfg, nullptr, nullptr, &rec);
  Picos now = 0;
  REQUIRE(c.enqueue(req(0, 0, 5), now));
  REQUIRE(c.enqueue(req(1, 0, 9), now));
  for (std::uint64_t i = 0; i < 20; ++i) REQUIRE(c.enqueue(req(2 + i, 0, 5, static_cast<std::uint32_t>(i + 1)), now));
  run_slots(c, now, 400);
  int reads_before_pre = 0;
  for (const auto& ic : rec.cmds) {
    if (ic.cmd.kind == CommandKind::Pre) break;
    reads_before_pre += ic.cmd.kind == CommandKind::Rd;
  }
  CHECK(reads_before_pre == 16);
  CHECK(rec.done.size() == 22);
}

TEST_CASE("a mitigation that never allows an ACT stops all activations") {
  const auto g = small_geometry();
  Recorder rec;
  AlwaysUnsafe m;
  Controller c(g, {}, {}, {}, &m, nullptr, &rec);
  Picos now = 0;
  REQUIRE(c.enqueue(req(0, 2, 7), now));
  run_slots(c, now, 1000);
  CHECK(rec.cmds.empty());
  CHECK(c.stats().acts == 0);
  CHECK(c.stats().blocked_acts == 1);
  CHECK(c.queued() == 1);
}

TEST_CASE("full queues and quotas reject requests") {
  const auto g = small_geometry();
  SchedulerConfig cfg;
  cfg.read_queue_len = 2;
  Controller c(g, {}, {}, cfg, nullptr, nullptr, nullptr);
  CHECK(c.enqueue(req(0, 0, 1), 0));
  CHECK(c.enqueue(req(1, 1, 1), 0));
  CHECK_FALSE(c.enqueue(req(2, 2, 1), 0));
  CHECK(c.stats().rejected_full == 1);

  QuotaOne q;
  Controller d(g, {}, {}, {}, &q, nullptr, nullptr);
  CHECK(d.enqueue(req(0, 0, 1, 0, 3), 0));
  CHECK_FALSE(d.enqueue(req(1, 0, 2, 0, 3), 0));
  CHECK(d.enqueue(req(2, 1, 2, 0, 3), 0));
  CHECK(d.enqueue(req(3, 0, 2, 0, 4), 0));
  CHECK(d.stats().rejected_quota == 1);
  CHECK(d.in_flight(3, {0, 0, 0}) == 1);
}

TEST_CASE("all-bank refresh issues t_refw / t_refi REFs per window and covers every row") {
  sim::SimConfig cfg;
  cfg.duration = ms(64) + ns(2.5);
  cfg.seed = 1;
  cfg.verify = true;
  sim::Simulator s(cfg);
  const auto res = s.run();
  CHECK(s.controller().stats().refs == 8192);
  CHECK(res.violations == 0);
  CHECK(s.coverage()->violations() == 0);
  CHECK(s.coverage()->max_gap() == ms(64));
  auto* ref = dynamic_cast<AllBankRefresh*>(s.refresh());
  REQUIRE(ref);
  CHECK(ref->rows_per_ref() == 8);
  CHECK(ref->max_lateness() == 0);
}

TEST_CASE("REFs stay on time under saturating traffic") {
  sim::SimConfig cfg;
  cfg.geometry = small_geometry();
  cfg.timing.t_refw = us(500);
  cfg.timing.t_refi = us(3.90625);
  cfg.duration = us(1500);
  cfg.seed = 3;
  cfg.verify = true;
  sim::WorkloadSpec w;
  w.interval = ns(4);
  w.row_hit = 0.3;
  cfg.workloads = {w};
  sim::Simulator s(cfg);
  const auto res = s.run();
  CHECK(res.violations == 0);
  CHECK(s.validator()->clean());
  CHECK(s.coverage()->violations() == 0);
  // t_refi is not a multiple of the command slot, so a REF may wait for the next slot.
  CHECK(dynamic_cast<AllBankRefresh*>(s.refresh())->max_lateness() < cfg.timing.t_cmd);
  // Due times k * t_refi for k = 1..383 fall before the end of the run.
  CHECK(s.controller().stats().refs == 383);
  CHECK(s.validator()->max_acts_in_faw_window() <= 4);
}

TEST_CASE("closed row policy closes banks with no pending hits") {
  const auto g = small_geometry();
  Recorder rec;
  SchedulerConfig cfg;
  cfg.row_policy = RowPolicy::Closed;
  Controller c(g, {}, {}, cfg, nullptr, nullptr, &rec);
  Picos now = 0;
  REQUIRE(c.enqueue(req(0, 3, 4), now));
  run_slots(c, now, 100);
  REQUIRE(rec.cmds.size() == 3);
  CHECK(rec.cmds[0].cmd.kind == CommandKind::Act);
  CHECK(rec.cmds[1].cmd.kind == CommandKind::Rd);
  CHECK(rec.cmds[2].cmd.kind == CommandKind::Pre);
  CHECK(c.idle());
}
