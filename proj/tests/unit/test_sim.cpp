#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "disturbsim/common/errors.hpp"
#include "disturbsim/common/rng.hpp"
#include "disturbsim/sim/simulator.hpp"
#include "disturbsim/sim/stats.hpp"
#include "disturbsim/sim/sweep.hpp"
#include "disturbsim/sim/trace.hpp"

using namespace disturb;
using namespace disturb::sim;
using nlohmann::json;

namespace {

std::filesystem::path tmp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

json base_json() {
  return json::parse(R"({
    "dram": {
      "geometry": {"banks_per_rank": 8, "subarrays_per_bank": 8, "rows_per_bank": 512, "columns_per_row": 256},
      "timing": {"t_refw_ns": 500000, "t_refi_ns": 3906.25}
    },
    "mitigation": {"kind": "para"},
    "workload": [
      {"type": "random", "thread": 0, "interval_ns": 25, "row_hit": 0.5},
      {"type": "stream", "thread": 1, "interval_ns": 60},
      {"type": "attack", "thread": 2, "kind": "double_sided", "bank": 1, "rows": [40, 42]}
    ],
    "sim": {"duration_ns": 300000, "seed": 3, "verify": true}
  })");
}

std::string run_dump(const json& j) {
  Simulator s(SimConfig::from_json(j));
  return dump_stats(s.run().stats);
}

std::string config_error(const json& j) {
  try {
    SimConfig::from_json(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("identical config and seed give byte-identical stats") {
  for (const char* kind : {"none", "para", "blockhammer", "svard_para"}) {
    auto j = base_json();
    j["mitigation"]["kind"] = kind;
    CHECK(run_dump(j) == run_dump(j));
  }
  auto j = base_json();
  j["refresh"] = {{"scheme", "hira"}};
  j["mitigation"] = {{"kind", "hira_mc"}};
  CHECK(run_dump(j) == run_dump(j));
  auto other = base_json();
  other["sim"]["seed"] = 4;
  CHECK(run_dump(base_json()) != run_dump(other));
}

TEST_CASE("sweep results equal sequential runs, in order") {
  const auto base = base_json();
  std::vector<json> points;
  for (int s = 1; s <= 4; ++s) points.push_back({{"sim", {{"seed", s}}}});
  const auto res = run_sweep(base, points);
  REQUIRE(res.size() == 4);
  for (int s = 1; s <= 4; ++s) {
    auto j = base;
    j["sim"]["seed"] = s;
    CHECK(dump_stats(res[s - 1].stats) == run_dump(j));
  }
}

TEST_CASE("runs conserve requests and keep column accounting consistent") {
  for (const char* kind : {"none", "para", "blockhammer"}) {
    auto j = base_json();
    j["mitigation"]["kind"] = kind;
    Simulator s(SimConfig::from_json(j));
    const auto r = s.run();
    const auto& q = r.stats["requests"];
    CHECK(q["conserved"] == true);
    CHECK(q["offered"].get<std::uint64_t>() ==
          q["served"].get<std::uint64_t>() + q["in_flight"].get<std::uint64_t>() +
              q["rejected_final"].get<std::uint64_t>());
    CHECK(r.violations == 0);
    CHECK(r.stats["verify"]["min_restore_ps"].get<Picos>() >= s.config().timing.t_ras);
  }
}

TEST_CASE("observe-only BlockHammer issues the same commands as no mitigation") {
  auto none = base_json();
  none["mitigation"] = {{"kind", "none"}};
  auto obs = base_json();
  obs["mitigation"] = {{"kind", "blockhammer"}, {"n_rh", 1024}, {"mode", "observe"}};
  Simulator a(SimConfig::from_json(none));
  Simulator b(SimConfig::from_json(obs));
  const auto ra = a.run();
  const auto rb = b.run();
  CHECK(ra.stats["controller"] == rb.stats["controller"]);
  CHECK(ra.stats["threads"] == rb.stats["threads"]);
}

TEST_CASE("benign traffic is never blocked") {
  auto j = base_json();
  j["mitigation"] = {{"kind", "blockhammer"}, {"n_rh", 1024}};
  j["workload"] = json::array({{{"type", "random"}, {"thread", 0}, {"interval_ns", 25}, {"row_hit", 0.5}},
                               {{"type", "stream"}, {"thread", 1}, {"interval_ns", 40}}});
  Simulator s(SimConfig::from_json(j));
  const auto r = s.run();
  CHECK(s.controller().stats().blocked_acts == 0);
  CHECK(r.violations == 0);
}

TEST_CASE("trace write/read round trip") {
  const auto path = tmp("disturbsim_trace_rt.txt");
  std::vector<TraceRecord> recs;
  Rng rng(1);
  Picos t = 0;
  for (int i = 0; i < 1000000; ++i) {
    t += static_cast<Picos>(rng.below(5000));
    recs.push_back({t, static_cast<std::uint32_t>(rng.below(64)),
                    rng.bernoulli(0.3) ? memctrl::ReqKind::Write : memctrl::ReqKind::Read, rng.next_u64()});
  }
  {
    TraceWriter w(path.string());
    for (const auto& r : recs) w.write(r);
    w.close();
  }
  TraceReader rd(path.string());
  std::size_t i = 0;
  while (auto r = rd.next()) {
    REQUIRE(i < recs.size());
    REQUIRE(*r == recs[i]);
    ++i;
  }
  CHECK(i == recs.size());
  std::filesystem::remove(path);
}

TEST_CASE("trace parse errors carry the line number") {
  const auto path = tmp("disturbsim_trace_bad.txt");
  auto expect_line = [&](const std::string& body, long line) {
    {
      std::ofstream out(path);
      out << body;
    }
    TraceReader rd(path.string());
    try {
      while (rd.next()) {
      }
      FAIL("no ParseError for: " << body);
    } catch (const ParseError& e) {
      CHECK(e.line() == line);
    }
  };
  expect_line("# header\n100 0 R 0x40\n\n50 0 R 0x80\n", 4);
  expect_line("100 0 X 0x40\n", 1);
  expect_line("100 0 R\n", 1);
  expect_line("100 0 R 0xZZ\n", 1);
  expect_line("abc 0 R 0x40\n", 1);
  expect_line("100 0 R 0x40 extra\n", 1);
  std::filesystem::remove(path);
  CHECK_NOTHROW(parse_trace_line("0 3 W 1f", "x", 1));
  CHECK(parse_trace_line("10 3 W 0x1f", "x", 1) == TraceRecord{10, 3, memctrl::ReqKind::Write, 0x1f});
}

TEST_CASE("trace-driven run serves every request") {
  const auto path = tmp("disturbsim_trace_run.txt");
  const auto cfg0 = SimConfig::from_json(base_json());
  const auto map = dram::BitFieldMap::from_name(cfg0.address_map, cfg0.geometry);
  {
    TraceWriter w(path.string());
    Rng rng(2);
    for (int i = 0; i < 2000; ++i) {
      dram::DecodedAddress a;
      a.bank = static_cast<std::uint32_t>(rng.below(8));
      a.row = static_cast<dram::RowId>(rng.below(512));
      a.column = static_cast<std::uint32_t>(rng.below(256));
      w.write({Picos{i} * ns(50), 0, memctrl::ReqKind::Read, dram::encode_address(a, cfg0.geometry, map)});
    }
    w.close();
  }
  auto j = base_json();
  j["workload"] = json::array({{{"type", "trace"}, {"thread", 0}, {"path", path.string()}}});
  Simulator s(SimConfig::from_json(j));
  const auto r = s.run();
  CHECK(r.stats["requests"]["served"] == 2000);
  CHECK(r.violations == 0);
  std::filesystem::remove(path);
}

TEST_CASE("strict config parsing names the offending path") {
  auto j = base_json();
  j["sim"]["sede"] = 1;
  CHECK(config_error(j).find("$.sim.sede") != std::string::npos);

  j = base_json();
  j["dram"]["geometry"]["rows_per_bank"] = "many";
  CHECK(config_error(j).find("$.dram.geometry.rows_per_bank") != std::string::npos);

  j = base_json();
  j["sim"].erase("seed");
  CHECK(config_error(j).find("seed") != std::string::npos);

  j = base_json();
  j["mitigation"]["kind"] = "trr";
  CHECK(config_error(j).find("$.mitigation.kind") != std::string::npos);

  j = base_json();
  j["workload"][2]["kind"] = "quadruple";
  CHECK(config_error(j).find("$.workload[2].kind") != std::string::npos);

  j = base_json();
  j["dram"]["geometry"]["subarrays_per_bank"] = 7;
  CHECK_FALSE(config_error(j).empty());

  CHECK(config_error(base_json()).empty());
}

TEST_CASE("stats files are written") {
  auto j = base_json();
  const auto dir = tmp("disturbsim_stats_out");
  std::filesystem::remove_all(dir);
  Simulator s(SimConfig::from_json(j));
  const auto r = s.run();
  write_stats_files(r.stats, s.requests(), dir.string());
  for (const char* f : {"stats.json", "stats.csv", "latency.csv"}) CHECK(std::filesystem::exists(dir / f));
  std::ifstream in(dir / "stats.json");
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(json::parse(ss.str()) == r.stats);
  std::filesystem::remove_all(dir);
}

TEST_CASE("latency percentiles use the nearest rank") {
  RequestStats st;
  for (int i = 1; i <= 10; ++i) {
    memctrl::MemoryRequest r;
    r.thread = 0;
    r.arrival = 0;
    r.completion = i * 100;
    st.record(r);
  }
  CHECK(st.percentile(0, 0.5) == 500);
  CHECK(st.percentile(0, 0.9) == 900);
  CHECK(st.percentile(0, 0.91) == 1000);
  CHECK(st.percentile(0, 1.0) == 1000);
  CHECK(st.percentile(1, 0.5) == 0);
}
