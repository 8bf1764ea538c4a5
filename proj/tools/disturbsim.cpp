#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "disturbsim/blockhammer/config.hpp"
#include "disturbsim/common/errors.hpp"
#include "disturbsim/para/solver.hpp"
#include "disturbsim/sim/simulator.hpp"
#include "disturbsim/sim/sweep.hpp"
#include "disturbsim/svard/profile.hpp"
#include "disturbsim/verify/adversarial.hpp"
#include "disturbsim/verify/epoch_model.hpp"
#include "json.hpp"

using namespace disturb;
using nlohmann::json;

namespace {

int cmd_run(const std::string& config, std::optional<std::uint64_t> seed, const std::string& out, bool verify,
            const std::string& profile) {
  json j = sim::SimConfig::load_json(config);
  if (seed) j["sim"]["seed"] = *seed;
  if (verify) j["sim"]["verify"] = true;
  if (!profile.empty()) j["mitigation"]["profile"] = profile;
  auto cfg = sim::SimConfig::from_json(j);
  if (!out.empty()) cfg.out_dir = out;
  sim::Simulator s(cfg);
  const auto res = s.run();
  if (cfg.out_dir.empty()) {
    std::cout << sim::dump_stats(res.stats);
  } else {
    sim::write_stats_files(res.stats, s.requests(), cfg.out_dir);
  }
  if (res.violations) std::cerr << "disturbsim: " << res.violations << " invariant violation(s)\n";
  return res.violations == 0 ? 0 : 1;
}

int cmd_sweep(const std::string& path, const std::string& out) {
  const json spec = sim::SimConfig::load_json(path);
  if (!spec.contains("base") || !spec.contains("points") || !spec["points"].is_array()) {
    throw ConfigError("sweep: expected {\"base\": {...}, \"points\": [...]} in " + path);
  }
  const auto points = spec["points"].get<std::vector<json>>();
  const auto results = sim::run_sweep(spec["base"], points);
  json doc = json::array();
  bool clean = true;
  for (std::size_t i = 0; i < results.size(); ++i) {
    json p = {{"index", i}, {"point", points[i]}, {"violations", results[i].violations}};
    if (results[i].error.empty()) {
      p["stats"] = results[i].stats;
    } else {
      p["error"] = results[i].error;
    }
    clean = clean && results[i].error.empty() && results[i].violations == 0;
    doc.push_back(std::move(p));
  }
  if (out.empty()) {
    std::cout << doc.dump(2) << "\n";
  } else {
    std::filesystem::create_directories(out);
    std::ofstream(std::filesystem::path(out) / "sweep.json") << doc.dump(2) << "\n";
  }
  return clean ? 0 : 1;
}

int cmd_para_solve(const std::vector<std::int64_t>& n_rh, const std::vector<std::int64_t>& hc, double t_refw_ns,
                   double t_rc_ns, double target) {
  std::printf("n_rh,hc_deadline,p_th,p_rh,k\n");
  for (auto n : n_rh) {
    for (auto d : hc) {
      para::SolverInput in;
      in.n_rh = n;
      in.hc_deadline = d;
      in.t_refw = ns(t_refw_ns);
      in.t_rc = ns(t_rc_ns);
      in.target_prh = target;
      in.validate();
      const double p = para::solve_pth(in);
      std::printf("%lld,%lld,%.10g,%.6g,%.6f\n", static_cast<long long>(n), static_cast<long long>(d), p,
                  para::p_rh(p, in), para::k_factor(p, in));
    }
  }
  return 0;
}

int cmd_verify(std::int64_t n_rh, const std::string& model, const std::string& config, unsigned seeds) {
  json out;
  dram::TimingParams t;
  sim::SimConfig scaled;
  if (!config.empty()) {
    scaled = sim::SimConfig::load(config);
    t = scaled.timing;
  }
  auto attack = model == "many_sided" ? blockhammer::AttackModel::many_sided(6, 0.5) : blockhammer::AttackModel::double_sided();
  if (!config.empty() && scaled.mitigation.kind == sim::MitigationKind::BlockHammer) {
    n_rh = scaled.mitigation.n_rh;
    attack = scaled.mitigation.attack;
  }
  const auto cfg = blockhammer::derive_config(n_rh, attack, t,
                                              config.empty() ? blockhammer::Overrides{} : scaled.mitigation.overrides);
  const auto f = verify::feasibility_check(cfg);
  out["feasibility"] = {{"n_rh", cfg.n_rh},
                        {"n_rh_star", cfg.n_rh_star},
                        {"n_bl", cfg.n_bl},
                        {"t_delay_ps", cfg.t_delay},
                        {"n_ep_max", f.n_ep_max},
                        {"max_epochs", f.max_epochs},
                        {"best_total", f.best_total},
                        {"verdict", f.feasible ? "feasible" : "infeasible"}};
  if (f.feasible) out["feasibility"]["witness"] = f.n;
  bool ok = !f.feasible;
  if (!config.empty() && seeds > 0) {
    std::vector<std::uint64_t> s;
    for (unsigned i = 0; i < seeds; ++i) s.push_back(i);
    const auto rep = verify::adversarial_search(scaled, verify::all_families(), s);
    json runs = json::array();
    std::uint64_t viol = 0;
    for (const auto& r : rep.runs) {
      runs.push_back({{"family", verify::to_string(r.family)},
                      {"seed", r.seed},
                      {"max_window", r.max_window},
                      {"demand_acts", r.demand_acts},
                      {"violations", r.violations}});
      viol += r.violations;
    }
    const bool bounded = scaled.mitigation.kind == sim::MitigationKind::BlockHammer &&
                         scaled.mitigation.overrides.mode == blockhammer::Mode::FullFunctional;
    out["adversarial"] = {{"max_window", rep.max_window}, {"runs", runs}};
    if (bounded) {
      out["adversarial"]["bound"] = cfg.n_rh_star;
      ok = ok && rep.max_window <= static_cast<std::uint64_t>(cfg.n_rh_star);
    }
    ok = ok && viol == 0;
  }
  out["ok"] = ok;
  std::cout << out.dump(2) << "\n";
  return ok ? 0 : 1;
}

std::vector<svard::BinSpec> parse_bins(const std::string& text) {
  std::vector<svard::BinSpec> bins;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("svard-gen: bins are fraction:hcfirst pairs");
    bins.push_back({std::stod(item.substr(0, colon)), std::stoll(item.substr(colon + 1))});
  }
  return bins;
}

std::uint64_t rows_from(const std::string& config, std::uint64_t rows) {
  if (rows) return rows;
  dram::Geometry g;
  if (!config.empty()) g = sim::SimConfig::load(config).geometry;
  return g.total_rows();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DRAM read-disturbance mitigation simulator"};
  app.require_subcommand(1);

  std::string config, out, profile;
  std::optional<std::uint64_t> seed;
  bool verify_flag = false;
  auto* run = app.add_subcommand("run", "simulate one configuration");
  run->add_option("--config", config, "JSON configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override sim.seed");
  run->add_option("--out", out, "directory for stats.json / CSV output");
  run->add_flag("--verify", verify_flag, "enable protocol, window and refresh-coverage oracles");
  run->add_option("--svard-profile", profile, "vulnerability profile for svard_para");

  std::string sweep_cfg, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "run many configurations in parallel");
  sweep->add_option("--config", sweep_cfg, "{\"base\": config, \"points\": [patch, ...]}")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", sweep_out, "output directory");

  std::vector<std::int64_t> n_rh{1024}, hc{0};
  double t_refw_ns = 64e6, t_rc_ns = 46.25, target = 1e-15;
  auto* solve = app.add_subcommand("para-solve", "PARA probability for a target success bound");
  solve->add_option("--n-rh", n_rh, "thresholds")->delimiter(',');
  solve->add_option("--hc-deadline", hc, "extra hammers while a refresh waits")->delimiter(',');
  solve->add_option("--t-refw-ns", t_refw_ns);
  solve->add_option("--t-rc-ns", t_rc_ns);
  solve->add_option("--target", target);

  std::int64_t v_nrh = 32768;
  std::string v_model = "double_sided", v_config;
  unsigned v_seeds = 10;
  auto* ver = app.add_subcommand("verify", "epoch feasibility and adversarial search");
  ver->add_option("--n-rh", v_nrh);
  ver->add_option("--attack-model", v_model)->check(CLI::IsMember({"double_sided", "many_sided"}));
  ver->add_option("--config", v_config, "scaled configuration for the adversarial search")->check(CLI::ExistingFile);
  ver->add_option("--seeds", v_seeds);

  std::string g_bins = "0.05:1024,0.95:2048", g_out, g_config;
  std::uint64_t g_rows = 0, g_seed = 1;
  std::int64_t g_scale = 0;
  auto* sg = app.add_subcommand("svard-gen", "generate a vulnerability profile");
  sg->add_option("--bins", g_bins, "fraction:hcfirst,...");
  sg->add_option("--rows", g_rows, "row count (default: from --config geometry)");
  sg->add_option("--config", g_config)->check(CLI::ExistingFile);
  sg->add_option("--scale-to", g_scale, "rescale so the weakest bin equals this");
  sg->add_option("--seed", g_seed);
  sg->add_option("--out", g_out)->required();

  std::string a_kind = "double_sided", a_out, a_config;
  std::vector<dram::RowId> a_rows;
  std::uint32_t a_bank = 0, a_burst = 0, a_thread = 0;
  std::uint64_t a_count = 1000, a_seed = 1;
  double a_interval = 0, a_idle = 0;
  auto* ga = app.add_subcommand("gen-attack", "write an attack trace");
  ga->add_option("--kind", a_kind)->check(CLI::IsMember({"single", "double_sided", "many_sided", "burst_idle"}));
  ga->add_option("--bank", a_bank);
  ga->add_option("--rows", a_rows)->delimiter(',')->required();
  ga->add_option("--interval-ns", a_interval, "gap between requests (default t_rc)");
  ga->add_option("--count", a_count);
  ga->add_option("--burst", a_burst);
  ga->add_option("--idle-ns", a_idle);
  ga->add_option("--thread", a_thread);
  ga->add_option("--seed", a_seed);
  ga->add_option("--config", a_config, "geometry and address map")->check(CLI::ExistingFile);
  ga->add_option("--out", a_out)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config, seed, out, verify_flag, profile);
    if (*sweep) return cmd_sweep(sweep_cfg, sweep_out);
    if (*solve) return cmd_para_solve(n_rh, hc, t_refw_ns, t_rc_ns, target);
    if (*ver) return cmd_verify(v_nrh, v_model, v_config, v_seeds);
    if (*sg) {
      auto p = svard::generate_profile(parse_bins(g_bins), rows_from(g_config, g_rows), g_seed);
      if (g_scale > 0) svard::scale_to_min(p, g_scale);
      svard::save_profile(p, g_out);
      return 0;
    }
    if (*ga) {
      sim::SimConfig c;
      if (!a_config.empty()) c = sim::SimConfig::load(a_config);
      sim::WorkloadSpec w;
      w.type = sim::WorkloadType::Attack;
      w.attack = a_kind == "single"        ? sim::AttackKind::Single
                 : a_kind == "many_sided"  ? sim::AttackKind::ManySided
                 : a_kind == "burst_idle"  ? sim::AttackKind::BurstIdle
                                           : sim::AttackKind::DoubleSided;
      w.bank.bank = a_bank;
      w.rows = a_rows;
      w.interval = ns(a_interval);
      w.count = a_count;
      w.burst = a_burst;
      w.idle = ns(a_idle);
      w.thread = a_thread;
      const auto map = dram::BitFieldMap::from_name(c.address_map, c.geometry);
      sim::TraceWriter tw(a_out);
      for (const auto& r : sim::gen_attack(w, c.geometry, map, c.timing.t_rc, a_seed)) tw.write(r);
      tw.close();
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "disturbsim: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
