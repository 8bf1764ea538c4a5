#include "disturbsim/sim/simulator.hpp"

#include "disturbsim/blockhammer/blockhammer.hpp"
#include "disturbsim/common/errors.hpp"
#include "disturbsim/memctrl/refresh.hpp"
#include "disturbsim/para/para.hpp"
#include "disturbsim/para/solver.hpp"
#include "disturbsim/svard/svard.hpp"

namespace disturb::sim {

using nlohmann::json;

class Simulator::ValidatorTap : public memctrl::CommandListener {
 public:
  explicit ValidatorTap(dram::ProtocolValidator& v) : v_(v) {}
  void on_command(const dram::IssuedCommand& c) override { v_.observe(c); }

 private:
  dram::ProtocolValidator& v_;
};

namespace {

para::SolverInput solver_input(const SimConfig& c, std::int64_t hc_deadline) {
  para::SolverInput in;
  in.n_rh = c.mitigation.n_rh;
  in.t_refw = c.timing.t_refw;
  in.t_rc = c.timing.t_rc;
  in.hc_deadline = hc_deadline;
  in.target_prh = c.mitigation.target_prh;
  return in;
}

}  // namespace

Simulator::Simulator(const SimConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  const auto& g = cfg_.geometry;
  const auto& t = cfg_.timing;
  map_ = dram::BitFieldMap::from_name(cfg_.address_map, g);
  const std::uint64_t mseed = derive_seed(cfg_.seed, "mitigation");
  const auto& m = cfg_.mitigation;

  RefreshConfig rc = cfg_.refresh;
  if (m.kind == MitigationKind::HiraMc) {
    rc.scheme = RefreshScheme::Hira;
    rc.hira.preventive = true;
  }
  const std::int64_t hc_deadline = rc.hira.preventive ? rc.hira.slack_rc_multiples : 0;

  switch (m.kind) {
    case MitigationKind::None:
      break;
    case MitigationKind::Para:
    case MitigationKind::HiraMc:
      p_th_ = m.p_th ? *m.p_th : para::solve_pth(solver_input(cfg_, hc_deadline));
      mitigation_ = std::make_unique<para::Para>(p_th_, g, mseed);
      break;
    case MitigationKind::BlockHammer:
      mitigation_ = std::make_unique<blockhammer::BlockHammer>(
          blockhammer::derive_config(m.n_rh, m.attack, t, m.overrides), g, mseed);
      break;
    case MitigationKind::SvardPara: {
      std::shared_ptr<svard::VulnerabilityProfile> profile;
      if (!m.profile_path.empty()) {
        profile = std::make_shared<svard::VulnerabilityProfile>(svard::load_profile(m.profile_path, g.total_rows()));
      } else {
        auto bins = m.profile_bins;
        if (bins.empty()) bins = {{0.05, m.n_rh}, {0.95, 2 * m.n_rh}};
        profile = std::make_shared<svard::VulnerabilityProfile>(
            svard::generate_profile(bins, g.total_rows(), derive_seed(cfg_.seed, "svard")));
        svard::scale_to_min(*profile, m.n_rh);
      }
      auto sp = std::make_unique<svard::SvardPara>(profile, m.svard, solver_input(cfg_, hc_deadline), g, mseed);
      p_th_ = sp->bin_pth().front();
      mitigation_ = std::move(sp);
      break;
    }
  }

  if (rc.scheme == RefreshScheme::Hira) {
    auto spt = rc.spt_path.empty()
                   ? hira::SubarrayPairsTable::build(g.subarrays_per_bank, rc.spt_coverage, derive_seed(cfg_.seed, "spt"))
                   : hira::SubarrayPairsTable::load_json(rc.spt_path);
    refresh_ = std::make_unique<hira::HiraMc>(g, t, cfg_.hira_timings, spt, rc.hira);
  } else {
    refresh_ = std::make_unique<memctrl::AllBankRefresh>(g, t);
  }

  if (cfg_.verify) {
    validator_ = std::make_unique<dram::ProtocolValidator>(g, t, cfg_.hira_timings);
    tap_ = std::make_unique<ValidatorTap>(*validator_);
    window_ = std::make_unique<verify::WindowOracle>(g, t.t_refw);
    coverage_ = std::make_unique<verify::CoverageOracle>(g, t.t_refw);
    listeners_.add(tap_.get());
    listeners_.add(window_.get());
    listeners_.add(coverage_.get());
  }
  listeners_.add(this);
  controller_ = std::make_unique<memctrl::Controller>(g, t, cfg_.hira_timings, cfg_.scheduler, mitigation_.get(),
                                                      refresh_.get(), &listeners_);
  for (std::size_t i = 0; i < cfg_.workloads.size(); ++i) {
    sources_.push_back(make_source(cfg_.workloads[i], g, map_, derive_seed(cfg_.seed, "workload/" + std::to_string(i))));
  }
}

Simulator::~Simulator() = default;

void Simulator::add_source(std::unique_ptr<RequestSource> src) { sources_.push_back(std::move(src)); }

void Simulator::on_request_done(const memctrl::MemoryRequest& r) {
  requests_.record(r);
  sources_[source_of_[r.id]]->on_done(r);
}

RunResult Simulator::run() {
  if (ran_) throw InvariantError("simulator: run() called twice");
  ran_ = true;
  const auto& t = cfg_.timing;
  const Picos slot = t.t_cmd;
  const Picos end = cfg_.duration;
  const Picos starve = 10 * t.t_refw;
  std::vector<std::optional<memctrl::MemoryRequest>> pending(sources_.size());
  std::uint64_t offered = 0;
  std::uint64_t next_id = 0;

  auto make_request = [&](const TraceRecord& rec, std::uint32_t src) {
    memctrl::MemoryRequest r;
    r.id = next_id++;
    r.arrival = rec.arrival;
    r.thread = rec.thread;
    r.kind = rec.kind;
    r.physical = rec.address;
    r.addr = dram::decode_address(rec.address, cfg_.geometry, map_);
    source_of_.push_back(src);
    ++offered;
    return r;
  };

  Picos now = 0;
  std::uint64_t slots = 0;
  while (now < end) {
    for (std::uint32_t i = 0; i < sources_.size(); ++i) {
      while (true) {
        if (!pending[i]) {
          if (sources_[i]->next_arrival() > now) break;
          pending[i] = make_request(sources_[i]->take(), i);
        }
        if (!controller_->enqueue(*pending[i], now)) break;
        pending[i].reset();
      }
    }
    controller_->tick(now);
    if ((++slots & 0xfff) == 0 && controller_->oldest_arrival() < now - starve) {
      throw InvariantError("simulator: a request waited longer than 10 t_refw");
    }

    Picos next = now + slot;
    if (controller_->idle()) {
      Picos wake = controller_->next_wakeup(now);
      for (std::uint32_t i = 0; i < sources_.size(); ++i) {
        wake = std::min(wake, pending[i] ? next : sources_[i]->next_arrival());
      }
      next = std::max(next, align_up(std::min(wake, end), slot));
    }
    now = next;
  }

  refresh_->finish(end);
  if (coverage_) coverage_->finish(end);
  std::uint64_t rejected_final = 0;
  for (std::uint32_t i = 0; i < sources_.size(); ++i) {
    if (pending[i]) ++rejected_final;
    while (sources_[i]->next_arrival() < end) {
      sources_[i]->take();
      ++offered;
      ++rejected_final;
    }
  }
  RunResult res;
  res.stats = collect(offered, rejected_final, res.violations);
  return res;
}

json Simulator::collect(std::uint64_t offered, std::uint64_t rejected_final, std::uint64_t& violations) const {
  const auto& cs = controller_->stats();
  json s;
  s["config"] = {{"seed", cfg_.seed},
                 {"duration_ps", cfg_.duration},
                 {"mitigation", to_string(cfg_.mitigation.kind)},
                 {"verify", cfg_.verify}};
  s["controller"] = controller_json(cs);
  s["threads"] = requests_.to_json();
  const std::uint64_t in_flight = controller_->queued();
  const bool conserved = offered == requests_.served() + in_flight + rejected_final;
  const bool consistent = cs.reads + cs.writes == cs.row_hits + cs.row_misses + cs.row_conflicts;
  s["requests"] = {{"offered", offered},
                   {"served", requests_.served()},
                   {"in_flight", in_flight},
                   {"rejected_final", rejected_final},
                   {"conserved", conserved},
                   {"column_accounting_consistent", consistent}};
  json mech = json::object();
  if (mitigation_) mitigation_->write_stats(mech);
  refresh_->write_stats(mech);
  s["mechanisms"] = mech;

  json v = {{"refresh_deadline", refresh_->violations()},
            {"conservation", conserved ? 0 : 1},
            {"column_accounting", consistent ? 0 : 1}};
  if (cfg_.verify) {
    v["protocol"] = validator_->violations().size();
    v["refresh_coverage"] = coverage_->violations();
    std::uint64_t security = 0;
    if (auto* bh = dynamic_cast<const blockhammer::BlockHammer*>(mitigation_.get())) {
      if (bh->config().mode == blockhammer::Mode::FullFunctional &&
          window_->max_count() > static_cast<std::uint64_t>(bh->config().n_rh_star)) {
        security = 1;
      }
    }
    v["blockhammer_window"] = security;
    json ver = {{"max_window_acts", window_->max_count()},
                {"max_window_row", window_->max_row()},
                {"commands_checked", validator_->commands_seen()},
                {"max_acts_in_faw_window", validator_->max_acts_in_faw_window()},
                {"min_restore_ps", validator_->min_restore_time()},
                {"max_refresh_gap_ps", coverage_->max_gap()}};
    json first = json::array();
    for (std::size_t i = 0; i < validator_->violations().size() && i < 10; ++i) first.push_back(validator_->violations()[i]);
    ver["protocol_examples"] = first;
    s["verify"] = ver;
  }
  violations = 0;
  for (auto it = v.begin(); it != v.end(); ++it) violations += it.value().get<std::uint64_t>();
  s["violations"] = v;
  s["violations_total"] = violations;
  return s;
}

}  // namespace disturb::sim
