#include "disturbsim/sim/config.hpp"

#include <fstream>
#include <set>

#include "disturbsim/common/errors.hpp"

namespace disturb::sim {

using nlohmann::json;

namespace {

// Reads one JSON object and rejects keys nobody asked for.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& msg, const std::string& key = "") const {
    throw ConfigError("config: " + path_ + (key.empty() ? "" : "." + key) + ": " + msg);
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return j_.contains(key);
  }

  template <typename T>
  T req(const std::string& key) {
    if (!has(key)) fail("required field missing", key);
    return as<T>(key);
  }

  template <typename T>
  T opt(const std::string& key, T fallback) {
    return has(key) ? as<T>(key) : fallback;
  }

  Picos duration(const std::string& key, Picos fallback) {
    if (!has(key)) return fallback;
    const double v = as<double>(key);
    if (!(v > 0)) fail("must be positive", key);
    return ns(v);
  }

  Reader child(const std::string& key) {
    used_.insert(key);
    return Reader(j_.at(key), path_ + "." + key);
  }
  const json& raw(const std::string& key) {
    used_.insert(key);
    return j_.at(key);
  }
  std::string path(const std::string& key) const { return path_ + "." + key; }

  void done() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) fail("unknown field", it.key());
    }
  }

 private:
  template <typename T>
  T as(const std::string& key) {
    const json& v = j_.at(key);
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail("expected a boolean", key);
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer()) fail("expected an integer", key);
        if (std::is_unsigned_v<T> && v.get<std::int64_t>() < 0 && !v.is_number_unsigned()) fail("must be >= 0", key);
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) fail("expected a number", key);
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail("expected a string", key);
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      fail(e.what(), key);
    }
  }

  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

dram::Geometry read_geometry(Reader r) {
  dram::Geometry g;
  g.channels = r.opt("channels", g.channels);
  g.ranks_per_channel = r.opt("ranks_per_channel", g.ranks_per_channel);
  g.banks_per_rank = r.opt("banks_per_rank", g.banks_per_rank);
  g.subarrays_per_bank = r.opt("subarrays_per_bank", g.subarrays_per_bank);
  g.rows_per_bank = r.opt("rows_per_bank", g.rows_per_bank);
  g.columns_per_row = r.opt("columns_per_row", g.columns_per_row);
  r.done();
  return g;
}

dram::TimingParams read_timing(Reader r, dram::HiraTimings& h) {
  dram::TimingParams t;
  t.t_rc = r.duration("t_rc_ns", t.t_rc);
  t.t_ras = r.duration("t_ras_ns", t.t_ras);
  t.t_rp = r.duration("t_rp_ns", t.t_rp);
  t.t_rcd = r.duration("t_rcd_ns", t.t_rcd);
  t.t_faw = r.duration("t_faw_ns", t.t_faw);
  t.t_refw = r.duration("t_refw_ns", t.t_refw);
  t.t_refi = r.duration("t_refi_ns", t.t_refi);
  t.t_rfc = r.duration("t_rfc_ns", t.t_rfc);
  t.t_cl = r.duration("t_cl_ns", t.t_cl);
  t.t_cmd = r.duration("t_cmd_ns", t.t_cmd);
  h.t1 = r.duration("hira_t1_ns", h.t1);
  h.t2 = r.duration("hira_t2_ns", h.t2);
  r.done();
  return t;
}

memctrl::SchedulerConfig read_scheduler(Reader r) {
  memctrl::SchedulerConfig s;
  s.read_queue_len = r.opt("read_queue_len", s.read_queue_len);
  s.write_queue_len = r.opt("write_queue_len", s.write_queue_len);
  s.column_cap = r.opt("column_cap", s.column_cap);
  const auto policy = r.opt<std::string>("row_policy", "open");
  if (policy == "open") {
    s.row_policy = memctrl::RowPolicy::Open;
  } else if (policy == "closed") {
    s.row_policy = memctrl::RowPolicy::Closed;
  } else {
    r.fail("expected \"open\" or \"closed\"", "row_policy");
  }
  r.done();
  return s;
}

RefreshConfig read_refresh(Reader r) {
  RefreshConfig c;
  const auto scheme = r.opt<std::string>("scheme", "all_bank");
  if (scheme == "all_bank") {
    c.scheme = RefreshScheme::AllBank;
  } else if (scheme == "hira") {
    c.scheme = RefreshScheme::Hira;
  } else {
    r.fail("expected \"all_bank\" or \"hira\"", "scheme");
  }
  c.hira.slack_rc_multiples = r.opt("slack_rc_multiples", c.hira.slack_rc_multiples);
  c.spt_coverage = r.opt("spt_coverage", c.spt_coverage);
  c.spt_path = r.opt<std::string>("spt_path", "");
  if (c.spt_coverage < 0 || c.spt_coverage > 1) r.fail("must lie in [0, 1]", "spt_coverage");
  r.done();
  return c;
}

MitigationConfig read_mitigation(Reader r) {
  MitigationConfig m;
  const auto kind = r.opt<std::string>("kind", "none");
  if (kind == "none") {
    m.kind = MitigationKind::None;
  } else if (kind == "para") {
    m.kind = MitigationKind::Para;
  } else if (kind == "blockhammer") {
    m.kind = MitigationKind::BlockHammer;
  } else if (kind == "hira_mc") {
    m.kind = MitigationKind::HiraMc;
  } else if (kind == "svard_para") {
    m.kind = MitigationKind::SvardPara;
  } else {
    r.fail("unknown mitigation kind '" + kind + "'", "kind");
  }
  if (r.has("p_th")) {
    m.p_th = r.req<double>("p_th");
    if (!(*m.p_th >= 0 && *m.p_th <= 1)) r.fail("must lie in [0, 1]", "p_th");
  }
  m.n_rh = r.opt<std::int64_t>("n_rh", m.n_rh);
  if (m.n_rh < 1) r.fail("must be positive", "n_rh");
  m.target_prh = r.opt("target_prh", m.target_prh);

  const auto model = r.opt<std::string>("attack_model", "double_sided");
  if (model == "double_sided") {
    m.attack = blockhammer::AttackModel::double_sided();
  } else if (model == "many_sided") {
    m.attack = blockhammer::AttackModel::many_sided(r.opt("r_blast", 6), r.opt("blast_decay", 0.5));
  } else {
    r.fail("expected \"double_sided\" or \"many_sided\"", "attack_model");
  }
  if (r.has("n_bl")) m.overrides.n_bl = r.req<std::int64_t>("n_bl");
  if (r.has("cbf_size")) m.overrides.cbf_size = r.req<std::uint32_t>("cbf_size");
  if (r.has("t_cbf_ns")) m.overrides.t_cbf = r.duration("t_cbf_ns", 0);
  if (r.has("q_max")) m.overrides.q_max = r.req<std::uint32_t>("q_max");
  const auto mode = r.opt<std::string>("mode", "full");
  if (mode == "full") {
    m.overrides.mode = blockhammer::Mode::FullFunctional;
  } else if (mode == "observe") {
    m.overrides.mode = blockhammer::Mode::ObserveOnly;
  } else {
    r.fail("expected \"observe\" or \"full\"", "mode");
  }

  m.profile_path = r.opt<std::string>("profile", "");
  if (r.has("profile_bins")) {
    const json& bins = r.raw("profile_bins");
    if (!bins.is_array()) r.fail("expected an array", "profile_bins");
    for (std::size_t i = 0; i < bins.size(); ++i) {
      Reader b(bins[i], r.path("profile_bins") + "[" + std::to_string(i) + "]");
      svard::BinSpec s;
      s.fraction = b.req<double>("fraction");
      s.hcfirst = b.req<std::int64_t>("hcfirst");
      b.done();
      m.profile_bins.push_back(s);
    }
  }
  m.svard.enabled = r.opt("svard_enabled", true);
  const auto scope = r.opt<std::string>("lookup_scope", "blast_radius_min");
  if (scope == "blast_radius_min") {
    m.svard.scope = svard::LookupScope::BlastRadiusMin;
  } else if (scope == "activated_row") {
    m.svard.scope = svard::LookupScope::ActivatedRow;
  } else {
    r.fail("expected \"blast_radius_min\" or \"activated_row\"", "lookup_scope");
  }
  r.done();
  return m;
}

WorkloadSpec read_workload(Reader r) {
  WorkloadSpec w;
  const auto type = r.req<std::string>("type");
  w.thread = r.opt("thread", w.thread);
  w.count = r.opt<std::uint64_t>("count", 0);
  if (type == "trace") {
    w.type = WorkloadType::Trace;
    w.path = r.req<std::string>("path");
  } else if (type == "random" || type == "stream") {
    w.type = type == "random" ? WorkloadType::Random : WorkloadType::Stream;
    w.interval = r.duration("interval_ns", w.interval);
    w.read_fraction = r.opt("read_fraction", w.read_fraction);
    w.row_hit = r.opt("row_hit", w.row_hit);
    w.row_lo = r.opt("row_lo", w.row_lo);
    w.row_hi = r.opt("row_hi", w.row_hi);
    if (w.read_fraction < 0 || w.read_fraction > 1) r.fail("must lie in [0, 1]", "read_fraction");
    if (w.row_hit < 0 || w.row_hit > 1) r.fail("must lie in [0, 1]", "row_hit");
  } else if (type == "attack") {
    w.type = WorkloadType::Attack;
    const auto kind = r.opt<std::string>("kind", "double_sided");
    if (kind == "single") {
      w.attack = AttackKind::Single;
    } else if (kind == "double_sided") {
      w.attack = AttackKind::DoubleSided;
    } else if (kind == "many_sided") {
      w.attack = AttackKind::ManySided;
    } else if (kind == "burst_idle") {
      w.attack = AttackKind::BurstIdle;
    } else {
      r.fail("unknown attack kind '" + kind + "'", "kind");
    }
    w.bank.channel = r.opt("channel", 0u);
    w.bank.rank = r.opt("rank", 0u);
    w.bank.bank = r.opt("bank", 0u);
    w.rows = r.req<std::vector<dram::RowId>>("rows");
    w.interval = r.has("interval_ns") ? ns(r.req<double>("interval_ns")) : 0;
    w.outstanding = r.opt("outstanding", w.outstanding);
    w.burst = r.opt("burst", w.burst);
    w.idle = r.has("idle_ns") ? r.duration("idle_ns", 0) : 0;
    if (w.rows.empty()) r.fail("needs at least one row", "rows");
    if (w.interval < 0) r.fail("must be >= 0", "interval_ns");
    if (w.outstanding < 1) r.fail("must be >= 1", "outstanding");
  } else {
    r.fail("unknown workload type '" + type + "'", "type");
  }
  r.done();
  return w;
}

}  // namespace

std::string to_string(MitigationKind k) {
  switch (k) {
    case MitigationKind::None: return "none";
    case MitigationKind::Para: return "para";
    case MitigationKind::BlockHammer: return "blockhammer";
    case MitigationKind::HiraMc: return "hira_mc";
    case MitigationKind::SvardPara: return "svard_para";
  }
  return "?";
}

SimConfig SimConfig::from_json(const json& j) {
  SimConfig c;
  Reader root(j, "$");
  if (root.has("dram")) {
    Reader d = root.child("dram");
    if (d.has("geometry")) c.geometry = read_geometry(d.child("geometry"));
    if (d.has("timing")) c.timing = read_timing(d.child("timing"), c.hira_timings);
    c.address_map = d.opt<std::string>("address_map", c.address_map);
    d.done();
  }
  if (root.has("controller")) c.scheduler = read_scheduler(root.child("controller"));
  if (root.has("refresh")) c.refresh = read_refresh(root.child("refresh"));
  if (root.has("mitigation")) c.mitigation = read_mitigation(root.child("mitigation"));
  if (root.has("workload")) {
    const json& ws = root.raw("workload");
    if (!ws.is_array()) root.fail("expected an array", "workload");
    for (std::size_t i = 0; i < ws.size(); ++i) {
      c.workloads.push_back(read_workload(Reader(ws[i], "$.workload[" + std::to_string(i) + "]")));
    }
  }
  if (!root.has("sim")) root.fail("required field missing", "sim");
  {
    Reader s = root.child("sim");
    if (!s.has("duration_ns")) s.fail("required field missing", "duration_ns");
    c.duration = s.duration("duration_ns", 0);
    c.seed = s.req<std::uint64_t>("seed");
    c.verify = s.opt("verify", false);
    s.done();
  }
  if (root.has("output")) {
    Reader o = root.child("output");
    c.out_dir = o.opt<std::string>("dir", "");
    o.done();
  }
  root.done();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return c;
}

json SimConfig::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + path + ": " + e.what());
  }
}

SimConfig SimConfig::load(const std::string& path) { return from_json(load_json(path)); }

void SimConfig::validate() const {
  geometry.validate();
  timing.validate();
  hira_timings.validate(timing);
  scheduler.validate();
  dram::BitFieldMap::from_name(address_map, geometry).check_against(geometry);
  if (duration <= 0) throw ConfigError("sim.duration_ns must be positive");
  for (const auto& w : workloads) {
    if (w.thread > 0xffff) throw ConfigError("workload thread id too large");
    if (w.type == WorkloadType::Attack) {
      if (w.bank.channel >= geometry.channels || w.bank.rank >= geometry.ranks_per_channel ||
          w.bank.bank >= geometry.banks_per_rank) {
        throw ConfigError("attack bank outside geometry");
      }
      for (auto r : w.rows) {
        if (r >= geometry.rows_per_bank) throw ConfigError("attack row outside geometry");
      }
    }
    if (w.row_hi > geometry.rows_per_bank || (w.row_hi && w.row_lo >= w.row_hi)) {
      throw ConfigError("workload row range outside geometry");
    }
  }
}

}  // namespace disturb::sim
