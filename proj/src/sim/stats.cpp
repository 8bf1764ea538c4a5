#include "disturbsim/sim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "disturbsim/common/errors.hpp"

namespace disturb::sim {

using nlohmann::json;

namespace {

Picos nearest_rank(std::vector<Picos> v, double p) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  auto idx = static_cast<std::size_t>(std::ceil(p * static_cast<double>(v.size())));
  return v[std::clamp<std::size_t>(idx, 1, v.size()) - 1];
}

constexpr double kPercentiles[] = {0.5, 0.9, 0.99, 1.0};

}  // namespace

void RequestStats::record(const memctrl::MemoryRequest& r) {
  Thread& t = threads_[r.thread];
  (r.kind == memctrl::ReqKind::Read ? t.reads : t.writes)++;
  t.latency.push_back(r.completion.value_or(r.arrival) - r.arrival);
  ++served_;
}

Picos RequestStats::percentile(std::uint32_t thread, double p) const {
  auto it = threads_.find(thread);
  return it == threads_.end() ? 0 : nearest_rank(it->second.latency, p);
}

json RequestStats::to_json() const {
  json out = json::object();
  for (const auto& [id, t] : threads_) {
    std::vector<Picos> sorted = t.latency;
    std::sort(sorted.begin(), sorted.end());
    double sum = 0;
    for (Picos l : sorted) sum += static_cast<double>(l);
    json lat = {{"mean_ns", sorted.empty() ? 0.0 : sum / static_cast<double>(sorted.size()) / 1e3}};
    for (double p : kPercentiles) {
      const std::string key = p == 1.0 ? "max_ns" : "p" + std::to_string(static_cast<int>(std::lround(p * 100))) + "_ns";
      lat[key] = to_ns(nearest_rank(sorted, p));
    }
    out[std::to_string(id)] = {{"reads", t.reads}, {"writes", t.writes}, {"latency", lat}};
  }
  return out;
}

json controller_json(const memctrl::ControllerStats& s) {
  json hist = json::object();
  for (const auto& [bucket, n] : s.block_delay_hist) hist[std::to_string(bucket)] = n;
  return {
      {"acts", s.acts},
      {"demand_acts", s.demand_acts},
      {"refresh_acts", s.refresh_acts},
      {"preventive_acts", s.preventive_acts},
      {"pres", s.pres},
      {"reads", s.reads},
      {"writes", s.writes},
      {"refs", s.refs},
      {"hira_refresh_access", s.hira_refresh_access},
      {"hira_refresh_refresh", s.hira_refresh_refresh},
      {"row_hits", s.row_hits},
      {"row_misses", s.row_misses},
      {"row_conflicts", s.row_conflicts},
      {"blocked_acts", s.blocked_acts},
      {"preventive_refreshes", s.preventive_refreshes},
      {"rejected_full", s.rejected_full},
      {"rejected_quota", s.rejected_quota},
      {"block_delay_hist_log2ns", hist},
      {"max_block_delay_ps", s.max_block_delay},
      {"refresh_busy_ps", s.refresh_busy},
  };
}

std::string dump_stats(const json& stats) { return stats.dump(2) + "\n"; }

namespace {

void flatten(const json& j, const std::string& prefix, std::ofstream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else {
    out << prefix << ',' << (j.is_string() ? j.get<std::string>() : j.dump()) << '\n';
  }
}

}  // namespace

void write_stats_files(const json& stats, const RequestStats& req, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  {
    std::ofstream out(d / "stats.json");
    out << dump_stats(stats);
    if (!out) throw std::runtime_error("cannot write " + (d / "stats.json").string());
  }
  {
    std::ofstream out(d / "stats.csv");
    out << "key,value\n";
    flatten(stats, "", out);
  }
  {
    std::ofstream out(d / "latency.csv");
    out << "thread,percentile,latency_ns\n";
    const json threads = stats.value("threads", json::object());
    for (const auto& [id, t] : threads.items()) {
      (void)t;
      const auto thread = static_cast<std::uint32_t>(std::stoul(id));
      for (int p = 1; p <= 100; ++p) out << id << ',' << p << ',' << to_ns(req.percentile(thread, p / 100.0)) << '\n';
    }
  }
}

}  // namespace disturb::sim
