#include "disturbsim/sim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include "disturbsim/sim/simulator.hpp"

namespace disturb::sim {

unsigned sweep_threads(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("DISTURBSIM_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) n = static_cast<unsigned>(v);
  }
  return static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

std::vector<SweepPoint> run_sweep(const nlohmann::json& base, const std::vector<nlohmann::json>& points) {
  std::vector<SweepPoint> out(points.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      try {
        nlohmann::json j = base;
        j.merge_patch(points[i]);
        Simulator s(SimConfig::from_json(j));
        auto r = s.run();
        out[i].stats = std::move(r.stats);
        out[i].violations = r.violations;
      } catch (const std::exception& e) {
        out[i].error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned n = sweep_threads(points.size());
  for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace disturb::sim
