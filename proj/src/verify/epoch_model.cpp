#include "disturbsim/verify/epoch_model.hpp"

#include <algorithm>
#include <cmath>

#include "disturbsim/common/errors.hpp"

namespace disturb::verify {

EpochParams EpochParams::from(const blockhammer::BlockHammerConfig& cfg) {
  return {cfg.n_rh_star, cfg.n_bl, cfg.t_cbf, cfg.t_delay, cfg.t_rc, cfg.t_refw};
}

std::array<std::int64_t, 5> max_epoch_acts(const EpochParams& p) {
  if (p.t_cbf <= 1 || p.t_delay <= 0 || p.t_rc <= 0 || p.n_bl < 1) throw ConfigError("epoch model: invalid parameters");
  const double t_ep = static_cast<double>(p.t_ep());
  const double td = static_cast<double>(p.t_delay);
  const double ep_over_delay = t_ep / td;
  const double slope = 1.0 - static_cast<double>(p.t_rc) / td;
  // T0 grows with N_BL*, T2 as tabulated falls with it when t_delay > t_rc.
  const std::int64_t t0 = p.n_bl - 1;
  const double t2 = slope >= 0 ? ep_over_delay - slope * 1.0 : ep_over_delay - slope * static_cast<double>(p.n_bl);
  auto clamp = [](double v) { return std::max<std::int64_t>(0, static_cast<std::int64_t>(std::floor(v))); };
  return {t0, p.n_bl - 1, clamp(t2), p.n_bl - 1, clamp(ep_over_delay)};
}

Feasibility feasibility_check(const EpochParams& p) {
  Feasibility f;
  f.n_ep_max = max_epoch_acts(p);
  f.max_epochs = p.t_refw / p.t_ep();
  const std::int64_t m = f.max_epochs;
  const auto& e = f.n_ep_max;
  f.best_total = -1;
  for (std::int64_t n2 = 0; n2 <= m; ++n2) {
    for (std::int64_t n3 = std::max<std::int64_t>(0, n2 - 1); n3 <= std::min(m - n2, n2 + 1); ++n3) {
      for (std::int64_t n0 = 0; n0 <= m - n2 - n3; ++n0) {
        for (std::int64_t n1 = 0; n1 <= m - n2 - n3 - n0; ++n1) {
          // T4 only appears in the total, so the remaining budget goes to it
          // whenever it helps.
          const std::int64_t n4 = e[4] > 0 ? m - n0 - n1 - n2 - n3 : 0;
          const std::int64_t total = n0 * e[0] + n1 * e[1] + n2 * e[2] + n3 * e[3] + n4 * e[4];
          if (total > f.best_total) {
            f.best_total = total;
            f.n = {n0, n1, n2, n3, n4};
          }
        }
      }
    }
  }
  f.feasible = f.best_total >= p.n_rh_star;
  return f;
}

}  // namespace disturb::verify
