#include "disturbsim/blockhammer/config.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "disturbsim/common/errors.hpp"
#include "disturbsim/sketch/cbf.hpp"

namespace disturb::blockhammer {

namespace {

struct Preset {
  std::int64_t n_rh, n_rh_star, cbf_size, n_bl;
};

constexpr std::array<Preset, 6> kPresets{{
    {32768, 16384, 1024, 8192},
    {16384, 8192, 1024, 4096},
    {8192, 4096, 1024, 2048},
    {4096, 2048, 2048, 1024},
    {2048, 1024, 4096, 512},
    {1024, 512, 8192, 256},
}};

}  // namespace

AttackModel AttackModel::many_sided(int r_blast, double decay) {
  if (r_blast < 1) throw ConfigError("r_blast must be >= 1");
  AttackModel m;
  m.c_k.clear();
  double c = 1.0;
  for (int k = 1; k <= r_blast; ++k, c *= decay) m.c_k.push_back(c);
  return m;
}

double AttackModel::threshold_ratio() const {
  const double sum = std::accumulate(c_k.begin(), c_k.end(), 0.0);
  if (!(sum > 0)) throw ConfigError("blast impact factors must sum to a positive value");
  return 1.0 / (2.0 * sum);
}

void BlockHammerConfig::validate() const {
  if (!(n_bl < n_rh_star && n_rh_star <= n_rh)) throw ConfigError("blockhammer: need n_bl < n_rh_star <= n_rh");
  if (n_bl < 1) throw ConfigError("blockhammer: n_bl must be >= 1");
  if (t_delay <= t_rc) throw ConfigError("blockhammer: t_delay must exceed t_rc");
  if (hb_capacity < history_capacity(t_delay, t_faw)) throw ConfigError("blockhammer: history buffer too small");
  if (t_cbf <= 0 || t_cbf % 2 != 0) throw ConfigError("blockhammer: t_cbf must be positive and even");
  if (q_max < 1) throw ConfigError("blockhammer: q_max must be >= 1");
}

unsigned BlockHammerConfig::counter_width() const {
  return sketch::counter_width_for(static_cast<std::uint32_t>(n_bl));
}

double BlockHammerConfig::rhli_denominator() const {
  return static_cast<double>(n_rh_star) * static_cast<double>(t_cbf) / static_cast<double>(t_refw) -
         static_cast<double>(n_bl);
}

std::uint64_t BlockHammerConfig::throttle_saturation() const {
  return static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(n_rh) * static_cast<double>(t_cbf) / static_cast<double>(t_refw)));
}

Picos compute_t_delay(Picos t_cbf, Picos t_refw, Picos t_rc, double n_rh_star, std::int64_t n_bl) {
  const double denom = static_cast<double>(t_cbf) / static_cast<double>(t_refw) * n_rh_star -
                       static_cast<double>(n_bl);
  if (!(denom > 0)) throw ConfigError("blockhammer: n_bl reaches the scaled threshold, t_delay undefined");
  const double num = static_cast<double>(t_cbf) - static_cast<double>(n_bl) * static_cast<double>(t_rc);
  if (!(num > 0)) throw ConfigError("blockhammer: n_bl activations do not fit in t_cbf");
  return static_cast<Picos>(std::ceil(num / denom));
}

std::uint32_t history_capacity(Picos t_delay, Picos t_faw) {
  return static_cast<std::uint32_t>(ceil_div(4 * t_delay, t_faw));
}

BlockHammerConfig derive_config(std::int64_t n_rh, const AttackModel& attack, const dram::TimingParams& t,
                                const Overrides& o) {
  if (n_rh < 2) throw ConfigError("blockhammer: n_rh must be >= 2");
  BlockHammerConfig c;
  c.n_rh = n_rh;
  c.attack = attack;
  c.mode = o.mode;
  c.t_refw = t.t_refw;
  c.t_rc = t.t_rc;
  c.t_faw = t.t_faw;
  c.n_rh_star_exact = static_cast<double>(n_rh) * attack.threshold_ratio();
  c.n_rh_star = static_cast<std::int64_t>(std::floor(c.n_rh_star_exact));

  const bool tabulated = attack.r_blast() == 1 && attack.c_k[0] == 1.0;
  auto preset = std::find_if(kPresets.begin(), kPresets.end(), [&](const Preset& p) { return p.n_rh == n_rh; });
  if (tabulated && preset != kPresets.end()) {
    c.n_bl = preset->n_bl;
    c.cbf_size = static_cast<std::uint32_t>(preset->cbf_size);
  } else {
    c.n_bl = c.n_rh_star / 2;
    c.cbf_size = static_cast<std::uint32_t>(std::max<std::int64_t>(1024, (std::int64_t{1} << 23) / n_rh));
    // Keep the filter a power of two.
    c.cbf_size = std::uint32_t{1} << static_cast<unsigned>(std::ceil(std::log2(c.cbf_size)));
  }
  if (o.n_bl) c.n_bl = *o.n_bl;
  if (o.cbf_size) c.cbf_size = *o.cbf_size;
  if (o.q_max) c.q_max = *o.q_max;
  c.t_cbf = o.t_cbf.value_or(t.t_refw);
  c.t_delay = compute_t_delay(c.t_cbf, c.t_refw, c.t_rc, static_cast<double>(c.n_rh_star), c.n_bl);
  c.hb_capacity = history_capacity(c.t_delay, c.t_faw);
  return c;
}

}  // namespace disturb::blockhammer
