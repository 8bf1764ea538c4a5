#include "disturbsim/para/solver.hpp"

#include <cmath>

#include "disturbsim/common/errors.hpp"

namespace disturb::para {

namespace {

void check_probability(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("p_th must lie in (0, 1)");
}

// log(sum_{N=0..m} x^N) for 0 < x < 1.
double log_geometric_sum(double x, std::int64_t m) {
  if (m == 0) return 0.0;
  const double log_x = std::log(x);
  const double log_tail = static_cast<double>(m + 1) * log_x;  // log(x^(m+1))
  return std::log(-std::expm1(log_tail)) - std::log1p(-x);
}

}  // namespace

void SolverInput::validate() const {
  if (hc_deadline < 0) throw ConfigError("hc_deadline must be >= 0");
  if (n_rh <= hc_deadline) throw ConfigError("n_rh must exceed hc_deadline");
  if (t_refw <= 0 || t_rc <= 0) throw ConfigError("t_refw and t_rc must be positive");
  if (!(target_prh > 0.0 && target_prh < 1.0)) throw ConfigError("target probability must lie in (0, 1)");
}

double p_failed(std::int64_t hc, double p_th, std::int64_t n_rh) {
  if (hc < 1 || hc >= n_rh) throw DomainError("hammer count out of range [1, n_rh)");
  const double q = p_th / 2.0;
  return std::pow(1.0 - q, static_cast<double>(hc)) * q;
}

std::int64_t n_f_max(const SolverInput& in) {
  const double acts = static_cast<double>(in.t_refw) / static_cast<double>(in.t_rc);
  return static_cast<std::int64_t>(std::floor((acts - static_cast<double>(in.n_rh + in.hc_deadline)) / 2.0));
}

double log_p_rh(double p_th, const SolverInput& in) {
  check_probability(p_th);
  in.validate();
  const std::int64_t m = n_f_max(in);
  if (m < 0) throw ConfigError("attack does not fit in the refresh window (Nf_max < 0)");
  const double q = p_th / 2.0;
  const double x = q * (1.0 - q);
  return static_cast<double>(in.n_rh - in.hc_deadline) * std::log1p(-q) + log_geometric_sum(x, m);
}

double p_rh(double p_th, const SolverInput& in) { return std::exp(log_p_rh(p_th, in)); }

double solve_pth(const SolverInput& in) {
  in.validate();
  const double goal = std::log10(in.target_prh);
  auto err = [&](double p) { return log_p_rh(p, in) / std::log(10.0) - goal; };

  double lo = 1e-12;
  double hi = 1.0 - 1e-12;
  if (err(hi) > 0.0) throw SolverError("target success probability unreachable for any p_th < 1");
  if (err(lo) <= 0.0) return lo;
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double e = err(mid);
    if (std::fabs(e) < 1e-6) return mid;
    if (e > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  throw SolverError("bisection did not converge");
}

double k_factor(double p_th, const SolverInput& in) {
  check_probability(p_th);
  const std::int64_t m = n_f_max(in);
  const double q = p_th / 2.0;
  const double slack = -static_cast<double>(in.hc_deadline) * std::log1p(-q);
  if (m < 0) return std::exp(slack);
  return std::exp(slack + log_geometric_sum(q * (1.0 - q), m));
}

}  // namespace disturb::para
