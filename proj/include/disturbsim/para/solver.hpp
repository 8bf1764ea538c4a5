#pragma once

#include <cstdint>

#include "disturbsim/common/time.hpp"

namespace disturb::para {

struct SolverInput {
  std::int64_t n_rh = 1024;
  Picos t_refw = ms(64);
  Picos t_rc = ns(46.25);
  /// Extra activations an attacker gets while a preventive refresh waits
  /// in the queue (t_refslack / t_rc).
  std::int64_t hc_deadline = 0;
  double target_prh = 1e-15;

  /// Throws ConfigError unless n_rh > hc_deadline >= 0 and target in (0, 1).
  void validate() const;
};

/// Probability that an attempt fails after exactly `hc` activations:
/// (1 - p/2)^hc * (p/2). Throws DomainError unless 1 <= hc < n_rh.
double p_failed(std::int64_t hc, double p_th, std::int64_t n_rh);

/// Largest number of failed attempts that still leaves room for a
/// successful one inside the refresh window (floored). May be negative.
std::int64_t n_f_max(const SolverInput& in);

/// Natural log of the worst-case success probability
///   sum_{Nf=0..Nf_max} (1 - p/2)^(Nf + n_rh - d) * (p/2)^Nf
/// evaluated through the closed-form geometric sum.
/// Throws DomainError for p outside (0, 1) and ConfigError if Nf_max < 0.
double log_p_rh(double p_th, const SolverInput& in);
double p_rh(double p_th, const SolverInput& in);

/// Smallest-error p_th with p_rh(p_th) == target, by bisection on (0, 1)
/// until |log10 p_rh - log10 target| < 1e-6. Throws SolverError if even
/// p_th -> 1 cannot reach the target.
double solve_pth(const SolverInput& in);

/// Ratio between the slack-aware success probability and the legacy
/// (1 - p/2)^n_rh estimate.
double k_factor(double p_th, const SolverInput& in);

}  // namespace disturb::para
