#pragma once

// Independent reference evaluations of the PARA success probability used by
// the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

/// Worst-case adversary over the hammer-count state machine, by dynamic
/// programming over the remaining activation budget `w`.
///
/// An attempt that is cut short by a refresh after `hc` hammers costs hc + 1
/// slots (the hammers plus the slot lost to the refresh); a successful
/// attempt needs n_rh - d consecutive unrefreshed hammers plus the d
/// activations that fit while the refresh waits. The adversary picks hc at
/// every failure to maximise the summed success probability.
inline double dp_success(int n_rh, int d, int w, double p_th) {
  const double q = p_th / 2.0;
  const double success = std::pow(1.0 - q, n_rh - d);
  std::vector<double> v(static_cast<std::size_t>(w) + 1, 0.0);
  for (int b = 0; b <= w; ++b) {
    double best = 0.0;
    for (int hc = 1; hc < n_rh - d && hc + 1 <= b; ++hc) {
      best = std::max(best, std::pow(1.0 - q, hc) * q * v[b - hc - 1]);
    }
    v[b] = (b >= n_rh + d ? success : 0.0) + best;
  }
  return v[w];
}

/// Same quantity by enumerating every sequence of failure lengths.
inline double brute_success(int n_rh, int d, int w, double p_th) {
  const double q = p_th / 2.0;
  const double success = std::pow(1.0 - q, n_rh - d);
  std::function<double(int)> rec = [&](int budget) {
    double best = 0.0;
    for (int hc = 1; hc < n_rh - d && hc + 1 <= budget; ++hc) {
      best = std::max(best, std::pow(1.0 - q, hc) * q * rec(budget - hc - 1));
    }
    return (budget >= n_rh + d ? success : 0.0) + best;
  };
  return rec(w);
}

using Big = boost::multiprecision::cpp_bin_float_100;

/// Term-by-term high-precision sum of (1 - q)^(Nf + n_rh - d) * q^Nf.
inline Big precise_p_rh(std::int64_t n_rh, std::int64_t d, std::int64_t nf_max, double p_th) {
  const Big q = Big(p_th) / 2;
  const Big one_minus_q = 1 - q;
  const Big x = q * one_minus_q;
  Big term = boost::multiprecision::pow(one_minus_q, static_cast<int>(n_rh - d));
  Big sum = 0;
  const Big eps = Big("1e-60");
  for (std::int64_t nf = 0; nf <= nf_max; ++nf) {
    sum += term;
    term *= x;
    if (term < sum * eps) break;
  }
  return sum;
}

}  // namespace oracle
