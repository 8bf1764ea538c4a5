#include "doctest.h"

#include <cmath>

#include "../oracles/para_oracles.hpp"
#include "disturbsim/common/errors.hpp"
#include "disturbsim/para/solver.hpp"

using namespace disturb;
using namespace disturb::para;

namespace {
SolverInput input(std::int64_t n_rh, std::int64_t d = 0) {
  SolverInput in;
  in.n_rh = n_rh;
  in.hc_deadline = d;
  return in;
}

// Window of `w` activations with a unit t_rc.
SolverInput tiny(std::int64_t n_rh, std::int64_t w, std::int64_t d = 0) {
  SolverInput in;
  in.n_rh = n_rh;
  in.t_rc = 1000;
  in.t_refw = w * 1000;
  in.hc_deadline = d;
  return in;
}
}  // namespace

TEST_CASE("p_failed matches direct substitution") {
  CHECK(p_failed(1, 0.2, 10) == doctest::Approx(0.9 * 0.1));
  CHECK(p_failed(3, 0.5, 10) == doctest::Approx(std::pow(0.75, 3) * 0.25));
  CHECK(p_failed(5, 1e-300, 10) < 1e-299);
  CHECK_THROWS_AS(p_failed(0, 0.5, 10), DomainError);
  CHECK_THROWS_AS(p_failed(10, 0.5, 10), DomainError);
}

TEST_CASE("failure and survival probabilities sum to one") {
  // P(refresh at exactly hc for hc < n) + P(no refresh in n hammers) = 1
  for (double p : {0.01, 0.3, 0.9}) {
    const int n = 50;
    double total = std::pow(1.0 - p / 2.0, n - 1);
    for (int hc = 0; hc < n - 1; ++hc) total += hc == 0 ? p / 2.0 : p_failed(hc, p, n);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("Nf_max is floored") {
  CHECK(n_f_max(tiny(4, 16)) == 6);
  CHECK(n_f_max(tiny(4, 17)) == 6);
  CHECK(n_f_max(tiny(4, 16, 1)) == 5);
  CHECK_THROWS_AS(p_rh(0.5, tiny(10, 8)), ConfigError);
}

TEST_CASE("p_rh is strictly decreasing in p_th") {
  for (auto in : {input(64), input(1024, 4), tiny(6, 40)}) {
    double prev = p_rh(0.001, in);
    for (double p = 0.01; p < 1.0; p += 0.01) {
      double cur = p_rh(p, in);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("zero slack collapses to the un-slacked expression") {
  auto in = input(1024, 0);
  const double q = 0.05 / 2;
  double direct = 0.0;
  for (std::int64_t nf = 0; nf <= 20; ++nf) direct += std::pow(1 - q, nf + 1024) * std::pow(q, nf);
  CHECK(p_rh(0.05, in) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("closed form matches the dynamic-programming adversary") {
  for (int n = 4; n <= 8; ++n) {
    for (int w : {16, 24, 40, 64}) {
      for (int d : {0, 1, 2}) {
        if (n <= d || w < n + d) continue;
        for (double p : {0.05, 0.3, 0.5, 0.9}) {
          double dp = oracle::dp_success(n, d, w, p);
          double cf = p_rh(p, tiny(n, w, d));
          REQUIRE(std::fabs(cf - dp) <= 1e-12 * dp);
        }
      }
    }
  }
}

TEST_CASE("DP oracle agrees with exhaustive enumeration on tiny instances") {
  for (double p : {0.2, 0.7}) {
    CHECK(oracle::dp_success(4, 0, 16, p) == doctest::Approx(oracle::brute_success(4, 0, 16, p)).epsilon(1e-14));
    CHECK(oracle::dp_success(5, 1, 20, p) == doctest::Approx(oracle::brute_success(5, 1, 20, p)).epsilon(1e-14));
  }
}

TEST_CASE("log-space evaluation matches 100-digit summation") {
  for (std::int64_t n : {64, 128, 1024, 2048, 50000}) {
    for (std::int64_t d : {0, 2, 4, 8}) {
      auto in = input(n, d);
      for (double p : {0.001, 0.0662, 0.4730, 0.8341}) {
        double mine = p_rh(p, in);
        if (mine < 1e-300) continue;
        double ref = static_cast<double>(oracle::precise_p_rh(n, d, n_f_max(in), p));
        REQUIRE(std::fabs(mine - ref) <= 1e-9 * ref);
      }
    }
  }
}

TEST_CASE("solver round-trips to the target") {
  for (std::int64_t n : {64, 128, 1024, 2048}) {
    for (std::int64_t d : {0, 2, 4, 8}) {
      auto in = input(n, d);
      double p = solve_pth(in);
      CHECK(std::fabs(std::log10(p_rh(p, in)) - std::log10(in.target_prh)) < 1e-6);
    }
  }
}

TEST_CASE("solved p_th grows as n_rh shrinks and as slack grows") {
  CHECK(solve_pth(input(64)) > solve_pth(input(1024)));
  double prev = 0.0;
  for (std::int64_t d : {0, 2, 4, 8}) {
    double p = solve_pth(input(64, d));
    CHECK(p > prev);
    prev = p;
  }
}

TEST_CASE("solver is deterministic and rejects impossible targets") {
  CHECK(solve_pth(input(256, 4)) == solve_pth(input(256, 4)));
  auto in = tiny(4, 64);
  in.target_prh = 1e-30;
  CHECK_THROWS_AS(solve_pth(in), SolverError);
}

TEST_CASE("k factor") {
  CHECK(k_factor(0.001, input(50000)) == doctest::Approx(1.0005).epsilon(0.005));
  CHECK(k_factor(0.8341, input(64)) == doctest::Approx(1.3212).epsilon(0.005));
  CHECK(k_factor(0.0662, input(1024)) == doctest::Approx(1.0331).epsilon(0.005));
  CHECK(k_factor(0.3, tiny(10, 10)) == 1.0);
}

TEST_CASE("k factor links slack-aware and legacy probabilities") {
  auto in = input(1024, 4);
  for (double p : {0.05, 0.2, 0.6}) {
    double legacy = std::pow(1 - p / 2, 1024);
    CHECK(p_rh(p, in) == doctest::Approx(k_factor(p, in) * legacy).epsilon(1e-10));
  }
}
