#pragma once

// Lower bound for the L^p-constrained Hardy gap through Hoelder:
// int cV u^2 >= ||u||_p^2 / ||(cV)^{-1}||_{q}, q = p/(2 - p).

#include <algorithm>
#include <cmath>
#include <limits>

#include "hardy/bessel.hpp"
#include "hardy/error.hpp"
#include "hardy/potential.hpp"
#include "hardy/quadrature.hpp"

namespace hardy {

struct DualBound {
  double p = 0.0;
  double q = 0.0;  // infinity at p = 2
  double bound = 0.0;
  RadialPotential potential;
  double c_used = 0.0;
  bool divergent_norm = false;  // ||(cV)^{-1}||_q is infinite; bound is 0
};

/// 1 / (n omega_n int_0^R (c v)^{-q} r^{n-1} dr)^{1/q} for 0 < p < 2; the
/// essential infimum of c v on (0, R) at p = 2.
inline DualBound dual_lower_bound(const RadialPotential& pot, double c, double p, int n, double R) {
  if (!(p > 0.0 && p <= 2.0)) throw Error(ErrorCode::InvalidP, "p must lie in (0, 2]");
  if (!(c > 0.0)) throw Error(ErrorCode::DomainError, "c must be positive");
  if (n < 1) throw Error(ErrorCode::DomainError, "dimension must be positive");
  if (!(R > 0.0) || R > pot.r_max() * (1.0 + 1e-12)) throw Error(ErrorCode::DomainError, "R outside (0, r_max]");
  DualBound out{p, 0.0, 0.0, pot, c, false};
  const double s_R = -std::log(R);

  if (p == 2.0) {
    out.q = std::numeric_limits<double>::infinity();
    double inf = c * pot.eval(R);
    for (int k = 0; k <= 4000; ++k) {
      const double s = s_R + std::expm1(k / 4000.0 * std::log1p(1e6));
      const double r = std::exp(-s);
      const double v = r > 1e-300 ? pot.eval(r) : pot.log_coefficient(s) * std::exp(2.0 * s);
      inf = std::min(inf, c * v);
    }
    out.bound = std::max(inf, 0.0);
    return out;
  }

  out.q = p / (2.0 - p);
  const double q = out.q;
  auto integrand = [&](double s) {
    // (c v)^{-q} r^n with v = a(s) e^{2s}
    const double a = c * pot.log_coefficient(s);
    if (!(a > 0.0)) return std::numeric_limits<double>::infinity();
    return std::exp(-(n + 2.0 * q) * s - q * std::log(a));
  };
  TailIntegral tail;
  try {
    tail = tail_integral(integrand, s_R);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::QuadratureError) throw;
    tail.divergent = true;
  }
  if (tail.divergent) {
    out.divergent_norm = true;
    return out;
  }
  const double norm_q = n * unit_ball_volume(n) * tail.value;
  out.bound = std::pow(norm_q, -1.0 / q);
  return out;
}

}  // namespace hardy
