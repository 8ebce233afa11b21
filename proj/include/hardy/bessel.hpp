#pragma once

#include <cmath>
#include <numbers>

#include "hardy/error.hpp"

namespace hardy {

namespace detail {

constexpr double kBesselSeriesLimit = 8.0;
constexpr double kBesselRange = 50.0;

// Sum_k (-1)^k (x/2)^{2k+order} / (k! (k+order)!), truncated once the term
// ratio drops below 1e-15 of the running sum.
inline double bessel_series(int order, double x) {
  const double half = 0.5 * x;
  double term = 1.0;
  for (int j = 1; j <= order; ++j) term *= half / j;
  double sum = term;
  const double q = half * half;
  for (int k = 1; k < 200; ++k) {
    term *= -q / (static_cast<double>(k) * static_cast<double>(k + order));
    sum += term;
    if (std::abs(term) <= 1e-15 * std::abs(sum) && k > 2) break;
  }
  return sum;
}

// Miller backward recurrence normalized by J0 + 2 sum J_{2k} = 1.
inline void bessel_miller(double x, double& j0, double& j1) {
  const int start = 2 * (static_cast<int>(x + 40.0 + 10.0 * std::sqrt(x)) / 2);
  double next = 0.0;
  double cur = 1e-300;
  double norm = 0.0;
  double b0 = 0.0;
  double b1 = 0.0;
  for (int k = start; k >= 1; --k) {
    const double prev = (2.0 * k / x) * cur - next;
    next = cur;
    cur = prev;  // cur = J_{k-1} (unnormalized)
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * cur;
    if (k - 1 == 1) b1 = cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      b1 *= 1e-250;
    }
  }
  b0 = cur;
  norm += b0;
  j0 = b0 / norm;
  j1 = b1 / norm;
}

}  // namespace detail

/// J0(x) for |x| <= 50: power series for |x| <= 8, Miller recurrence beyond.
inline double bessel_j0(double x) {
  const double ax = std::abs(x);
  if (!(ax <= detail::kBesselRange)) throw Error(ErrorCode::RangeError, "bessel_j0 argument beyond 50");
  if (ax <= detail::kBesselSeriesLimit) return detail::bessel_series(0, ax);
  double j0 = 0.0;
  double j1 = 0.0;
  detail::bessel_miller(ax, j0, j1);
  return j0;
}

/// J1(x) for |x| <= 50; J0' = -J1.
inline double bessel_j1(double x) {
  const double ax = std::abs(x);
  if (!(ax <= detail::kBesselRange)) throw Error(ErrorCode::RangeError, "bessel_j1 argument beyond 50");
  double value = 0.0;
  if (ax <= detail::kBesselSeriesLimit) {
    value = detail::bessel_series(1, ax);
  } else {
    double j0 = 0.0;
    detail::bessel_miller(ax, j0, value);
  }
  return x < 0.0 ? -value : value;
}

/// First positive zero of J0, by bisection on [2, 3].
inline double bessel_j0_first_zero() {
  double lo = 2.0;
  double hi = 3.0;
  double f_lo = bessel_j0(lo);
  while (hi - lo > 1e-14) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = bessel_j0(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) {
  return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

/// Radius of the ball with the given volume.
inline double equal_volume_radius(int n, double volume) {
  return std::pow(volume / unit_ball_volume(n), 1.0 / n);
}

/// z0^2 * omega_n^{2/n} * |Omega|^{-2/n}.
inline double brezis_vazquez_lambda(int n, double volume) {
  if (n < 3) throw Error(ErrorCode::DomainError, "dimension must be >= 3");
  if (!(volume > 0.0)) throw Error(ErrorCode::DomainError, "volume must be positive");
  const double z0 = bessel_j0_first_zero();
  return z0 * z0 * std::pow(unit_ball_volume(n), 2.0 / n) * std::pow(volume, -2.0 / n);
}

}  // namespace hardy
