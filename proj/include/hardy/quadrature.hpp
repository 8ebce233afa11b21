#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "hardy/error.hpp"

namespace hardy {

/// Adaptive Gauss-Kronrod on a finite interval.
template <class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 20) {
  if (a == b) return 0.0;
  double err = 0.0;
  const double value =
      boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, max_depth, rel_tol, &err);
  if (!std::isfinite(value)) throw Error(ErrorCode::QuadratureError, "non-finite integral");
  return value;
}

struct TailIntegral {
  double value = 0.0;
  bool divergent = false;
  int chunks = 0;
  double remainder = 0.0;  // geometric estimate of the part past the last chunk
};

struct TailOptions {
  double rel_tol = 1e-12;
  double stop_ratio = 1e-17;  // chunk / total below which the sum is converged
  int growth_window = 6;      // non-decaying chunks in a row that certify divergence
  int max_chunks = 1100;
};

/// Integral of a non-negative f over [s0, inf) on doubling chunks
/// [S_j, S_j + max(1, |S_j|)]. Chunks that stop decaying (as for 1/s or
/// worse) certify divergence.
template <class F>
TailIntegral tail_integral(F&& f, double s0, const TailOptions& opt = {}) {
  TailIntegral out;
  double lo = s0;
  double prev_chunk = -1.0;
  double prev_ratio = 1.0;
  int non_decaying = 0;
  int zero_chunks = 0;
  for (int j = 0; j < opt.max_chunks; ++j) {
    const double hi = lo + std::max(1.0, std::abs(lo));
    if (!std::isfinite(hi) || hi > 1e300) break;
    double chunk = 0.0;
    try {
      chunk = integrate(f, lo, hi, opt.rel_tol, 15);
    } catch (const Error& e) {
      // An integrand that overflows on the chunk is a divergence, not a failure.
      const double fh = f(hi);
      if (e.code() == ErrorCode::QuadratureError && (!(fh < 1e300) || !(f(0.5 * (lo + hi)) < 1e300))) {
        out.divergent = true;
        return out;
      }
      throw;
    }
    out.chunks = j + 1;
    if (chunk < 0.0) throw Error(ErrorCode::QuadratureError, "tail integrand must be non-negative");
    out.value += chunk;
    if (!std::isfinite(out.value) || out.value > 1e300) {
      out.divergent = true;
      return out;
    }
    if (chunk == 0.0) {
      if (++zero_chunks >= 2) return out;
    } else {
      zero_chunks = 0;
    }
    if (prev_chunk > 0.0) {
      const double ratio = chunk / prev_chunk;
      if (ratio >= 1.0 - 1e-9) {
        if (++non_decaying >= opt.growth_window) {
          out.divergent = true;
          return out;
        }
      } else {
        non_decaying = 0;
      }
      if (chunk <= opt.stop_ratio * out.value && ratio < 0.95) {
        out.remainder = chunk * ratio / (1.0 - ratio);
        out.value += out.remainder;
        return out;
      }
      prev_ratio = ratio;
    }
    prev_chunk = chunk;
    lo = hi;
  }
  // Ran out of range: accept a geometrically shrinking tail, otherwise diverge.
  if (prev_chunk > 0.0 && prev_ratio < 0.95) {
    out.remainder = prev_chunk * prev_ratio / (1.0 - prev_ratio);
    out.value += out.remainder;
    return out;
  }
  if (prev_chunk == 0.0) return out;
  out.divergent = true;
  return out;
}

}  // namespace hardy
