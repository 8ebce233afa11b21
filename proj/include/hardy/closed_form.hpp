#pragma once

// Explicit positive solutions of the catalog potentials.

#include <cmath>
#include <limits>

#include "hardy/bessel.hpp"
#include "hardy/error.hpp"
#include "hardy/potential.hpp"

namespace hardy {

/// Multiplier c at which closed_form_solution solves y'' + y'/r + c v y = 0:
/// z0^2 / (R^2 v) for constants (phi = J0(z0 r / R)), 1/amplitude for the log families.
inline double closed_form_multiplier(const RadialPotential& p, double R) {
  switch (p.kind()) {
    case PotentialKind::Constant: {
      const double z0 = bessel_j0_first_zero();
      const double v = p.eval(1.0);
      if (!(v > 0.0)) throw Error(ErrorCode::UnsupportedPotential, "zero constant has no closed form");
      return z0 * z0 / (R * R * v);
    }
    case PotentialKind::AdimurthiLog:
    case PotentialKind::FilippasTertikasX:
      if (!(p.amplitude() > 0.0)) throw Error(ErrorCode::UnsupportedPotential, "zero amplitude");
      return 1.0 / p.amplitude();
    default:
      throw Error(ErrorCode::UnsupportedPotential,
                  std::string(to_string(p.kind())) + " has no closed-form solution");
  }
}

/// phi(r): J0(z0 r / R), (prod_{i<=m} log^{(i)}(rho/r))^{1/2}, or
/// (prod_{i<=m} X_i(r/D))^{-1/2}.
inline double closed_form_solution(const RadialPotential& p, double r,
                                   double R = std::numeric_limits<double>::quiet_NaN()) {
  const auto& prm = p.params();
  switch (p.kind()) {
    case PotentialKind::Constant: {
      const double radius = std::isnan(R) ? p.r_max() : R;
      if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw Error(ErrorCode::DomainError, "constant closed form needs a finite R");
      }
      if (!(r >= 0.0)) throw Error(ErrorCode::DomainError, "radius must be >= 0");
      return bessel_j0(bessel_j0_first_zero() * r / radius);
    }
    case PotentialKind::AdimurthiLog: {
      if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "radius must be positive");
      double level = std::log(prm.rho) - std::log(prm.scale * r);
      double product = 1.0;
      for (int i = 1; i <= prm.m; ++i) {
        if (i > 1) level = std::log(level);
        if (!(level > 0.0)) throw Error(ErrorCode::DomainError, "log factor is not positive");
        product *= level;
      }
      return std::sqrt(product);
    }
    case PotentialKind::FilippasTertikasX: {
      if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "radius must be positive");
      const double s = std::log(prm.d_scale) - std::log(prm.scale * r);  // ln(D / r)
      if (!(s >= -1e-15)) throw Error(ErrorCode::DomainError, "r/D must lie in (0, 1]");
      double x = 1.0 / (1.0 + std::max(0.0, s));
      double product = x;
      for (int i = 2; i <= prm.m; ++i) {
        x = 1.0 / (1.0 - std::log(x));
        product *= x;
      }
      return 1.0 / std::sqrt(product);
    }
    default:
      throw Error(ErrorCode::UnsupportedPotential,
                  std::string(to_string(p.kind())) + " has no closed-form solution");
  }
}

}  // namespace hardy
