#pragma once

// Shooting for y'' + y'/r + c v(r) y = 0 on (0, R].
//
// Radius domain: the recessive solution is started by its power series at
// r0 and integrated outward in t = ln r with state (y, r y'), which keeps the
// system regular at the singular endpoint.
// Log domain: z(s) = y(e^{-s}) solves z'' + c a(s) z = 0, a(s) = e^{-2s} v(e^{-s});
// it is integrated from s = ln(1/R) toward the horizon s_max.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hardy/dopri5.hpp"
#include "hardy/error.hpp"
#include "hardy/potential.hpp"

namespace hardy {

enum class OdeDomain { Radius, Log };

struct HardyODEProblem {
  RadialPotential potential;
  double multiplier = 1.0;
  double R = 1.0;
  OdeDomain domain = OdeDomain::Radius;
  double r0 = 0.0;       // Radius domain start; 0 selects 1e-8 * R
  double s_max = 1e6;    // Log domain horizon, s = ln(1/r)
  std::optional<double> s_start = std::nullopt;  // Log domain start; default ln(1/R)
  /// Overrides the default start: (y, y') at r0, or (z, z') at s_start.
  std::optional<std::array<double, 2>> initial = std::nullopt;

  double start_radius() const { return r0 > 0.0 ? r0 : 1e-8 * R; }
  double start_log() const { return s_start ? *s_start : -std::log(R); }

  /// c a(s) in the log domain.
  double log_coefficient(double s) const {
    return multiplier == 0.0 ? 0.0 : multiplier * potential.log_coefficient(s);
  }
  /// c v(r) in the radius domain.
  double radius_coefficient(double r) const {
    return multiplier == 0.0 ? 0.0 : multiplier * potential.eval(r);
  }
};

/// (r, y, y') in the radius domain, (s, z, z') in the log domain.
struct TrajectorySample {
  double x = 0.0;
  double y = 0.0;
  double dy = 0.0;
};

enum class ShootingStatus { NoZeroOnInterval, ZeroFound, OverflowRescaled, HorizonReached };

constexpr std::string_view to_string(ShootingStatus status) {
  switch (status) {
    case ShootingStatus::NoZeroOnInterval: return "NoZeroOnInterval";
    case ShootingStatus::ZeroFound: return "ZeroFound";
    case ShootingStatus::OverflowRescaled: return "OverflowRescaled";
    case ShootingStatus::HorizonReached: return "HorizonReached";
  }
  return "Unknown";
}

/// Trajectory values are rescaled by powers of two whenever they leave
/// [2^-500, 2^500]; ratios such as y'/y are unaffected.
struct ShootingOutcome {
  OdeDomain domain = OdeDomain::Radius;
  std::vector<TrajectorySample> trajectory;
  std::optional<double> first_zero;
  ShootingStatus status = ShootingStatus::NoZeroOnInterval;
  int rescale_count = 0;
  double end = 0.0;  // last independent-variable value reached
  std::array<double, 2> final_state{};

  bool zero_found() const { return first_zero.has_value(); }
};

struct IntegrateOptions {
  double rtol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double zero_tol = 1e-12;  // bisection width, relative to R (radius) or absolute (log)
  bool record_trajectory = true;
};

struct InitialState {
  double y = 1.0;
  double dy = 0.0;
};

/// Truncated series start of the recessive solution at r0:
/// y = 1 - c r0^2 v(r0) / (2 - sigma)^2, y' = -c r0 v(r0) / (2 - sigma).
inline InitialState frobenius_init(const HardyODEProblem& prob) {
  const auto& pot = prob.potential;
  if (prob.multiplier == 0.0 || pot.is_zero()) return {1.0, 0.0};
  if (pot.needs_log_domain()) {
    throw Error(ErrorCode::UnsupportedSingularity,
                "singularity exponent >= 2 or critical potential; use the log domain");
  }
  const double r0 = prob.start_radius();
  const double sigma = pot.singularity_exponent();
  const double cv = prob.multiplier * pot.eval(r0);
  const double gap = 2.0 - sigma;
  return {1.0 - cv * r0 * r0 / (gap * gap), -cv * r0 / gap};
}

/// Same problem posed in the log variable.
inline HardyODEProblem to_log_domain(const HardyODEProblem& prob) {
  HardyODEProblem out = prob;
  out.domain = OdeDomain::Log;
  out.initial.reset();
  return out;
}

/// Inverse of to_log_domain.
inline HardyODEProblem to_radius_domain(const HardyODEProblem& prob) {
  HardyODEProblem out = prob;
  out.domain = OdeDomain::Radius;
  out.initial.reset();
  return out;
}

namespace detail {

inline constexpr double kRescaleHigh = 0x1p500;
inline constexpr double kRescaleLow = 0x1p-500;

// Returns the rescale factor that brings the state back into range, or 1.
inline double rescale_factor(const std::array<double, 2>& y) {
  const double mag = std::max(std::abs(y[0]), std::abs(y[1]));
  if (mag > kRescaleHigh) return kRescaleLow;
  if (mag > 0.0 && mag < kRescaleLow) return kRescaleHigh;
  return 1.0;
}

// Dense output restricted to [theta0, 1] of a parent step.
struct SubStep {
  Dopri5Step<2> parent;
  double theta0 = 0.0;
  double x0 = parent.x0 + theta0 * parent.h;
  double h = (1.0 - theta0) * parent.h;
  OdeState<2> dense(double theta) const { return parent.dense(theta0 + theta * (1.0 - theta0)); }
};

template <class Step>
double bisect_zero(const Step& step, double tol) {
  double lo = 0.0;
  double hi = 1.0;
  const double f_lo = step.dense(0.0)[0];
  while ((hi - lo) * step.h > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = step.dense(mid)[0];
    if (f_mid == 0.0) return step.x0 + mid * step.h;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-17) break;
  }
  return step.x0 + 0.5 * (lo + hi) * step.h;
}

}  // namespace detail

/// Adaptive integration with first-zero detection.
inline ShootingOutcome integrate(const HardyODEProblem& prob, const IntegrateOptions& opt = {}) {
  if (!(prob.R > 0.0)) throw Error(ErrorCode::DomainError, "R must be positive");
  if (!(prob.multiplier >= 0.0)) throw Error(ErrorCode::DomainError, "multiplier must be >= 0");
  ShootingOutcome out;
  out.domain = prob.domain;
  Dopri5Options dopt;
  dopt.rtol = opt.rtol;
  dopt.max_step = opt.max_step;

  if (prob.domain == OdeDomain::Radius) {
    const double r0 = prob.start_radius();
    if (!(r0 > 0.0 && r0 < prob.R)) throw Error(ErrorCode::DomainError, "need 0 < r0 < R");
    InitialState init;
    if (prob.initial) {
      init = {(*prob.initial)[0], (*prob.initial)[1]};
    } else {
      init = frobenius_init(prob);
    }
    // t = ln r; state (y, u = r y').
    auto rhs = [&prob](double t, const OdeState<2>& st) -> OdeState<2> {
      return {st[1], -prob.log_coefficient(-t) * st[0]};
    };
    const double t0 = std::log(r0);
    const double t_end = std::log(prob.R);
    OdeState<2> y{init.y, r0 * init.dy};
    if (opt.record_trajectory) out.trajectory.push_back({r0, init.y, init.dy});
    const double ref_sign = init.y != 0.0 ? init.y : 1.0;
    Dopri5<2, decltype(rhs)> stepper(rhs, dopt);
    out.end = stepper.run(t0, y, t_end, [&](const Dopri5Step<2>& step, OdeState<2>& st, OdeState<2>& k) {
      if ((step.y1[0] > 0.0) != (ref_sign > 0.0) || step.y1[0] == 0.0) {
        const double t_zero = detail::bisect_zero(step, opt.zero_tol);
        out.first_zero = std::exp(t_zero);
        out.status = ShootingStatus::ZeroFound;
        const double r = std::exp(step.x0 + step.h);
        if (opt.record_trajectory) out.trajectory.push_back({r, st[0], st[1] / r});
        out.final_state = {st[0], st[1] / r};
        return false;
      }
      const double r = std::exp(step.x0 + step.h);
      if (opt.record_trajectory) out.trajectory.push_back({r, st[0], st[1] / r});
      out.final_state = {st[0], st[1] / r};
      const double f = detail::rescale_factor(st);
      if (f != 1.0) {
        Dopri5<2, decltype(rhs)>::rescale(st, f);
        Dopri5<2, decltype(rhs)>::rescale(k, f);
        ++out.rescale_count;
      }
      return true;
    });
    out.end = std::exp(out.end);
    if (!out.first_zero) {
      out.status = out.rescale_count > 0 ? ShootingStatus::OverflowRescaled
                                         : ShootingStatus::NoZeroOnInterval;
    }
    return out;
  }

  const double s0 = prob.start_log();
  if (!(prob.s_max > s0)) throw Error(ErrorCode::DomainError, "s_max must exceed the start");
  const std::array<double, 2> init = prob.initial ? *prob.initial : std::array<double, 2>{0.0, 1.0};
  auto rhs = [&prob](double s, const OdeState<2>& st) -> OdeState<2> {
    return {st[1], -prob.log_coefficient(s) * st[0]};
  };
  OdeState<2> y{init[0], init[1]};
  if (opt.record_trajectory) out.trajectory.push_back({s0, init[0], init[1]});
  const double ref_sign = init[0] != 0.0 ? init[0] : init[1];
  Dopri5<2, decltype(rhs)> stepper(rhs, dopt);
  out.end = stepper.run(s0, y, prob.s_max, [&](const Dopri5Step<2>& step, OdeState<2>& st, OdeState<2>& k) {
    if ((step.y1[0] > 0.0) != (ref_sign > 0.0) || step.y1[0] == 0.0) {
      // A Dirichlet start has z(s0) = 0; bisection needs a signed left end.
      double theta0 = 0.0;
      if (step.y0[0] == 0.0) {
        theta0 = 1e-6;
        while (theta0 < 0.5 && (step.dense(theta0)[0] > 0.0) != (ref_sign > 0.0)) theta0 *= 2.0;
      }
      detail::SubStep sub{step, theta0};
      out.first_zero = detail::bisect_zero(sub, opt.zero_tol);
      out.status = ShootingStatus::ZeroFound;
      if (opt.record_trajectory) out.trajectory.push_back({step.x0 + step.h, st[0], st[1]});
      out.final_state = {st[0], st[1]};
      return false;
    }
    if (opt.record_trajectory) out.trajectory.push_back({step.x0 + step.h, st[0], st[1]});
    out.final_state = {st[0], st[1]};
    const double f = detail::rescale_factor(st);
    if (f != 1.0) {
      Dopri5<2, decltype(rhs)>::rescale(st, f);
      Dopri5<2, decltype(rhs)>::rescale(k, f);
      ++out.rescale_count;
    }
    return true;
  });
  if (!out.first_zero) out.status = ShootingStatus::HorizonReached;
  return out;
}

namespace detail {

// Fornberg weights for the first derivative at x0 from the given nodes.
template <std::size_t K>
std::array<double, K> first_derivative_weights(const std::array<double, K>& x, double x0) {
  std::array<std::array<double, 2>, K> c{};
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < K; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn; k >= 1; --k) {
          c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        }
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn; k >= 1; --k) {
        c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      }
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::array<double, K> w{};
  for (std::size_t i = 0; i < K; ++i) w[i] = c[i][1];
  return w;
}

}  // namespace detail

/// max |psi' + psi^2 + c a(s)| over interior samples, psi = z'/z (that is
/// -r y'/y), with psi' from five-point differences on the (non-uniform)
/// trajectory, off-centre next to the ends.
inline double riccati_check(const ShootingOutcome& outcome, const HardyODEProblem& prob) {
  if (outcome.domain != OdeDomain::Log) {
    throw Error(ErrorCode::DomainError, "riccati_check expects a log-domain trajectory");
  }
  // Near-duplicate samples (a clipped final step) would wreck the stencil.
  std::vector<TrajectorySample> tr;
  tr.reserve(outcome.trajectory.size());
  for (const auto& smp : outcome.trajectory) {
    if (!tr.empty() && smp.x - tr.back().x <= 1e-8 * std::max(1.0, std::abs(smp.x))) continue;
    tr.push_back(smp);
  }
  if (tr.size() < 3) throw Error(ErrorCode::GridTooCoarse, "trajectory needs at least 3 samples");
  std::vector<double> psi(tr.size());
  for (std::size_t i = 0; i < tr.size(); ++i) {
    if (!(tr[i].y > 0.0)) {
      throw Error(ErrorCode::NonPositiveTrajectory,
                  fmt::format("z <= 0 at s={:.17g}", tr[i].x));
    }
    psi[i] = tr[i].dy / tr[i].y;
  }
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
    double dpsi = 0.0;
    if (tr.size() >= 5) {
      const std::size_t lo = std::min(i < 2 ? 0 : i - 2, tr.size() - 5);
      std::array<double, 5> x{};
      for (std::size_t k = 0; k < 5; ++k) x[k] = tr[lo + k].x;
      const auto w = detail::first_derivative_weights(x, tr[i].x);
      for (std::size_t k = 0; k < 5; ++k) dpsi += w[k] * psi[lo + k];
    } else {
      const std::array<double, 3> x = {tr[i - 1].x, tr[i].x, tr[i + 1].x};
      const auto w = detail::first_derivative_weights(x, x[1]);
      for (std::size_t k = 0; k < 3; ++k) dpsi += w[k] * psi[i - 1 + k];
    }
    worst = std::max(worst, std::abs(dpsi + psi[i] * psi[i] + prob.log_coefficient(tr[i].x)));
  }
  return worst;
}

/// max over the interior of |phi_tt + c r^2 v phi| / max(1, |phi|) with
/// t = ln r and fourth-order central differences; `radii` must be
/// log-spaced and increasing.
inline double residual(std::span<const double> phi, const HardyODEProblem& prob,
                       std::span<const double> radii) {
  const std::size_t n = radii.size();
  if (n < 5 || phi.size() != n) throw Error(ErrorCode::GridTooCoarse, "need at least 5 grid points");
  const double h = std::log(radii[1]) - std::log(radii[0]);
  if (!(h > 0.0)) throw Error(ErrorCode::DomainError, "grid must be increasing");
  for (std::size_t i = 1; i < n; ++i) {
    const double hi = std::log(radii[i]) - std::log(radii[i - 1]);
    if (std::abs(hi - h) > 1e-6 * h) throw Error(ErrorCode::DomainError, "grid must be log-spaced");
  }
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < n; ++i) {
    const double d2 =
        (-phi[i + 2] + 16.0 * phi[i + 1] - 30.0 * phi[i] + 16.0 * phi[i - 1] - phi[i - 2]) /
        (12.0 * h * h);
    const double s = -std::log(radii[i]);
    const double res = std::abs(d2 + prob.log_coefficient(s) * phi[i]);
    worst = std::max(worst, res / std::max(1.0, std::abs(phi[i])));
  }
  return worst;
}

/// CSV with header `r,y,dy` (radius) or `s,z,dz` (log), increasing variable.
inline void write_trajectory_csv(std::ostream& os, const ShootingOutcome& outcome) {
  os << (outcome.domain == OdeDomain::Radius ? "r,y,dy\n" : "s,z,dz\n");
  for (const auto& p : outcome.trajectory) {
    os << fmt::format("{:.17g},{:.17g},{:.17g}\n", p.x, p.y, p.dy);
  }
}

}  // namespace hardy
