#pragma once

// Feasibility of y'' + y'/r + c v y = 0 (a positive solution on (0, R)) and
// the best constant c(V) = sup{c feasible}, found by bracketing + bisection.
// Feasibility is monotone in c by Sturm comparison.
//
// Non-critical potentials shoot the recessive solution outward in r; a zero
// before R means infeasible. Critical potentials shoot the solution vanishing
// at R inward in s = ln(1/r): it has no zero on (s_R, inf) exactly when the
// equation is disconjugate there. Past the horizon s_max, Euler comparisons
// against z'' + gamma/x^2 z = 0 settle the tail.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string_view>
#include <vector>

#include "hardy/bessel.hpp"
#include "hardy/error.hpp"
#include "hardy/ode.hpp"
#include "hardy/potential.hpp"

namespace hardy {

enum class Verdict { Feasible, Infeasible, Indeterminate };

constexpr std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Feasible: return "Feasible";
    case Verdict::Infeasible: return "Infeasible";
    case Verdict::Indeterminate: return "Indeterminate";
  }
  return "Unknown";
}

enum class Certificate {
  Trivial,             // c = 0: y = 1
  NoZeroOnInterval,    // radius-domain shot reached R without a zero
  ZeroFound,           // a zero inside (0, R)
  NonOscillatoryTail,  // Riccati comparison with the Euler majorant 1/(4x^2)
  OscillatoryTail,     // Euler minorant gamma/x^2, gamma > 1/4, over a full zero spacing
  None,
};

constexpr std::string_view to_string(Certificate c) {
  switch (c) {
    case Certificate::Trivial: return "Trivial";
    case Certificate::NoZeroOnInterval: return "NoZeroOnInterval";
    case Certificate::ZeroFound: return "ZeroFound";
    case Certificate::NonOscillatoryTail: return "NonOscillatoryTail";
    case Certificate::OscillatoryTail: return "OscillatoryTail";
    case Certificate::None: return "None";
  }
  return "Unknown";
}

struct FeasibilityResult {
  double multiplier = 0.0;
  Verdict verdict = Verdict::Indeterminate;
  Certificate certificate = Certificate::None;
  ShootingOutcome evidence;
  double euler_gamma = 0.0;  // gamma of the comparison equation, when one was used

  bool feasible() const { return verdict == Verdict::Feasible; }
};

struct FeasibilityOptions {
  IntegrateOptions integrate;
  double r0_factor = 1e-8;  // radius-domain start r0 = r0_factor * R
  double s_max = 1e6;       // log-domain horizon
  int tail_samples = 4000;
};

namespace detail {

// Geometric samples of x = s + shift on [s_lo, s_hi] (x must stay positive).
inline std::vector<double> geometric_s_grid(double s_lo, double s_hi, double shift, int count) {
  const double x_lo = s_lo + shift;
  const double x_hi = s_hi + shift;
  std::vector<double> s(static_cast<std::size_t>(count));
  const double ratio = std::log(x_hi / x_lo) / (count - 1);
  for (int i = 0; i < count; ++i) s[static_cast<std::size_t>(i)] = x_lo * std::exp(ratio * i) - shift;
  s.front() = s_lo;
  s.back() = s_hi;
  return s;
}

// Oscillation on [s1, s_max]: c a(s) (s + shift)^2 >= gamma > 1/4 there and
// ln((s_max + shift)/(s1 + shift)) >= pi / sqrt(gamma - 1/4), so a solution of
// the Euler minorant has two zeros inside and every solution has one.
inline std::optional<double> oscillation_certificate(const HardyODEProblem& prob, int samples) {
  const double s_lo = prob.start_log();
  const double s_hi = prob.s_max;
  std::vector<double> shifts;
  if (auto hint = prob.potential.log_shift_hint()) shifts.push_back(*hint);
  shifts.push_back(1.0 - s_lo);
  if (s_lo > 0.0) shifts.push_back(0.0);
  for (double shift : shifts) {
    if (!(s_lo + shift > 0.0)) continue;
    const auto grid = geometric_s_grid(s_lo, s_hi, shift, samples);
    std::vector<double> suffix_min(grid.size());
    double running = std::numeric_limits<double>::infinity();
    for (std::size_t i = grid.size(); i-- > 0;) {
      const double x = grid[i] + shift;
      running = std::min(running, prob.log_coefficient(grid[i]) * x * x);
      suffix_min[i] = running;
    }
    const double x_hi = s_hi + shift;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      const double gamma = suffix_min[i];
      if (!(gamma > 0.25)) continue;
      const double span = std::log(x_hi / (grid[i] + shift));
      if (span >= std::numbers::pi / std::sqrt(gamma - 0.25)) return gamma;
    }
  }
  return std::nullopt;
}

// Non-oscillation past s_max: with w = z'/z > 0 at s_max and
// x = s - s_max + 1/(2w), the principal Euler log-derivative 1/(2x) starts
// below w; if c a(s) <= 1/(4x^2) on the tail, w never falls below it.
inline bool nonoscillation_certificate(const HardyODEProblem& prob, const ShootingOutcome& shot,
                                       int samples) {
  const double z = shot.final_state[0];
  const double dz = shot.final_state[1];
  if (!(z > 0.0)) return false;
  const double w = dz / z;
  if (!(w > 0.0)) return false;
  const double x0 = 0.5 / w;
  const double log_span = std::log(1e300 / x0);
  for (int i = 0; i < samples; ++i) {
    const double x = x0 * std::exp(log_span * i / (samples - 1));
    const double s = prob.s_max + (x - x0);
    const double g = prob.log_coefficient(s) * x * x;
    if (!(g <= 0.25 * (1.0 + 1e-12))) return false;
  }
  return true;
}

}  // namespace detail

/// Whether y'' + y'/r + c v y = 0 has a positive solution on (0, R).
inline FeasibilityResult feasible(const RadialPotential& p, double c, double R,
                                  const FeasibilityOptions& opt = {}) {
  if (!(c >= 0.0)) throw Error(ErrorCode::DomainError, "multiplier must be >= 0");
  if (!(R > 0.0)) throw Error(ErrorCode::DomainError, "R must be positive");
  if (R > p.r_max() * (1.0 + 1e-12)) throw Error(ErrorCode::DomainError, "R exceeds the potential's r_max");
  FeasibilityResult out;
  out.multiplier = c;
  if (c == 0.0 || p.is_zero()) {
    out.verdict = Verdict::Feasible;
    out.certificate = Certificate::Trivial;
    out.evidence.domain = OdeDomain::Radius;
    out.evidence.trajectory = {{0.0, 1.0, 0.0}, {R, 1.0, 0.0}};
    out.evidence.final_state = {1.0, 0.0};
    out.evidence.end = R;
    return out;
  }

  HardyODEProblem prob{.potential = p, .multiplier = c, .R = R};
  if (!p.needs_log_domain()) {
    prob.r0 = opt.r0_factor * R;
    out.evidence = integrate(prob, opt.integrate);
    const bool inside = out.evidence.first_zero && *out.evidence.first_zero < R * (1.0 - 1e-13);
    out.verdict = inside ? Verdict::Infeasible : Verdict::Feasible;
    out.certificate = inside ? Certificate::ZeroFound : Certificate::NoZeroOnInterval;
    return out;
  }

  prob.domain = OdeDomain::Log;
  prob.s_max = opt.s_max;
  if (auto gamma = detail::oscillation_certificate(prob, opt.tail_samples)) {
    out.evidence = integrate(prob, opt.integrate);
    out.verdict = Verdict::Infeasible;
    out.certificate = Certificate::OscillatoryTail;
    out.euler_gamma = *gamma;
    return out;
  }
  out.evidence = integrate(prob, opt.integrate);
  if (out.evidence.first_zero) {
    out.verdict = Verdict::Infeasible;
    out.certificate = Certificate::ZeroFound;
    return out;
  }
  if (detail::nonoscillation_certificate(prob, out.evidence, opt.tail_samples)) {
    out.verdict = Verdict::Feasible;
    out.certificate = Certificate::NonOscillatoryTail;
    out.euler_gamma = 0.25;
    return out;
  }
  out.verdict = Verdict::Indeterminate;
  out.certificate = Certificate::None;
  return out;
}

enum class BestConstantStatus { Converged, IndeterminateBand };

constexpr std::string_view to_string(BestConstantStatus s) {
  return s == BestConstantStatus::Converged ? "Converged" : "IndeterminateBand";
}

struct BestConstantResult {
  double c_best = 0.0;
  double c_lo = 0.0;  // largest multiplier certified feasible
  double c_hi = 0.0;  // smallest multiplier certified infeasible
  int iterations = 0;
  FeasibilityResult evidence_lo;
  FeasibilityResult evidence_hi;
  double tolerance = 1e-6;
  BestConstantStatus status = BestConstantStatus::Converged;
  // Multipliers that could not be certified either way (empty when converged).
  std::optional<std::pair<double, double>> indeterminate;
};

/// c(V) on the ball of radius R. Doubling from c = 1 finds an infeasible
/// bracket (capped at 2^60), then bisection runs to relative width tol.
/// When some multipliers are uncertifiable at the horizon, the certified
/// edges on both sides of that band are refined instead and c_best = c_lo.
inline BestConstantResult best_constant(const RadialPotential& p, double R, double tol = 1e-6,
                                        const FeasibilityOptions& opt = {}) {
  if (!(tol > 0.0)) throw Error(ErrorCode::DomainError, "tolerance must be positive");
  if (p.is_zero()) {
    throw Error(ErrorCode::NoUpperBracket, "potential vanishes identically; c(V) is infinite");
  }
  BestConstantResult out;
  out.tolerance = tol;
  out.evidence_lo = feasible(p, 0.0, R, opt);

  std::optional<double> ind_lo;
  std::optional<double> ind_hi;
  bool have_hi = false;
  auto record = [&](const FeasibilityResult& f) {
    ++out.iterations;
    switch (f.verdict) {
      case Verdict::Feasible:
        if (f.multiplier >= out.c_lo) {
          out.c_lo = f.multiplier;
          out.evidence_lo = f;
        }
        break;
      case Verdict::Infeasible:
        if (!have_hi || f.multiplier <= out.c_hi) {
          out.c_hi = f.multiplier;
          out.evidence_hi = f;
          have_hi = true;
        }
        break;
      case Verdict::Indeterminate:
        ind_lo = ind_lo ? std::min(*ind_lo, f.multiplier) : f.multiplier;
        ind_hi = ind_hi ? std::max(*ind_hi, f.multiplier) : f.multiplier;
        break;
    }
  };

  constexpr double kCap = 0x1p60;
  for (double c = 1.0; !have_hi; c *= 2.0) {
    if (c > kCap) {
      throw Error(ErrorCode::NoUpperBracket, "still feasible at c = 2^60");
    }
    record(feasible(p, c, R, opt));
  }

  auto wide = [&](double lo, double hi) { return hi - lo > tol * std::max(1.0, lo); };
  while (true) {
    double mid = 0.0;
    if (!ind_lo) {
      if (!wide(out.c_lo, out.c_hi)) break;
      mid = 0.5 * (out.c_lo + out.c_hi);
    } else if (wide(out.c_lo, *ind_lo)) {
      mid = 0.5 * (out.c_lo + *ind_lo);
    } else if (wide(*ind_hi, out.c_hi)) {
      mid = 0.5 * (*ind_hi + out.c_hi);
    } else {
      break;
    }
    record(feasible(p, mid, R, opt));
  }

  if (ind_lo) {
    out.status = BestConstantStatus::IndeterminateBand;
    out.indeterminate = std::make_pair(*ind_lo, *ind_hi);
    out.c_best = out.c_lo;
  } else {
    out.c_best = 0.5 * (out.c_lo + out.c_hi);
  }
  return out;
}

}  // namespace hardy
