#pragma once

// X/Y admissibility from L(r) = ln(r) * int_0^r t v(t) dt. In the log
// variable s = ln(1/r) this is L = -s * int_s^inf a(u) du, which is what is
// evaluated; probes are therefore log-radii s (increasing s = decreasing r).

#include <cmath>
#include <limits>
#include <string_view>
#include <vector>

#include "hardy/error.hpp"
#include "hardy/parallel.hpp"
#include "hardy/potential.hpp"
#include "hardy/quadrature.hpp"

namespace hardy {

enum class AdmissibilityClass { X, Y, Indeterminate };

constexpr std::string_view to_string(AdmissibilityClass c) {
  switch (c) {
    case AdmissibilityClass::X: return "X";
    case AdmissibilityClass::Y: return "Y";
    case AdmissibilityClass::Indeterminate: return "Indeterminate";
  }
  return "Unknown";
}

struct ClassLabel {
  AdmissibilityClass label = AdmissibilityClass::Indeterminate;
  std::vector<double> evidence;         // L at each probe
  std::vector<double> probe_log_radii;  // s = ln(1/r), increasing
  bool divergent_inner_integral = false;
};

struct ClassifyOptions {
  double threshold = -1e6;
  int window = 5;
  double shrink = 0.9;  // decrements must contract by this factor for X
};

/// s_k = s0 + (2^k - 1) * max(1, |s0|), with s0 = ln(1e6 / r_ref) and
/// r_ref = r_max (or 1 when unbounded).
inline std::vector<double> default_probes(const RadialPotential& p, int count = 41) {
  const double r_ref = std::isfinite(p.r_max()) ? p.r_max() : 1.0;
  const double s0 = std::log(1e6 / r_ref);
  const double step = std::max(1.0, std::abs(s0));
  std::vector<double> probes;
  probes.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) probes.push_back(s0 + (std::ldexp(1.0, k) - 1.0) * step);
  return probes;
}

/// The tail integral int_s^inf a(u) du = int_0^r t v(t) dt at r = e^{-s}.
inline TailIntegral inner_integral(const RadialPotential& p, double s) {
  return tail_integral([&p](double u) { return p.log_coefficient(u); }, s);
}

inline ClassLabel classify(const RadialPotential& p, const std::vector<double>& probes,
                           const ClassifyOptions& opt = {}) {
  if (probes.size() < static_cast<std::size_t>(opt.window) + 1) {
    throw Error(ErrorCode::DomainError, "classify needs more probes than the window length");
  }
  for (std::size_t i = 1; i < probes.size(); ++i) {
    if (!(probes[i] > probes[i - 1])) throw Error(ErrorCode::DomainError, "probe radii must decrease");
  }
  const double r_ref = std::isfinite(p.r_max()) ? p.r_max() : 1.0;
  if (!(probes.back() >= std::log(1e6 / r_ref) - 1e-12)) {
    throw Error(ErrorCode::DomainError, "smallest probe must be <= 1e-6 * r_max");
  }
  ClassLabel out;
  out.probe_log_radii = probes;
  const auto tails =
      parallel_map<TailIntegral>(probes.size(), [&](std::size_t i) { return inner_integral(p, probes[i]); });
  for (std::size_t i = 0; i < probes.size(); ++i) {
    if (tails[i].divergent) {
      out.divergent_inner_integral = true;
      out.evidence.push_back(-std::numeric_limits<double>::infinity());
    } else {
      out.evidence.push_back(-probes[i] * tails[i].value);
    }
  }
  if (out.divergent_inner_integral) {
    out.label = AdmissibilityClass::Y;
    return out;
  }
  const auto& L = out.evidence;
  const std::size_t n = L.size();
  const std::size_t w = static_cast<std::size_t>(opt.window);
  bool monotone_decreasing = true;
  bool contracting = true;
  for (std::size_t i = n - w; i + 1 < n; ++i) {
    const double d = L[i] - L[i + 1];
    const double flat = 1e-12 * (1.0 + std::abs(L[i]));
    if (d <= flat) monotone_decreasing = false;
    if (i + 2 < n) {
      const double d_next = L[i + 1] - L[i + 2];
      if (d_next > flat && d_next > opt.shrink * d) contracting = false;
    }
  }
  double floor = L.front();
  for (double v : L) floor = std::min(floor, v);
  if (floor >= opt.threshold && (!monotone_decreasing || contracting)) {
    out.label = AdmissibilityClass::X;
  } else if (L.back() < opt.threshold && monotone_decreasing) {
    out.label = AdmissibilityClass::Y;
  } else {
    out.label = AdmissibilityClass::Indeterminate;
  }
  return out;
}

inline ClassLabel classify(const RadialPotential& p, const ClassifyOptions& opt = {}) {
  return classify(p, default_probes(p), opt);
}

}  // namespace hardy
