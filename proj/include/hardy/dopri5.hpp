#pragma once

// Dormand-Prince 5(4) with the standard 4th-order continuous extension
// (Hairer, Norsett & Wanner, "Solving ODEs I", dopri5).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "hardy/error.hpp"

namespace hardy {

template <std::size_t N>
using OdeState = std::array<double, N>;

/// One accepted step together with its dense-output coefficients.
template <std::size_t N>
struct Dopri5Step {
  double x0 = 0.0;
  double h = 0.0;
  OdeState<N> y0{};
  OdeState<N> y1{};
  std::array<OdeState<N>, 5> cont{};

  /// State at x0 + theta*h, theta in [0, 1].
  OdeState<N> dense(double theta) const {
    const double t1 = 1.0 - theta;
    OdeState<N> out{};
    for (std::size_t i = 0; i < N; ++i) {
      out[i] = cont[0][i] +
               theta * (cont[1][i] + t1 * (cont[2][i] + theta * (cont[3][i] + t1 * cont[4][i])));
    }
    return out;
  }
};

struct Dopri5Options {
  double rtol = 1e-10;
  double atol = 1e-30;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0 picks 1e-4 of the span
  std::size_t max_steps = 50'000'000;
};

/// Adaptive stepper. The error norm scales every component by the largest
/// state magnitude so that components passing through zero do not stall it.
template <std::size_t N, class Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, Dopri5Options opt) : rhs_(std::move(rhs)), opt_(opt) {}

  /// Integrates from x0 to x_end, calling on_step(step) after every accepted
  /// step. on_step may return false to stop early. Returns the final x.
  template <class OnStep>
  double run(double x0, OdeState<N> y, double x_end, OnStep&& on_step) {
    const double span = x_end - x0;
    if (span <= 0.0) return x0;
    double h = opt_.initial_step > 0.0 ? opt_.initial_step : 1e-4 * span;
    h = std::min({h, opt_.max_step, span});
    double x = x0;
    OdeState<N> k1 = rhs_(x, y);
    std::size_t steps = 0;
    while (x < x_end) {
      if (++steps > opt_.max_steps) {
        throw Error(ErrorCode::StepSizeUnderflow, "step budget exhausted at x=" + std::to_string(x));
      }
      if (x + h > x_end) h = x_end - x;
      Dopri5Step<N> step;
      double err = 0.0;
      OdeState<N> k7{};
      attempt(x, y, k1, h, step, k7, err);
      if (!std::isfinite(err)) err = 1e10;
      if (err <= 1.0) {
        x = (x + h >= x_end) ? x_end : x + h;
        y = step.y1;
        k1 = k7;
        if (!on_step(step, y, k1)) return x;
        const double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 5.0;
        h *= std::clamp(fac, 0.2, 5.0);
      } else {
        h *= std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.9);
      }
      h = std::min(h, opt_.max_step);
      if (h < 1e-14 * std::max(1.0, std::abs(x))) {
        throw Error(ErrorCode::StepSizeUnderflow,
                    "integrator stalled at x=" + std::to_string(x) +
                        "; potential too singular for the declared exponent?");
      }
    }
    return x;
  }

  /// Rescales the FSAL derivative after the caller rescaled the state.
  static void rescale(OdeState<N>& v, double factor) {
    for (auto& c : v) c *= factor;
  }

 private:
  void attempt(double x, const OdeState<N>& y, const OdeState<N>& k1, double h, Dopri5Step<N>& step,
               OdeState<N>& k7, double& err) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                     a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    OdeState<N> tmp{};
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    const OdeState<N> k2 = rhs_(x + c2 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    const OdeState<N> k3 = rhs_(x + c3 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    const OdeState<N> k4 = rhs_(x + c4 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    }
    const OdeState<N> k5 = rhs_(x + c5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) {
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    }
    const OdeState<N> k6 = rhs_(x + h, tmp);
    OdeState<N> y1{};
    for (std::size_t i = 0; i < N; ++i) {
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    }
    k7 = rhs_(x + h, y1);

    double scale_mag = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      scale_mag = std::max({scale_mag, std::abs(y[i]), std::abs(y1[i])});
    }
    const double sc = opt_.atol + opt_.rtol * scale_mag;
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double e =
          h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      acc += (e / sc) * (e / sc);
    }
    err = std::sqrt(acc / static_cast<double>(N));

    step.x0 = x;
    step.h = h;
    step.y0 = y;
    step.y1 = y1;
    for (std::size_t i = 0; i < N; ++i) {
      const double ydiff = y1[i] - y[i];
      const double bspl = h * k1[i] - ydiff;
      step.cont[0][i] = y[i];
      step.cont[1][i] = ydiff;
      step.cont[2][i] = bspl;
      step.cont[3][i] = ydiff - h * k7[i] - bspl;
      step.cont[4][i] =
          h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
  }

  Rhs rhs_;
  Dopri5Options opt_;
};

}  // namespace hardy
