#pragma once

// Discretized eigenvalue oracles, independent of the shooting path.
//
// Both quotients are written in the reduced variable w = u r^{(n-2)/2}, where
// the Hardy gap becomes int w'^2 r dr and the inverse-square term drops out.
// Linear elements for the stiffness, lumped mass, inverse iteration with a
// Thomas solve. Inside the cutoff r_min the trial function is continued by
// its exact behavior: w constant for the reduced quotient, w ~ r^kappa for
// the weighted problem.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hardy/error.hpp"
#include "hardy/parallel.hpp"
#include "hardy/potential.hpp"
#include "hardy/quadrature.hpp"

namespace hardy {

enum class GridMapping { Uniform, LogSpaced };

constexpr std::string_view to_string(GridMapping m) {
  return m == GridMapping::Uniform ? "Uniform" : "LogSpaced";
}

struct GridSpec {
  int N = 10'000;
  GridMapping mapping = GridMapping::LogSpaced;
  double R = 1.0;
  double r_min = 1e-6;

  static GridSpec log_spaced(int N, double R, double r_min_factor = 1e-6) {
    return {N, GridMapping::LogSpaced, R, r_min_factor * R};
  }

  void validate() const {
    if (N < 16) throw Error(ErrorCode::DomainError, "grid needs N >= 16");
    if (!(r_min > 0.0 && r_min < R)) throw Error(ErrorCode::DomainError, "grid needs 0 < r_min < R");
  }

  std::vector<double> nodes() const {
    validate();
    std::vector<double> r(static_cast<std::size_t>(N));
    const double last = N - 1;
    for (int i = 0; i < N; ++i) {
      const double t = i / last;
      r[static_cast<std::size_t>(i)] = mapping == GridMapping::Uniform
                                           ? r_min + (R - r_min) * t
                                           : r_min * std::exp(std::log(R / r_min) * t);
    }
    r.front() = r_min;
    r.back() = R;
    return r;
  }
};

struct EigenResult {
  double lambda1 = 0.0;
  std::vector<double> eigenvector;  // w at the nodes, max 1, w(R) = 0
  GridSpec grid;
  double residual_norm = 0.0;  // |K w - lambda M w|_inf / |K|_inf
  int iterations = 0;
};

namespace detail {

// Symmetric tridiagonal K (diag, off[i] couples i and i+1) against a positive
// diagonal M. Smallest eigenvalue of K w = lambda M w by inverse iteration.
inline EigenResult smallest_generalized(const std::vector<double>& diag, const std::vector<double>& off,
                                        const std::vector<double>& mass, double tol, int max_iter) {
  const std::size_t n = diag.size();
  for (double m : mass) {
    if (!(m > 0.0)) throw Error(ErrorCode::SingularMass, "mass matrix has a non-positive diagonal entry");
  }
  // LDL^T factors of K, reused every sweep.
  std::vector<double> d(n);
  std::vector<double> l(n > 0 ? n - 1 : 0);
  d[0] = diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    l[i - 1] = off[i - 1] / d[i - 1];
    d[i] = diag[i] - l[i - 1] * off[i - 1];
    if (!(d[i] > 0.0)) throw Error(ErrorCode::DomainError, "stiffness matrix is not positive definite");
  }
  auto solve = [&](std::vector<double>& x) {
    for (std::size_t i = 1; i < n; ++i) x[i] -= l[i - 1] * x[i - 1];
    for (std::size_t i = 0; i < n; ++i) x[i] /= d[i];
    for (std::size_t i = n - 1; i-- > 0;) x[i] -= l[i] * x[i + 1];
  };
  auto apply_k = [&](const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < n; ++i) {
      double v = diag[i] * x[i];
      if (i > 0) v += off[i - 1] * x[i - 1];
      if (i + 1 < n) v += off[i] * x[i + 1];
      y[i] = v;
    }
  };

  EigenResult out;
  std::vector<double> w(n, 1.0);
  std::vector<double> next(n);
  for (int it = 1; it <= max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) next[i] = mass[i] * w[i];
    solve(next);
    double peak = 0.0;
    for (double v : next) peak = std::max(peak, std::abs(v));
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      next[i] /= peak;
      change = std::max(change, std::abs(next[i] - w[i]));
    }
    w.swap(next);
    out.iterations = it;
    if (change <= tol) break;
    if (it == max_iter) throw Error(ErrorCode::DomainError, "inverse iteration did not converge");
  }
  std::vector<double> kw(n);
  apply_k(w, kw);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += w[i] * kw[i];
    den += w[i] * mass[i] * w[i];
  }
  out.lambda1 = num / den;
  double res = 0.0;
  double knorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    res = std::max(res, std::abs(kw[i] - out.lambda1 * mass[i] * w[i]));
    double row = std::abs(diag[i]);
    if (i > 0) row += std::abs(off[i - 1]);
    if (i + 1 < n) row += std::abs(off[i]);
    knorm = std::max(knorm, row);
  }
  out.residual_norm = res / knorm;
  if (w[0] < 0.0) {
    for (double& v : w) v = -v;
  }
  w.push_back(0.0);
  out.eigenvector = std::move(w);
  return out;
}

// Stiffness of int w'^2 r dr with linear elements; node N-1 is Dirichlet.
inline void reduced_stiffness(const std::vector<double>& r, std::vector<double>& diag, std::vector<double>& off) {
  const std::size_t n = r.size() - 1;
  diag.assign(n, 0.0);
  off.assign(n - 1, 0.0);
  for (std::size_t e = 0; e + 1 < r.size(); ++e) {
    const double h = r[e + 1] - r[e];
    const double k = 0.5 * (r[e + 1] * r[e + 1] - r[e] * r[e]) / (h * h);
    diag[e] += k;
    if (e + 1 < n) {
      diag[e + 1] += k;
      off[e] -= k;
    }
  }
}

inline double dual_cell(const std::vector<double>& r, std::size_t i) {
  const double left = i > 0 ? r[i] - r[i - 1] : 0.0;
  const double right = i + 1 < r.size() ? r[i + 1] - r[i] : 0.0;
  return 0.5 * (left + right);
}

// int_0^{r_min} v(r) (r/r_min)^{2 kappa} r dr, in s = ln(1/r).
inline double inner_mass(const RadialPotential& p, double r_min, double kappa) {
  const double s_min = -std::log(r_min);
  const auto tail = tail_integral(
      [&](double s) { return p.log_coefficient(s) * std::exp(-2.0 * kappa * (s - s_min)); }, s_min);
  if (tail.divergent) {
    throw Error(ErrorCode::SingularMass, "potential is not integrable against r near 0");
  }
  return tail.value;
}

}  // namespace detail

struct EigenOptions {
  double tol = 1e-10;
  int max_iter = 1'000'000;
};

/// Smallest eigenvalue of int w'^2 r / int v w^2 r over w(R) = 0, the
/// discretized c(V). w is free at r_min and held constant on (0, r_min).
inline EigenResult reduced_rayleigh_min(const RadialPotential& p, const GridSpec& grid,
                                        const EigenOptions& opt = {}) {
  const auto r = grid.nodes();
  if (grid.R > p.r_max() * (1.0 + 1e-12)) throw Error(ErrorCode::DomainError, "R exceeds the potential's r_max");
  if (p.is_zero()) throw Error(ErrorCode::SingularMass, "potential vanishes identically");
  std::vector<double> diag;
  std::vector<double> off;
  detail::reduced_stiffness(r, diag, off);
  std::vector<double> mass(diag.size());
  for (std::size_t i = 0; i < mass.size(); ++i) mass[i] = p.eval(r[i]) * r[i] * detail::dual_cell(r, i);
  mass[0] += detail::inner_mass(p, grid.r_min, 0.0);
  auto out = detail::smallest_generalized(diag, off, mass, opt.tol, opt.max_iter);
  out.grid = grid;
  return out;
}

/// mu_n = ((n - 2)/2)^2.
inline double hardy_mu(int n) {
  const double b = 0.5 * (n - 2);
  return b * b;
}

/// First eigenvalue of -Delta u - mu u/|x|^2 = lambda V u on the ball, radial
/// form. With kappa = sqrt(mu_n - mu) the numerator becomes
/// int w'^2 r + kappa^2 int w^2/r + kappa w(r_min)^2.
inline EigenResult weighted_eigen(const RadialPotential& p, double mu, int n, const GridSpec& grid,
                                  const EigenOptions& opt = {}) {
  if (n < 1) throw Error(ErrorCode::DomainError, "dimension must be positive");
  if (!(mu >= 0.0)) throw Error(ErrorCode::DomainError, "mu must be >= 0");
  const double mu_n = hardy_mu(n);
  if (!(mu < mu_n)) throw Error(ErrorCode::IndefiniteForm, "mu must be below mu_n = ((n-2)/2)^2");
  const auto r = grid.nodes();
  if (grid.R > p.r_max() * (1.0 + 1e-12)) throw Error(ErrorCode::DomainError, "R exceeds the potential's r_max");
  if (p.is_zero()) throw Error(ErrorCode::SingularMass, "potential vanishes identically");
  const double kappa = std::sqrt(mu_n - mu);
  std::vector<double> diag;
  std::vector<double> off;
  detail::reduced_stiffness(r, diag, off);
  std::vector<double> mass(diag.size());
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const double cell = detail::dual_cell(r, i);
    diag[i] += kappa * kappa * cell / r[i];
    mass[i] = p.eval(r[i]) * r[i] * cell;
  }
  diag[0] += kappa;
  mass[0] += detail::inner_mass(p, grid.r_min, kappa);
  auto out = detail::smallest_generalized(diag, off, mass, opt.tol, opt.max_iter);
  out.grid = grid;
  return out;
}

enum class Extrapolation { Richardson, Aitken };

struct LambdaLimitOptions {
  int K = 12;
  int N = 4000;
  double r_min_factor = 1e-6;
  Extrapolation method = Extrapolation::Richardson;
};

struct LambdaLimit {
  double value = 0.0;
  std::vector<double> mu;
  std::vector<double> lambda;
};

/// lim_{mu -> mu_n} lambda_mu^1 from mu_k = (1 - 2^{-k}) mu_n, k = 1..K.
/// The error behaves like sqrt(mu_n - mu), so Richardson uses ratio 2^{-1/2}.
inline LambdaLimit lambda_limit(const RadialPotential& p, int n, double R, const LambdaLimitOptions& opt = {}) {
  if (n < 3) throw Error(ErrorCode::DomainError, "dimension must be >= 3");
  if (opt.K < 3) throw Error(ErrorCode::DomainError, "need K >= 3");
  const double mu_n = hardy_mu(n);
  const auto grid = GridSpec::log_spaced(opt.N, R, opt.r_min_factor);
  LambdaLimit out;
  for (int k = 1; k <= opt.K; ++k) out.mu.push_back((1.0 - std::ldexp(1.0, -k)) * mu_n);
  out.lambda = parallel_map<double>(out.mu.size(), [&](std::size_t i) {
    return weighted_eigen(p, out.mu[i], n, grid).lambda1;
  });
  for (std::size_t i = 1; i < out.lambda.size(); ++i) {
    if (!(out.lambda[i] < out.lambda[i - 1])) {
      throw Error(ErrorCode::NonMonotoneSequence,
                  "lambda_mu is not decreasing at k = " + std::to_string(i + 1));
    }
  }
  const std::size_t m = out.lambda.size();
  const double l0 = out.lambda[m - 3];
  const double l1 = out.lambda[m - 2];
  const double l2 = out.lambda[m - 1];
  if (opt.method == Extrapolation::Aitken) {
    const double denom = (l2 - l1) - (l1 - l0);
    out.value = denom != 0.0 ? l2 - (l2 - l1) * (l2 - l1) / denom : l2;
  } else {
    const double q = std::numbers::sqrt2 / 2.0;
    out.value = (l2 - q * l1) / (1.0 - q);
  }
  return out;
}

/// A function with optional first and second derivatives; missing ones are
/// taken by 4th-order central differences.
struct RadialFunction {
  std::function<double(double)> f;
  std::function<double(double)> df = {};
  std::function<double(double)> d2f = {};
};

struct PoincareResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double boundary_a = 0.0;  // limit of k h^2 phi'/phi at a
  double boundary_b = 0.0;
};

namespace detail {

inline double fd_step(double x, double a, double b) {
  return std::min(1e-3 * (b - a), 0.2 * std::min(x - a, b - x));
}

inline double first_derivative(const RadialFunction& g, double x, double a, double b) {
  if (g.df) return g.df(x);
  const double h = fd_step(x, a, b);
  return (8.0 * (g.f(x + h) - g.f(x - h)) - (g.f(x + 2 * h) - g.f(x - 2 * h))) / (12.0 * h);
}

inline double second_derivative(const RadialFunction& g, double x, double a, double b) {
  if (g.d2f) return g.d2f(x);
  const double h = fd_step(x, a, b);
  return (-g.f(x + 2 * h) + 16.0 * g.f(x + h) - 30.0 * g.f(x) + 16.0 * g.f(x - h) - g.f(x - 2 * h)) /
         (12.0 * h * h);
}

}  // namespace detail

/// int_a^b h'^2 k against int_a^b -h^2 (k' phi' + k phi'')/phi, on the grid
/// mapped onto [a, b] with 5-point Gauss-Legendre per cell.
inline PoincareResult poincare_check(const RadialFunction& k, const RadialFunction& phi, const RadialFunction& h,
                                     double a, double b, const GridSpec& grid, double bc_tol = 1e-6) {
  if (!(b > a)) throw Error(ErrorCode::DomainError, "need a < b");
  if (!k.f || !phi.f || !h.f) throw Error(ErrorCode::DomainError, "k, phi and h must be callable");
  const auto r = grid.nodes();
  std::vector<double> x(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) x[i] = a + (b - a) * (r[i] - r.front()) / (r.back() - r.front());
  x.front() = a;
  x.back() = b;

  auto boundary = [&](double at, double inward) {
    const double y = at + inward * 1e-9 * (b - a);
    const double hv = h.f(y);
    return k.f(y) * hv * hv * detail::first_derivative(phi, y, a, b) / phi.f(y);
  };

  PoincareResult out;
  out.boundary_a = boundary(a, 1.0);
  out.boundary_b = boundary(b, -1.0);

  static constexpr std::array<double, 5> nodes = {-0.906179845938663992797627, -0.538469310105683091036314, 0.0,
                                                  0.538469310105683091036314, 0.906179845938663992797627};
  static constexpr std::array<double, 5> weights = {0.236926885056189087514264, 0.478628670499366468041292,
                                                    0.568888888888888888888889, 0.478628670499366468041292,
                                                    0.236926885056189087514264};
  for (std::size_t c = 0; c + 1 < x.size(); ++c) {
    const double mid = 0.5 * (x[c] + x[c + 1]);
    const double half = 0.5 * (x[c + 1] - x[c]);
    for (std::size_t q = 0; q < nodes.size(); ++q) {
      const double y = mid + half * nodes[q];
      const double wq = half * weights[q];
      const double kv = k.f(y);
      const double hv = h.f(y);
      const double hp = detail::first_derivative(h, y, a, b);
      const double pv = phi.f(y);
      if (!(pv > 0.0)) throw Error(ErrorCode::DomainError, "phi must be positive on (a, b)");
      const double pp = detail::first_derivative(phi, y, a, b);
      const double ppp = detail::second_derivative(phi, y, a, b);
      const double kp = detail::first_derivative(k, y, a, b);
      out.lhs += wq * hp * hp * kv;
      out.rhs -= wq * hv * hv * (kp * pp + kv * ppp) / pv;
    }
  }
  out.margin = out.lhs - out.rhs;
  const double scale = std::max({1.0, std::abs(out.lhs), std::abs(out.boundary_a), std::abs(out.boundary_b)});
  if (std::abs(out.boundary_a - out.boundary_b) > bc_tol * scale) {
    throw Error(ErrorCode::BoundaryConditionViolated,
                "k h^2 phi'/phi has different limits at a and b");
  }
  return out;
}

/// [int u'^2 r^{n-1} - mu_n int u^2 r^{n-3}] / int v u^2 r^{n-1} for samples
/// u(r_i) on an increasing grid ending at R with u(R) = 0. In w = u r^{(n-2)/2}
/// and t = ln r the numerator is int w_t^2 dt; w is taken linear in t between
/// samples and constant below the first one.
inline double hardy_quotient(std::span<const double> r, std::span<const double> u, const RadialPotential& p, int n) {
  if (r.size() != u.size() || r.size() < 3) throw Error(ErrorCode::DomainError, "need >= 3 matching samples");
  if (n < 2) throw Error(ErrorCode::DomainError, "dimension must be >= 2");
  double peak = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!(r[i] > 0.0) || (i > 0 && !(r[i] > r[i - 1]))) {
      throw Error(ErrorCode::DomainError, "radii must be positive and increasing");
    }
    peak = std::max(peak, std::abs(u[i]));
  }
  if (std::abs(u.back()) > 1e-12 * peak) throw Error(ErrorCode::DomainError, "u(R) must vanish");
  const double beta = 0.5 * (n - 2);
  std::vector<double> w(r.size());
  std::vector<double> t(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    w[i] = u[i] * std::pow(r[i], beta);
    t[i] = std::log(r[i]);
  }
  static constexpr std::array<double, 3> gx = {-0.774596669241483377035853, 0.0, 0.774596669241483377035853};
  static constexpr std::array<double, 3> gw = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double num = 0.0;
  double den = w[0] * w[0] * detail::inner_mass(p, r[0], 0.0);
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double dt = t[i + 1] - t[i];
    const double dw = w[i + 1] - w[i];
    num += dw * dw / dt;
    for (std::size_t q = 0; q < gx.size(); ++q) {
      const double theta = 0.5 * (1.0 + gx[q]);
      const double tq = t[i] + theta * dt;
      const double wq = w[i] + theta * dw;
      const double rq = std::exp(tq);
      den += 0.5 * dt * gw[q] * rq * rq * p.eval(rq) * wq * wq;
    }
  }
  if (!(den > 0.0)) throw Error(ErrorCode::DegenerateDenominator, "int v u^2 r^{n-1} is not positive");
  return num / den;
}

}  // namespace hardy
