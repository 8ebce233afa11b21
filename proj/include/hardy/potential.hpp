#pragma once

// Radial potentials v(r) >= 0 on (0, r_max] together with their log-variable
// form a(s) = e^{-2s} v(e^{-s}), s = ln(1/r). All singular arithmetic goes
// through a(s) so that radii far below the double range (s ~ 1e6) stay usable.

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hardy/error.hpp"
#include "hardy/special.hpp"

namespace hardy {

enum class PotentialKind { Constant, PowerLaw, AdimurthiLog, FilippasTertikasX, Custom };

constexpr std::string_view to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::Constant: return "constant";
    case PotentialKind::PowerLaw: return "power_law";
    case PotentialKind::AdimurthiLog: return "adimurthi_log";
    case PotentialKind::FilippasTertikasX: return "filippas_tertikas";
    case PotentialKind::Custom: return "custom";
  }
  return "unknown";
}

inline std::optional<PotentialKind> parse_potential_kind(std::string_view name) {
  for (auto kind : {PotentialKind::Constant, PotentialKind::PowerLaw, PotentialKind::AdimurthiLog,
                    PotentialKind::FilippasTertikasX, PotentialKind::Custom}) {
    if (name == to_string(kind)) return kind;
  }
  return std::nullopt;
}

struct PotentialParams {
  double alpha = 0.0;      // power-law exponent
  int m = 1;               // iteration depth of the log families
  double rho = 0.0;        // outer scale of the iterated logarithms
  double d_scale = 0.0;    // outer scale D of the X_k weights
  double amplitude = 1.0;  // overall non-negative factor
  double r_max = std::numeric_limits<double>::infinity();
  double scale = 1.0;  // v(r) = amplitude * scale^2 * base(scale * r)
};

/// Sampled (r, v) table for custom potentials; r strictly increasing, v >= 0.
struct PotentialTable {
  std::vector<double> r;
  std::vector<double> v;
};

class RadialPotential {
 public:
  static RadialPotential constant(double amplitude = 1.0,
                                  double r_max = std::numeric_limits<double>::infinity()) {
    PotentialParams p;
    p.amplitude = amplitude;
    p.r_max = r_max;
    return RadialPotential(PotentialKind::Constant, p, 0.0, false);
  }

  static RadialPotential power_law(double alpha, double amplitude = 1.0,
                                   double r_max = std::numeric_limits<double>::infinity()) {
    if (!std::isfinite(alpha)) throw Error(ErrorCode::DomainError, "power-law exponent must be finite");
    PotentialParams p;
    p.alpha = alpha;
    p.amplitude = amplitude;
    p.r_max = r_max;
    return RadialPotential(PotentialKind::PowerLaw, p, alpha, false);
  }

  /// (1/(4r^2)) * sum_{j<=m} prod_{i<=j} (log^{(i)}(rho/r))^{-2}.
  static RadialPotential adimurthi_log(int m, double rho, double r_max, double amplitude = 1.0) {
    if (m < 1) throw Error(ErrorCode::DomainError, "iteration depth m must be >= 1");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) {
      throw Error(ErrorCode::DomainError, "adimurthi_log needs a finite r_max");
    }
    const double tower = exp_tower(m);
    if (!(rho >= r_max * tower * (1.0 - 1e-12))) {
      throw Error(ErrorCode::DomainError, "rho must be at least r_max * exp^(m)(1) = " +
                                              std::to_string(r_max * tower));
    }
    PotentialParams p;
    p.m = m;
    p.rho = rho;
    p.amplitude = amplitude;
    p.r_max = r_max;
    return RadialPotential(PotentialKind::AdimurthiLog, p, 2.0, true);
  }

  /// (1/(4r^2)) * sum_{i<=m} prod_{j<=i} X_j(r/D)^2.
  static RadialPotential filippas_tertikas(int m, double d_scale, double r_max,
                                           double amplitude = 1.0) {
    if (m < 1) throw Error(ErrorCode::DomainError, "iteration depth m must be >= 1");
    if (!(r_max > 0.0) || !std::isfinite(r_max)) {
      throw Error(ErrorCode::DomainError, "filippas_tertikas needs a finite r_max");
    }
    if (!(d_scale >= r_max)) throw Error(ErrorCode::DomainError, "D must satisfy D >= r_max");
    PotentialParams p;
    p.m = m;
    p.d_scale = d_scale;
    p.amplitude = amplitude;
    p.r_max = r_max;
    return RadialPotential(PotentialKind::FilippasTertikasX, p, 2.0, true);
  }

  /// Log-linear interpolant of a sampled table. Below the first sample the
  /// potential continues as a power law with the regressed exponent.
  static RadialPotential custom(PotentialTable table, double amplitude = 1.0) {
    const std::size_t n = table.r.size();
    if (n < 2 || table.v.size() != n) {
      throw Error(ErrorCode::DomainError, "custom table needs at least two (r, v) rows");
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (!(table.r[i] > 0.0) || !std::isfinite(table.r[i])) {
        throw Error(ErrorCode::DomainError, "custom table radii must be positive");
      }
      if (!(table.v[i] >= 0.0) || !std::isfinite(table.v[i])) {
        throw Error(ErrorCode::DomainError, "custom table values must be finite and >= 0");
      }
      if (i > 0 && !(table.r[i] > table.r[i - 1])) {
        throw Error(ErrorCode::DomainError, "custom table radii must be strictly increasing");
      }
    }
    PotentialParams p;
    p.amplitude = amplitude;
    p.r_max = table.r.back();
    const double sigma = regress_singularity(table, p.r_max);
    RadialPotential pot(PotentialKind::Custom, p, sigma, false);
    pot.table_ = std::move(table);
    return pot;
  }

  /// Reads a two-column CSV with header `r,v`.
  static RadialPotential from_csv(std::istream& in, double amplitude = 1.0) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::ConfigError, "empty potential table");
    std::erase_if(line, [](char ch) { return ch == ' ' || ch == '\r' || ch == '\t'; });
    if (line != "r,v") throw Error(ErrorCode::ConfigError, "potential table header must be `r,v`");
    PotentialTable table;
    int line_no = 1;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream row(line);
      double r = 0.0;
      double v = 0.0;
      if (!(row >> r >> v)) {
        throw Error(ErrorCode::ConfigError, "malformed potential table row at line " +
                                                std::to_string(line_no));
      }
      table.r.push_back(r);
      table.v.push_back(v);
    }
    return custom(std::move(table), amplitude);
  }

  PotentialKind kind() const noexcept { return kind_; }
  const PotentialParams& params() const noexcept { return params_; }
  const PotentialTable& table() const noexcept { return table_; }
  double r_max() const noexcept { return params_.r_max; }
  double amplitude() const noexcept { return params_.amplitude; }

  /// Declared growth exponent: v(r) ~ r^{-sigma} as r -> 0.
  double singularity_exponent() const noexcept { return sigma_; }

  /// True for the borderline (1/(4r^2)) * log-factor families.
  bool critical() const noexcept { return critical_; }

  /// Potentials whose recessive solution cannot be started by a power
  /// series in r and must be shot in the log variable.
  bool needs_log_domain() const noexcept { return critical_ || sigma_ >= 2.0; }

  bool is_zero() const {
    if (params_.amplitude == 0.0) return true;
    if (kind_ == PotentialKind::Custom) {
      return std::all_of(table_.v.begin(), table_.v.end(), [](double v) { return v == 0.0; });
    }
    return false;
  }

  /// v(r) for r > 0.
  double eval(double r) const {
    if (!(r > 0.0)) throw Error(ErrorCode::DomainError, "radius must be positive");
    const double beta = params_.scale;
    return params_.amplitude * beta * beta * base_eval(beta * r);
  }

  /// a(s) = e^{-2s} v(e^{-s}) with s = ln(1/r); equals r^2 v(r).
  double log_coefficient(double s) const {
    return params_.amplitude * base_log_coefficient(s - std::log(params_.scale));
  }

  /// Shift sigma0 with a(s) ~ amplitude / (4 (s + sigma0)^2) for the critical
  /// families; empty otherwise.
  std::optional<double> log_shift_hint() const {
    const double shift = -std::log(params_.scale);
    switch (kind_) {
      case PotentialKind::AdimurthiLog: return std::log(params_.rho) + shift;
      case PotentialKind::FilippasTertikasX: return 1.0 + std::log(params_.d_scale) + shift;
      default: return std::nullopt;
    }
  }

  /// v_beta(r) = beta^2 v(beta r); leaves the X/Y class unchanged.
  RadialPotential scaled(double beta) const {
    if (!(beta > 0.0)) throw Error(ErrorCode::DomainError, "scale factor must be positive");
    RadialPotential out = *this;
    out.params_.scale *= beta;
    out.params_.r_max /= beta;
    return out;
  }

  RadialPotential with_amplitude(double amplitude) const {
    RadialPotential out = *this;
    out.params_.amplitude = amplitude;
    return out;
  }

 private:
  RadialPotential(PotentialKind kind, PotentialParams params, double sigma, bool critical)
      : kind_(kind), params_(params), sigma_(sigma), critical_(critical) {
    if (!(params_.amplitude >= 0.0) || !std::isfinite(params_.amplitude)) {
      throw Error(ErrorCode::DomainError, "amplitude must be finite and >= 0");
    }
    if (!(params_.r_max > 0.0)) throw Error(ErrorCode::DomainError, "r_max must be positive");
  }

  // Log-log slope of v over [1e-8, 1e-4] * r_max, or over the first five
  // samples when the table does not reach that far in.
  static double regress_singularity(const PotentialTable& table, double r_max) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < table.r.size(); ++i) {
      if (table.r[i] >= 1e-8 * r_max && table.r[i] <= 1e-4 * r_max && table.v[i] > 0.0) {
        pts.emplace_back(std::log(table.r[i]), std::log(table.v[i]));
      }
    }
    if (pts.size() < 2) {
      pts.clear();
      for (std::size_t i = 0; i < table.r.size() && pts.size() < 5; ++i) {
        if (table.v[i] > 0.0) pts.emplace_back(std::log(table.r[i]), std::log(table.v[i]));
      }
    }
    if (pts.size() < 2) return 0.0;
    double mx = 0.0;
    double my = 0.0;
    for (auto [x, y] : pts) {
      mx += x;
      my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (auto [x, y] : pts) {
      sxy += (x - mx) * (y - my);
      sxx += (x - mx) * (x - mx);
    }
    return sxx > 0.0 ? -sxy / sxx : 0.0;
  }

  double base_eval(double x) const {
    switch (kind_) {
      case PotentialKind::Constant: return 1.0;
      case PotentialKind::PowerLaw: return std::pow(x, -params_.alpha);
      case PotentialKind::AdimurthiLog: {
        if (!(x <= params_.rho)) throw Error(ErrorCode::DomainError, "radius beyond rho");
        return base_log_coefficient(-std::log(x)) / (x * x);
      }
      case PotentialKind::FilippasTertikasX: {
        if (!(x <= params_.d_scale)) throw Error(ErrorCode::DomainError, "radius beyond D");
        return base_log_coefficient(-std::log(x)) / (x * x);
      }
      case PotentialKind::Custom: return table_eval(x);
    }
    return 0.0;
  }

  double base_log_coefficient(double s) const {
    switch (kind_) {
      case PotentialKind::Constant: return std::exp(-2.0 * s);
      case PotentialKind::PowerLaw: return std::exp(-(2.0 - params_.alpha) * s);
      case PotentialKind::AdimurthiLog: {
        // log^{(1)}(rho/r) = ln(rho) + s; deeper levels by composition.
        double level = std::log(params_.rho) + s;
        double product = 1.0;
        double sum = 0.0;
        for (int i = 1; i <= params_.m; ++i) {
          if (i > 1) level = std::log(level);
          if (!(level > 0.0)) {
            throw Error(ErrorCode::DomainError,
                        "log^(" + std::to_string(i) + ")(rho/r) is not positive");
          }
          product *= level;
          sum += 1.0 / (product * product);
        }
        return 0.25 * sum;
      }
      case PotentialKind::FilippasTertikasX: {
        const double t_log = std::log(params_.d_scale) + s;  // ln(D/r)
        if (!(t_log >= 0.0)) throw Error(ErrorCode::DomainError, "r/D must lie in (0, 1]");
        // 1/X_1 = 1 + ln(D/r), 1/X_i = 1 + ln(1/X_{i-1}); working with the
        // reciprocals keeps the sum out of the subnormal range.
        double level = 1.0 + t_log;
        double product = 1.0;
        double sum = 0.0;
        for (int i = 1; i <= params_.m; ++i) {
          if (i > 1) level = 1.0 + std::log(level);
          product *= level;
          sum += 1.0 / (product * product);
        }
        return 0.25 * sum;
      }
      case PotentialKind::Custom: {
        const double s0 = -std::log(table_.r.front());
        if (s > s0) {
          const double v0 = table_.v.front();
          if (v0 == 0.0) return 0.0;
          return std::exp(-2.0 * s + std::log(v0) + sigma_ * (s - s0));
        }
        return std::exp(-2.0 * s) * table_eval(std::exp(-s));
      }
    }
    return 0.0;
  }

  double table_eval(double x) const {
    const auto& rs = table_.r;
    const auto& vs = table_.v;
    if (x < rs.front()) {
      if (vs.front() == 0.0) return 0.0;
      return vs.front() * std::pow(x / rs.front(), -sigma_);
    }
    if (x > rs.back() * (1.0 + 1e-14)) {
      throw Error(ErrorCode::DomainError, "radius beyond the last table sample");
    }
    if (x >= rs.back()) return vs.back();
    const auto it = std::upper_bound(rs.begin(), rs.end(), x);
    const std::size_t hi = static_cast<std::size_t>(it - rs.begin());
    const std::size_t lo = hi - 1;
    const double w = (std::log(x) - std::log(rs[lo])) / (std::log(rs[hi]) - std::log(rs[lo]));
    if (vs[lo] > 0.0 && vs[hi] > 0.0) {
      return std::exp((1.0 - w) * std::log(vs[lo]) + w * std::log(vs[hi]));
    }
    return (1.0 - w) * vs[lo] + w * vs[hi];
  }

  PotentialKind kind_;
  PotentialParams params_;
  double sigma_;
  bool critical_;
  PotentialTable table_;
};

}  // namespace hardy
