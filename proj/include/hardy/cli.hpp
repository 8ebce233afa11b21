#pragma once

// Command layer behind tools/hardy_optim: YAML run configs and one function
// per subcommand. Needs yaml-cpp (the `hardy_cli` CMake target).
//
// Exit codes: 0 success, 1 error, 2 indeterminate or uncertified.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "hardy/bestconst.hpp"
#include "hardy/classify.hpp"
#include "hardy/closed_form.hpp"
#include "hardy/dual.hpp"
#include "hardy/error.hpp"
#include "hardy/ode.hpp"
#include "hardy/oracle.hpp"
#include "hardy/potential.hpp"
#include "hardy/record.hpp"
#include "hardy/special.hpp"

namespace hardy {

enum class OutputFormat { Record, Csv };

inline std::optional<OutputFormat> parse_output_format(std::string_view s) {
  if (s == "record") return OutputFormat::Record;
  if (s == "csv") return OutputFormat::Csv;
  return std::nullopt;
}

struct PotentialConfig {
  PotentialKind kind = PotentialKind::Constant;
  double alpha = 1.0;
  int m = 1;
  std::optional<double> rho;      // default: R * exp^(m)(1)
  std::optional<double> d_scale;  // default: r_max
  double amplitude = 1.0;
  std::optional<double> r_max;    // default: R for the log families, unbounded otherwise
  std::string table;              // CSV path for kind `custom`, relative to the config file
};

struct RunConfig {
  PotentialConfig potential;
  double R = 1.0;
  int n = 3;
  double tol = 1e-6;               // best-constant bracket width
  double rtol = 1e-10;             // integrator
  int N = 10'000;                  // eigen grid nodes
  std::optional<double> r_min;     // eigen grid cutoff; default 1e-6 R
  double s_max = 1e6;              // log-domain horizon
  std::string out_path;
  OutputFormat format = OutputFormat::Record;
  std::filesystem::path base_dir = ".";

  double grid_r_min() const { return r_min ? *r_min : 1e-6 * R; }

  RadialPotential build_potential() const {
    const auto& pc = potential;
    switch (pc.kind) {
      case PotentialKind::Constant:
        return RadialPotential::constant(pc.amplitude, pc.r_max.value_or(std::numeric_limits<double>::infinity()));
      case PotentialKind::PowerLaw:
        return RadialPotential::power_law(pc.alpha, pc.amplitude,
                                          pc.r_max.value_or(std::numeric_limits<double>::infinity()));
      case PotentialKind::AdimurthiLog: {
        const double r_max = pc.r_max.value_or(R);
        return RadialPotential::adimurthi_log(pc.m, pc.rho.value_or(r_max * exp_tower(pc.m)), r_max, pc.amplitude);
      }
      case PotentialKind::FilippasTertikasX: {
        const double r_max = pc.r_max.value_or(R);
        return RadialPotential::filippas_tertikas(pc.m, pc.d_scale.value_or(r_max), r_max, pc.amplitude);
      }
      case PotentialKind::Custom: {
        if (pc.table.empty()) throw Error(ErrorCode::ConfigError, "potential.table is required for kind custom");
        const auto path = base_dir / pc.table;
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::ConfigError, "cannot open potential table " + path.string());
        return RadialPotential::from_csv(in, pc.amplitude);
      }
    }
    throw Error(ErrorCode::ConfigError, "unknown potential kind");
  }

  FeasibilityOptions feasibility_options() const {
    FeasibilityOptions opt;
    opt.integrate.rtol = rtol;
    opt.s_max = s_max;
    return opt;
  }

  GridSpec grid() const { return {N, GridMapping::LogSpaced, R, grid_r_min()}; }
};

namespace detail {

inline std::string where(const std::string& source, const YAML::Mark& mark) {
  if (mark.is_null()) return source;
  return fmt::format("{}:{}:{}", source, mark.line + 1, mark.column + 1);
}

inline void check_keys(const YAML::Node& node, std::string_view section, const std::set<std::string>& allowed,
                       const std::string& source) {
  if (!node.IsMap()) {
    throw Error(ErrorCode::ConfigError, fmt::format("{}: section '{}' must be a mapping", where(source, node.Mark()), section));
  }
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw Error(ErrorCode::ConfigError,
                  fmt::format("{}: unknown key '{}' in section '{}'", where(source, kv.first.Mark()), key, section));
    }
  }
}

template <class T>
void read_key(const YAML::Node& section, std::string_view section_name, const char* key, T& out,
              const std::string& source) {
  const YAML::Node node = section[key];
  if (!node) return;
  try {
    out = node.as<T>();
  } catch (const YAML::BadConversion&) {
    throw Error(ErrorCode::ConfigError, fmt::format("{}: key '{}.{}' has the wrong type", where(source, node.Mark()),
                                                    section_name, key));
  }
}

template <class T>
void read_key(const YAML::Node& section, std::string_view section_name, const char* key, std::optional<T>& out,
              const std::string& source) {
  if (!section[key]) return;
  T value{};
  read_key(section, section_name, key, value, source);
  out = value;
}

inline void require(bool ok, const YAML::Node& node, const std::string& source, const std::string& message) {
  if (!ok) throw Error(ErrorCode::ConfigError, fmt::format("{}: {}", where(source, node.Mark()), message));
}

}  // namespace detail

/// Parses a YAML run config. `source` names the input in diagnostics.
inline RunConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw Error(ErrorCode::ConfigError, fmt::format("{}: {}", detail::where(source, e.mark), e.msg));
  }
  RunConfig cfg;
  if (!root || root.IsNull()) return cfg;
  detail::check_keys(root, "<root>", {"potential", "domain", "solver", "output"}, source);

  if (const auto pot = root["potential"]) {
    detail::check_keys(pot, "potential",
                       {"kind", "alpha", "m", "rho", "d_scale", "amplitude", "r_max", "table"}, source);
    auto& pc = cfg.potential;
    std::string kind = "constant";
    detail::read_key(pot, "potential", "kind", kind, source);
    const auto parsed = parse_potential_kind(kind);
    detail::require(parsed.has_value(), pot["kind"], source, "unknown potential kind '" + kind + "'");
    pc.kind = *parsed;
    detail::read_key(pot, "potential", "alpha", pc.alpha, source);
    detail::read_key(pot, "potential", "m", pc.m, source);
    detail::read_key(pot, "potential", "rho", pc.rho, source);
    detail::read_key(pot, "potential", "d_scale", pc.d_scale, source);
    detail::read_key(pot, "potential", "amplitude", pc.amplitude, source);
    detail::read_key(pot, "potential", "r_max", pc.r_max, source);
    detail::read_key(pot, "potential", "table", pc.table, source);
    detail::require(pc.amplitude >= 0.0, pot["amplitude"], source, "potential.amplitude must be >= 0");
    detail::require(pc.m >= 1, pot["m"], source, "potential.m must be >= 1");
  }
  if (const auto dom = root["domain"]) {
    detail::check_keys(dom, "domain", {"R", "n"}, source);
    detail::read_key(dom, "domain", "R", cfg.R, source);
    detail::read_key(dom, "domain", "n", cfg.n, source);
    detail::require(cfg.R > 0.0, dom["R"], source, "domain.R must be positive");
    detail::require(cfg.n >= 3, dom["n"], source, "domain.n must be >= 3");
  }
  if (const auto sol = root["solver"]) {
    detail::check_keys(sol, "solver", {"tol", "rtol", "N", "r_min", "s_max"}, source);
    detail::read_key(sol, "solver", "tol", cfg.tol, source);
    detail::read_key(sol, "solver", "rtol", cfg.rtol, source);
    detail::read_key(sol, "solver", "N", cfg.N, source);
    detail::read_key(sol, "solver", "r_min", cfg.r_min, source);
    detail::read_key(sol, "solver", "s_max", cfg.s_max, source);
    detail::require(cfg.tol > 0.0, sol["tol"], source, "solver.tol must be positive");
    detail::require(cfg.rtol > 0.0, sol["rtol"], source, "solver.rtol must be positive");
    detail::require(cfg.N >= 16, sol["N"], source, "solver.N must be >= 16");
    detail::require(!cfg.r_min || (*cfg.r_min > 0.0 && *cfg.r_min < cfg.R), sol["r_min"], source,
                    "solver.r_min must lie in (0, R)");
    detail::require(cfg.s_max > -std::log(cfg.R), sol["s_max"], source, "solver.s_max must exceed ln(1/R)");
  }
  if (const auto out = root["output"]) {
    detail::check_keys(out, "output", {"path", "format"}, source);
    detail::read_key(out, "output", "path", cfg.out_path, source);
    std::string format = "record";
    detail::read_key(out, "output", "format", format, source);
    const auto parsed = parse_output_format(format);
    detail::require(parsed.has_value(), out["format"], source, "output.format must be record or csv");
    cfg.format = *parsed;
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto cfg = parse_config(buf.str(), path.string());
  cfg.base_dir = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
  return cfg;
}

struct CommandOutput {
  int exit_code = 0;
  std::string text;
};

namespace detail {

inline Record potential_record(const RadialPotential& p) {
  Record r;
  const auto& prm = p.params();
  r.set("kind", to_string(p.kind()));
  r.set("amplitude", prm.amplitude);
  r.set("r_max", prm.r_max);
  switch (p.kind()) {
    case PotentialKind::PowerLaw: r.set("alpha", prm.alpha); break;
    case PotentialKind::AdimurthiLog:
      r.set("m", prm.m);
      r.set("rho", prm.rho);
      break;
    case PotentialKind::FilippasTertikasX:
      r.set("m", prm.m);
      r.set("d_scale", prm.d_scale);
      break;
    case PotentialKind::Custom: r.set("samples", static_cast<int>(p.table().r.size())); break;
    case PotentialKind::Constant: break;
  }
  return r;
}

inline std::string record_text(const Record& r) { return r.dump() + "\n"; }

// Scalar fields of a record as a header row and a value row.
inline std::string scalar_csv(const std::vector<std::pair<std::string, std::string>>& fields) {
  std::string head;
  std::string row;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) {
      head += ',';
      row += ',';
    }
    head += fields[i].first;
    row += fields[i].second;
  }
  return head + "\n" + row + "\n";
}

inline std::string trim_quotes(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

inline int error_exit(ErrorCode code) {
  return (code == ErrorCode::NoUpperBracket || code == ErrorCode::IndeterminateAtHorizon) ? 2 : 1;
}

}  // namespace detail

/// Runs `body` and turns every failure into a structured error record.
template <class Body>
CommandOutput run_guarded(std::string_view command, Body&& body) {
  try {
    return body();
  } catch (const Error& e) {
    Record r;
    r.set("command", command).set("status", to_string(e.code())).set("error", to_string(e.code()));
    r.set("message", e.what());
    return {detail::error_exit(e.code()), detail::record_text(r)};
  } catch (const std::exception& e) {
    Record r;
    r.set("command", command).set("status", "error").set("error", "Exception").set("message", e.what());
    return {1, detail::record_text(r)};
  }
}

inline CommandOutput cmd_best_constant(const RunConfig& cfg) {
  return run_guarded("best-constant", [&] {
    const auto pot = cfg.build_potential();
    const auto res = best_constant(pot, cfg.R, cfg.tol, cfg.feasibility_options());
    const int code = res.status == BestConstantStatus::Converged ? 0 : 2;
    if (cfg.format == OutputFormat::Csv) {
      return CommandOutput{code, detail::scalar_csv({{"c_best", json_number(res.c_best)},
                                                     {"c_lo", json_number(res.c_lo)},
                                                     {"c_hi", json_number(res.c_hi)},
                                                     {"iterations", std::to_string(res.iterations)},
                                                     {"status", std::string(to_string(res.status))}})};
    }
    Record r;
    r.set("command", "best-constant").set("status", to_string(res.status));
    r.set("c_best", res.c_best).set("c_lo", res.c_lo).set("c_hi", res.c_hi);
    r.set("iterations", res.iterations).set("tolerance", res.tolerance).set("R", cfg.R);
    if (res.indeterminate) {
      r.set("indeterminate_lo", res.indeterminate->first).set("indeterminate_hi", res.indeterminate->second);
    }
    r.set("certificate_lo", to_string(res.evidence_lo.certificate));
    r.set("certificate_hi", to_string(res.evidence_hi.certificate));
    r.set("potential", detail::potential_record(pot));
    return CommandOutput{code, detail::record_text(r)};
  });
}

inline CommandOutput cmd_feasible(const RunConfig& cfg, double c) {
  return run_guarded("feasible", [&] {
    const auto pot = cfg.build_potential();
    const auto res = feasible(pot, c, cfg.R, cfg.feasibility_options());
    const int code = res.verdict == Verdict::Indeterminate ? 2 : 0;
    Record r;
    r.set("command", "feasible").set("status", to_string(res.verdict));
    r.set("multiplier", c).set("feasible", res.feasible());
    r.set("certificate", to_string(res.certificate));
    r.set("domain", res.evidence.domain == OdeDomain::Radius ? "radius" : "log");
    if (res.evidence.first_zero) {
      r.set("first_zero", *res.evidence.first_zero);
    } else {
      r.null("first_zero");
    }
    r.set("euler_gamma", res.euler_gamma).set("R", cfg.R);
    if (cfg.format == OutputFormat::Csv) {
      return CommandOutput{code, detail::scalar_csv({{"multiplier", json_number(c)},
                                                     {"verdict", std::string(to_string(res.verdict))},
                                                     {"certificate", std::string(to_string(res.certificate))}})};
    }
    r.set("potential", detail::potential_record(pot));
    return CommandOutput{code, detail::record_text(r)};
  });
}

inline CommandOutput cmd_classify(const RunConfig& cfg) {
  return run_guarded("classify", [&] {
    const auto pot = cfg.build_potential();
    const auto label = classify(pot);
    const int code = label.label == AdmissibilityClass::Indeterminate ? 2 : 0;
    if (cfg.format == OutputFormat::Csv) {
      std::string text = "s,evidence\n";
      for (std::size_t i = 0; i < label.evidence.size(); ++i) {
        text += json_number(label.probe_log_radii[i]) + "," + detail::trim_quotes(json_number(label.evidence[i])) + "\n";
      }
      return CommandOutput{code, text};
    }
    Record r;
    r.set("command", "classify").set("status", "ok").set("label", to_string(label.label));
    r.set("divergent_inner_integral", label.divergent_inner_integral);
    r.set("probe_log_radii", label.probe_log_radii).set("evidence", label.evidence);
    r.set("potential", detail::potential_record(pot));
    return CommandOutput{code, detail::record_text(r)};
  });
}

inline CommandOutput cmd_eigen(const RunConfig& cfg, double mu) {
  return run_guarded("eigen", [&] {
    const auto pot = cfg.build_potential();
    const auto grid = cfg.grid();
    const auto res = weighted_eigen(pot, mu, cfg.n, grid);
    if (cfg.format == OutputFormat::Csv) {
      const auto r = grid.nodes();
      const double beta = 0.5 * (cfg.n - 2);
      std::string text = "r,u\n";
      for (std::size_t i = 0; i < r.size(); ++i) {
        text += json_number(r[i]) + "," + json_number(res.eigenvector[i] * std::pow(r[i], -beta)) + "\n";
      }
      return CommandOutput{0, text};
    }
    Record r;
    r.set("command", "eigen").set("status", "ok");
    r.set("lambda1", res.lambda1).set("N", grid.N).set("r_min", grid.r_min);
    r.set("residual_norm", res.residual_norm).set("iterations", res.iterations);
    r.set("mu", mu).set("n", cfg.n).set("R", cfg.R);
    r.set("potential", detail::potential_record(pot));
    return CommandOutput{0, detail::record_text(r)};
  });
}

inline CommandOutput cmd_dual(const RunConfig& cfg, double c, double p) {
  return run_guarded("dual", [&] {
    const auto pot = cfg.build_potential();
    const auto res = dual_lower_bound(pot, c, p, cfg.n, cfg.R);
    const int code = res.divergent_norm ? 2 : 0;
    const std::string status = res.divergent_norm ? "DivergentNorm" : "ok";
    if (cfg.format == OutputFormat::Csv) {
      return CommandOutput{code, detail::scalar_csv({{"p", json_number(res.p)},
                                                     {"q", detail::trim_quotes(json_number(res.q))},
                                                     {"bound", json_number(res.bound)},
                                                     {"c_used", json_number(res.c_used)},
                                                     {"divergent", res.divergent_norm ? "true" : "false"}})};
    }
    Record r;
    r.set("command", "dual").set("status", status);
    r.set("p", res.p).set("q", res.q).set("bound", res.bound).set("c_used", res.c_used);
    r.set("divergent", res.divergent_norm).set("n", cfg.n).set("R", cfg.R);
    r.set("potential", detail::potential_record(pot));
    return CommandOutput{code, detail::record_text(r)};
  });
}

/// Largest ODE residual of the catalog closed form on a 10^4-point log grid.
inline CommandOutput cmd_check_closed_form(const RunConfig& cfg, double residual_tol = 1e-6) {
  return run_guarded("check-closed-form", [&] {
    const auto pot = cfg.build_potential();
    const double c = closed_form_multiplier(pot, cfg.R);
    constexpr int kPoints = 10'000;
    const double r_lo = cfg.grid_r_min();
    std::vector<double> radii(kPoints);
    std::vector<double> phi(kPoints);
    for (int i = 0; i < kPoints; ++i) {
      radii[static_cast<std::size_t>(i)] = r_lo * std::exp(std::log(cfg.R / r_lo) * i / (kPoints - 1.0));
    }
    for (std::size_t i = 0; i < radii.size(); ++i) phi[i] = closed_form_solution(pot, radii[i], cfg.R);
    const HardyODEProblem prob{.potential = pot, .multiplier = c, .R = cfg.R};
    const double res = residual(phi, prob, radii);
    const bool ok = res <= residual_tol;
    const int code = ok ? 0 : 2;
    if (cfg.format == OutputFormat::Csv) {
      return CommandOutput{code, detail::scalar_csv({{"multiplier", json_number(c)},
                                                     {"residual", json_number(res)},
                                                     {"points", std::to_string(kPoints)}})};
    }
    Record r;
    r.set("command", "check-closed-form").set("status", ok ? "ok" : "ResidualAboveTolerance");
    r.set("multiplier", c).set("residual", res).set("tolerance", residual_tol);
    r.set("points", kPoints).set("r_lo", r_lo).set("R", cfg.R);
    r.set("potential", detail::potential_record(pot));
    return CommandOutput{code, detail::record_text(r)};
  });
}

/// The shooting trajectory behind `feasible`, one row per accepted step.
inline CommandOutput cmd_trace(const RunConfig& cfg, double c) {
  return run_guarded("trace", [&] {
    const auto pot = cfg.build_potential();
    const auto res = feasible(pot, c, cfg.R, cfg.feasibility_options());
    const int code = res.verdict == Verdict::Indeterminate ? 2 : 0;
    if (cfg.format == OutputFormat::Csv) {
      std::ostringstream os;
      write_trajectory_csv(os, res.evidence);
      return CommandOutput{code, os.str()};
    }
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> dy;
    for (const auto& s : res.evidence.trajectory) {
      x.push_back(s.x);
      y.push_back(s.y);
      dy.push_back(s.dy);
    }
    const bool radius = res.evidence.domain == OdeDomain::Radius;
    Record r;
    r.set("command", "trace").set("status", to_string(res.verdict));
    r.set("multiplier", c).set("domain", radius ? "radius" : "log");
    r.set("shooting_status", to_string(res.evidence.status));
    r.set("rescale_count", res.evidence.rescale_count);
    r.set(radius ? "r" : "s", x).set(radius ? "y" : "z", y).set(radius ? "dy" : "dz", dy);
    return CommandOutput{code, detail::record_text(r)};
  });
}

}  // namespace hardy
