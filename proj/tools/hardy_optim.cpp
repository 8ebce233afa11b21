// hardy_optim: best constants, feasibility, classification and oracles for
// radial Hardy-type inequalities on a ball.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hardy/cli.hpp"

namespace {

int emit(const hardy::CommandOutput& out, const std::string& path) {
  if (path.empty()) {
    std::cout << out.text;
    return out.exit_code;
  }
  std::ofstream file(path);
  if (!file) {
    std::cerr << "cannot write " << path << "\n";
    return 1;
  }
  file << out.text;
  return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Best constants and oracles for improved Hardy inequalities"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_path;
  std::string format;
  app.add_option("--config", config_path, "YAML run config");
  app.add_option("--out", out_path, "write the result here instead of stdout");
  app.add_option("--format", format, "record or csv")->check(CLI::IsMember({"record", "csv"}));

  double c = 0.0;
  double mu = 0.0;
  double p = 0.0;
  auto* best = app.add_subcommand("best-constant", "c(V) by bracketing and bisection");
  auto* feas = app.add_subcommand("feasible", "does y'' + y'/r + c v y = 0 stay positive on (0, R)");
  feas->add_option("--c", c, "multiplier")->required();
  auto* cls = app.add_subcommand("classify", "admissibility class X / Y");
  auto* eig = app.add_subcommand("eigen", "first weighted eigenvalue lambda_mu");
  eig->add_option("--mu", mu, "inverse-square weight, below ((n-2)/2)^2")->required();
  auto* dual = app.add_subcommand("dual", "Hoelder-dual lower bound");
  dual->add_option("--c", c, "multiplier")->required();
  dual->add_option("--p", p, "exponent in (0, 2]")->required();
  auto* check = app.add_subcommand("check-closed-form", "ODE residual of the catalog closed form");
  auto* trace = app.add_subcommand("trace", "shooting trajectory");
  trace->add_option("--c", c, "multiplier")->required();

  CLI11_PARSE(app, argc, argv);

  hardy::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = hardy::load_config(config_path);
  } catch (const hardy::Error& e) {
    hardy::Record r;
    r.set("command", app.get_subcommands().front()->get_name()).set("status", "ConfigError");
    r.set("error", to_string(e.code())).set("message", e.what());
    return emit({1, r.dump() + "\n"}, out_path.empty() ? cfg.out_path : out_path);
  }
  if (!format.empty()) cfg.format = *hardy::parse_output_format(format);
  if (!out_path.empty()) cfg.out_path = out_path;

  hardy::CommandOutput out;
  if (*best) out = hardy::cmd_best_constant(cfg);
  else if (*feas) out = hardy::cmd_feasible(cfg, c);
  else if (*cls) out = hardy::cmd_classify(cfg);
  else if (*eig) out = hardy::cmd_eigen(cfg, mu);
  else if (*dual) out = hardy::cmd_dual(cfg, c, p);
  else if (*check) out = hardy::cmd_check_closed_form(cfg);
  else if (*trace) out = hardy::cmd_trace(cfg, c);
  return emit(out, cfg.out_path);
}
