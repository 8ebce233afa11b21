#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include <gtest/gtest.h>

#include "hardy/cli.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace hardy;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(HARDY_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {};
  Run r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("hardy_cli_" + std::to_string(::getpid()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }

  std::string write(const std::string& name, const std::string& text) const {
    const auto p = path_ / name;
    std::ofstream(p) << text;
    return p.string();
  }
  std::filesystem::path path() const { return path_; }

 private:
  std::filesystem::path path_;
};

ErrorCode parse_error(const std::string& text) {
  try {
    parse_config(text, "cfg.yaml");
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::DomainError;
}

std::string parse_message(const std::string& text) {
  try {
    parse_config(text, "cfg.yaml");
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(Config, Defaults) {
  const auto cfg = parse_config("");
  EXPECT_EQ(cfg.potential.kind, PotentialKind::Constant);
  EXPECT_EQ(cfg.R, 1.0);
  EXPECT_EQ(cfg.n, 3);
  EXPECT_EQ(cfg.format, OutputFormat::Record);
  EXPECT_DOUBLE_EQ(cfg.grid().r_min, 1e-6);
}

TEST(Config, FullDocument) {
  const auto cfg = parse_config(R"(
potential:
  kind: adimurthi_log
  m: 2
  amplitude: 4
domain:
  R: 0.5
  n: 4
solver:
  tol: 1.0e-8
  rtol: 1.0e-11
  N: 2000
  r_min: 1.0e-9
  s_max: 1.0e4
output:
  format: csv
)");
  EXPECT_EQ(cfg.potential.kind, PotentialKind::AdimurthiLog);
  EXPECT_EQ(cfg.potential.m, 2);
  EXPECT_EQ(cfg.R, 0.5);
  EXPECT_EQ(cfg.n, 4);
  EXPECT_EQ(cfg.N, 2000);
  EXPECT_EQ(cfg.s_max, 1e4);
  EXPECT_EQ(cfg.format, OutputFormat::Csv);
  const auto p = cfg.build_potential();
  EXPECT_DOUBLE_EQ(p.params().r_max, 0.5);
  EXPECT_NEAR(p.params().rho, 0.5 * exp_tower(2), 1e-12);
  EXPECT_EQ(cfg.feasibility_options().s_max, 1e4);
  EXPECT_EQ(cfg.feasibility_options().integrate.rtol, 1e-11);
}

TEST(Config, Diagnostics) {
  EXPECT_EQ(parse_error("potential:\n  kind: constant\n  colour: red\n"), ErrorCode::ConfigError);
  const auto msg = parse_message("potential:\n  kind: constant\n  colour: red\n");
  EXPECT_NE(msg.find("cfg.yaml:3:"), std::string::npos) << msg;
  EXPECT_NE(msg.find("colour"), std::string::npos) << msg;

  EXPECT_NE(parse_message("potential:\n  kind: nope\n").find("cfg.yaml:2:"), std::string::npos);
  EXPECT_NE(parse_message("domain:\n  R: -1\n").find("domain.R"), std::string::npos);
  EXPECT_EQ(parse_error("domain:\n  n: 2\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("solver:\n  N: 8\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("solver:\n  tol: 0\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("domain:\n  R: abc\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("output:\n  format: xml\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("potential: [unclosed\n"), ErrorCode::ConfigError);
  EXPECT_EQ(parse_error("extra: 1\n"), ErrorCode::ConfigError);
}

TEST(Commands, BestConstantRecord) {
  const auto out = cmd_best_constant(parse_config(""));
  EXPECT_EQ(out.exit_code, 0);
  const auto j = json::parse(out.text);
  EXPECT_EQ(j["command"], "best-constant");
  EXPECT_EQ(j["status"], "Converged");
  EXPECT_NEAR(j["c_best"].get<double>(), oracle::kZ0Sq, 1e-4);
}

TEST(Commands, ZeroAmplitudeExitsTwo) {
  const auto out = cmd_best_constant(parse_config("potential:\n  amplitude: 0\n"));
  EXPECT_EQ(out.exit_code, 2);
  EXPECT_EQ(json::parse(out.text)["status"], "NoUpperBracket");
}

TEST(Commands, ClassifyPowerLawTwo) {
  const auto out = cmd_classify(parse_config("potential:\n  kind: power_law\n  alpha: 2\n"));
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_EQ(json::parse(out.text)["label"], "Y");
}

TEST(Commands, EigenBallMode) {
  const auto out = cmd_eigen(parse_config("solver:\n  N: 8000\n"), 0.0);
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_LE(oracle::rel(json::parse(out.text)["lambda1"].get<double>(), oracle::kPiSq), 1e-3);
}

TEST(Commands, CheckClosedFormFT) {
  const auto out = cmd_check_closed_form(parse_config("potential:\n  kind: filippas_tertikas\n  m: 2\n"));
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_LE(json::parse(out.text)["residual"].get<double>(), 1e-6);
}

TEST(Commands, DualRecord) {
  const auto out = cmd_dual(parse_config("potential:\n  kind: power_law\n  alpha: 1\n"), 1.0, 1.0);
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_NEAR(json::parse(out.text)["bound"].get<double>(), 1.0 / std::numbers::pi, 1e-6);
  const auto bad = cmd_dual(parse_config(""), 1.0, 3.0);
  EXPECT_EQ(bad.exit_code, 1);
  EXPECT_EQ(json::parse(bad.text)["error"], "InvalidP");
}

TEST(Commands, FeasibleRecord) {
  const auto yes = json::parse(cmd_feasible(parse_config(""), 5.0).text);
  EXPECT_EQ(yes["feasible"], true);
  const auto no = json::parse(cmd_feasible(parse_config(""), 6.0).text);
  EXPECT_EQ(no["feasible"], false);
  EXPECT_NEAR(no["first_zero"].get<double>(), oracle::kZ0 / std::sqrt(6.0), 1e-8);
}

TEST(Commands, TraceCsv) {
  auto cfg = parse_config("output:\n  format: csv\n");
  const auto out = cmd_trace(cfg, 1.0);
  EXPECT_EQ(out.exit_code, 0);
  EXPECT_EQ(out.text.rfind("r,y,dy\n", 0), 0u) << out.text.substr(0, 40);
  EXPECT_GT(std::count(out.text.begin(), out.text.end(), '\n'), 10);
}

TEST(Binary, BestConstant) {
  TempDir dir;
  const auto cfg = dir.write("c.yaml", "potential:\n  kind: constant\n");
  const auto r = run("--config " + cfg + " best-constant");
  ASSERT_EQ(r.code, 0) << r.out;
  const auto j = json::parse(r.out);
  EXPECT_NEAR(j["c_best"].get<double>(), oracle::kZ0Sq, 1e-4);
}

TEST(Binary, Deterministic) {
  TempDir dir;
  const auto cfg = dir.write("c.yaml", "potential:\n  kind: power_law\n  alpha: 0.5\n");
  for (const char* cmd : {"best-constant", "classify", "eigen --mu 0.1", "dual --c 1 --p 1"}) {
    const auto a = run("--config " + cfg + " " + cmd);
    const auto b = run("--config " + cfg + " " + cmd);
    EXPECT_EQ(a.code, 0) << cmd;
    EXPECT_EQ(a.out, b.out) << cmd;
  }
}

TEST(Binary, RecordsRoundTrip) {
  TempDir dir;
  const auto cfg = dir.write("c.yaml", "potential:\n  kind: adimurthi_log\n  amplitude: 4\n");
  for (const char* cmd : {"best-constant", "feasible --c 0.25", "classify", "check-closed-form", "dual --c 1 --p 2"}) {
    const auto r = run("--config " + cfg + " " + cmd);
    json j;
    ASSERT_NO_THROW(j = json::parse(r.out)) << cmd << "\n" << r.out;
    EXPECT_TRUE(j.contains("command")) << cmd;
    EXPECT_TRUE(j.contains("status")) << cmd;
    // Re-serialising at 17 digits keeps every number.
    EXPECT_EQ(json::parse(j.dump()), j) << cmd;
  }
}

TEST(Binary, ExitCodes) {
  TempDir dir;
  const auto zero = dir.write("z.yaml", "potential:\n  amplitude: 0\n");
  auto r = run("--config " + zero + " best-constant");
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json::parse(r.out)["status"], "NoUpperBracket");

  const auto bad = dir.write("b.yaml", "potential:\n  kind: constant\n  bogus: 1\n");
  r = run("--config " + bad + " best-constant");
  EXPECT_EQ(r.code, 1);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["status"], "ConfigError");
  EXPECT_NE(j["message"].get<std::string>().find(":3:"), std::string::npos);

  r = run("--config " + (dir.path() / "missing.yaml").string() + " classify");
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.out)["status"], "ConfigError");
}

TEST(Binary, OutFileAndCsv) {
  TempDir dir;
  const auto out = (dir.path() / "trace.csv").string();
  const auto r = run("--format csv --out " + out + " trace --c 2");
  EXPECT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(out);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("r,y,dy", 0), 0u) << header;
}
