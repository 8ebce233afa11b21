#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "hardy/closed_form.hpp"
#include "hardy/ode.hpp"
#include "hardy/special.hpp"
#include "oracles.hpp"

using namespace hardy;

namespace {

HardyODEProblem problem(const RadialPotential& p, double c, double R = 1.0, OdeDomain d = OdeDomain::Radius) {
  return {.potential = p, .multiplier = c, .R = R, .domain = d};
}

// First zero in (0, 1) of the solution of y'' + y'/r + k^2 y = 0 vanishing at r = 1.
double dirichlet_bessel_zero(double k) {
  auto f = [k](double r) {
    return std::cyl_bessel_j(0.0, k) * std::cyl_neumann(0.0, k * r) -
           std::cyl_neumann(0.0, k) * std::cyl_bessel_j(0.0, k * r);
  };
  // Scan inward geometrically for the first sign change.
  double hi = 1.0 - 1e-9;
  const bool sign = f(hi) > 0.0;
  double lo = hi;
  while ((f(lo) > 0.0) == sign) {
    hi = lo;
    lo *= 0.99;
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    ((f(mid) > 0.0) == sign ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = lo * std::exp(std::log(hi / lo) * i / (n - 1.0));
  return r;
}

}  // namespace

TEST(Frobenius, PowerLawExample) {
  auto prob = problem(RadialPotential::power_law(1.0), 1.0);
  prob.r0 = 1e-4;
  const auto init = frobenius_init(prob);
  EXPECT_NEAR(init.y, 1.0 - 1e-4, 1e-16);
  EXPECT_NEAR(init.dy, -1.0, 1e-15);
}

TEST(Frobenius, CriticalNeedsLogDomain) {
  const auto prob = problem(RadialPotential::adimurthi_log(1, std::exp(1.0), 1.0), 1.0);
  EXPECT_THROW(frobenius_init(prob), Error);
  EXPECT_THROW(frobenius_init(problem(RadialPotential::power_law(2.0), 1.0)), Error);
}

TEST(RadiusShooting, ConstantTracksJ0) {
  const auto out = integrate(problem(RadialPotential::constant(), 5.0));
  EXPECT_FALSE(out.zero_found());
  EXPECT_EQ(out.status, ShootingStatus::NoZeroOnInterval);
  EXPECT_NEAR(out.end, 1.0, 1e-15);
  ASSERT_GT(out.trajectory.size(), 10u);
  const double k = std::sqrt(5.0);
  for (const auto& s : out.trajectory) {
    EXPECT_NEAR(s.y, oracle::j0(k * s.x), 1e-8) << s.x;
    // The integrated state is u = r y'.
    EXPECT_NEAR(s.x * s.dy, -k * s.x * oracle::j1(k * s.x), 1e-8) << s.x;
  }
}

TEST(RadiusShooting, ZeroLocation) {
  const auto out = integrate(problem(RadialPotential::constant(), oracle::kZ0Sq * 1.21));
  ASSERT_TRUE(out.zero_found());
  EXPECT_EQ(out.status, ShootingStatus::ZeroFound);
  EXPECT_NEAR(*out.first_zero, 1.0 / 1.1, 1e-9);

  // Power law: y = J0(2 sqrt(c r)), zero at r = z0^2 / (4c).
  const auto pl = integrate(problem(RadialPotential::power_law(1.0), oracle::kZ0Sq));
  ASSERT_TRUE(pl.zero_found());
  EXPECT_NEAR(*pl.first_zero, 0.25, 1e-8);
}

TEST(RadiusShooting, ZeroStableUnderTolerance) {
  const auto prob = problem(RadialPotential::power_law(0.5), 9.0);
  const auto a = integrate(prob, {.rtol = 1e-9});
  const auto b = integrate(prob, {.rtol = 1e-12});
  ASSERT_TRUE(a.zero_found() && b.zero_found());
  EXPECT_NEAR(*a.first_zero, *b.first_zero, 1e-7);
}

TEST(LogShooting, DirichletStartMatchesBesselPair) {
  const double k = 1.1 * oracle::kZ0;
  auto prob = problem(RadialPotential::constant(), k * k, 1.0, OdeDomain::Log);
  prob.s_max = 40.0;
  const auto out = integrate(prob);
  ASSERT_TRUE(out.zero_found());
  EXPECT_NEAR(std::exp(-*out.first_zero), dirichlet_bessel_zero(k), 1e-9);
}

TEST(LogShooting, EulerOscillationZero) {
  // a = 1/(4 tau^2), tau = 1 + s; c = 1.44 gives c a = 0.36 / tau^2 and the
  // Dirichlet solution sqrt(tau) sin(nu ln tau) with nu = sqrt(0.11).
  const auto p = RadialPotential::adimurthi_log(1, std::exp(1.0), 1.0);
  auto prob = problem(p, 1.44, 1.0, OdeDomain::Log);
  const auto out = integrate(prob);
  ASSERT_TRUE(out.zero_found());
  const double tau = std::exp(std::numbers::pi / std::sqrt(0.11));
  EXPECT_NEAR((*out.first_zero + 1.0) / tau, 1.0, 1e-7);

  prob.multiplier = 1.0;
  const auto crit = integrate(prob);
  EXPECT_FALSE(crit.zero_found());
  EXPECT_EQ(crit.status, ShootingStatus::HorizonReached);
  EXPECT_EQ(crit.end, 1e6);
}

TEST(LogShooting, RescalingKeepsRatios) {
  auto prob = problem(RadialPotential::constant(), 1.0, 1.0, OdeDomain::Log);
  prob.s_max = 1e200;
  prob.initial = std::array<double, 2>{1.0, 1.0};
  const auto out = integrate(prob, {.record_trajectory = false});
  EXPECT_FALSE(out.zero_found());
  EXPECT_GT(out.rescale_count, 0);
  // z ~ s for large s, so z'/z ~ 1/s.
  EXPECT_NEAR(out.final_state[1] / out.final_state[0] * 1e200, 1.0, 1e-6);
}

TEST(Transforms, RoundTrip) {
  const auto prob = problem(RadialPotential::power_law(1.3, 2.0), 3.0);
  const auto log_prob = to_log_domain(prob);
  EXPECT_EQ(log_prob.domain, OdeDomain::Log);
  const auto back = to_radius_domain(log_prob);
  EXPECT_EQ(back.domain, OdeDomain::Radius);
  for (double r = 1e-12; r < 1.0; r *= 1.9) {
    const double s = -std::log(r);
    EXPECT_NEAR(std::exp(-s) / r, 1.0, 1e-13);
    EXPECT_NEAR(log_prob.log_coefficient(s) / (r * r * back.radius_coefficient(r)), 1.0, 1e-13);
  }
}

TEST(Riccati, ZeroPotential) {
  auto prob = problem(RadialPotential::constant(0.0), 1.0, 1.0, OdeDomain::Log);
  prob.s_start = 0.0;
  prob.s_max = 10.0;
  prob.initial = std::array<double, 2>{1.0, 0.0};
  EXPECT_EQ(riccati_check(integrate(prob), prob), 0.0);
}

TEST(Riccati, BesselReference) {
  // J0(r) posed in s on [1, 5].
  auto prob = problem(RadialPotential::constant(), 1.0, 1.0, OdeDomain::Log);
  const double r0 = std::exp(-1.0);
  prob.s_start = 1.0;
  prob.s_max = 5.0;
  prob.initial = std::array<double, 2>{oracle::j0(r0), r0 * oracle::j1(r0)};
  const auto out = integrate(prob, {.rtol = 1e-12, .max_step = 0.01});
  for (const auto& s : out.trajectory) EXPECT_NEAR(s.y, oracle::j0(std::exp(-s.x)), 1e-11);
  EXPECT_FALSE(out.zero_found());
  EXPECT_LE(riccati_check(out, prob), 1e-6);
}

TEST(Riccati, SqrtReference) {
  // z = (1 + s)^{1/2} solves z'' + z / (4 (1 + s)^2) = 0.
  const auto p = RadialPotential::adimurthi_log(1, std::exp(1.0), 1.0);
  auto prob = problem(p, 1.0, 1.0, OdeDomain::Log);
  prob.s_max = 100.0;
  prob.initial = std::array<double, 2>{1.0, 0.5};
  const auto out = integrate(prob, {.rtol = 1e-12, .max_step = 0.005});
  for (const auto& s : out.trajectory) EXPECT_NEAR(s.y / std::sqrt(1.0 + s.x), 1.0, 1e-9);
  EXPECT_LE(riccati_check(out, prob), 1e-8);
}

TEST(Riccati, RejectsSignChange) {
  auto prob = problem(RadialPotential::constant(), 30.0, 1.0, OdeDomain::Log);
  prob.s_max = 20.0;
  const auto out = integrate(prob);
  ASSERT_TRUE(out.zero_found());
  try {
    riccati_check(out, prob);
    FAIL() << "expected NonPositiveTrajectory";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveTrajectory);
  }
}

TEST(Residual, ConstantClosedForm) {
  const auto p = RadialPotential::constant();
  const auto r = log_grid(1e-6, 1.0, 10'000);
  std::vector<double> phi;
  for (double x : r) phi.push_back(closed_form_solution(p, x, 1.0));
  EXPECT_LE(residual(phi, problem(p, closed_form_multiplier(p, 1.0)), r), 1e-6);
  // Off the eigen-multiplier the residual is large.
  EXPECT_GT(residual(phi, problem(p, 1.2 * closed_form_multiplier(p, 1.0)), r), 1e-3);
}

TEST(Residual, LogFamiliesUpToDepthThree) {
  const auto r = log_grid(1e-12, 1.0, 10'000);
  for (int m = 1; m <= 3; ++m) {
    for (const auto& p : {RadialPotential::adimurthi_log(m, exp_tower(m), 1.0),
                          RadialPotential::adimurthi_log(m, 2.0 * exp_tower(m), 1.0, 4.0),
                          RadialPotential::filippas_tertikas(m, 1.0, 1.0),
                          RadialPotential::filippas_tertikas(m, 3.0, 1.0, 4.0)}) {
      std::vector<double> phi;
      for (double x : r) phi.push_back(closed_form_solution(p, x));
      EXPECT_LE(residual(phi, problem(p, closed_form_multiplier(p, 1.0)), r), 1e-6)
          << to_string(p.kind()) << " m=" << m;
    }
  }
}

TEST(Residual, GridChecks) {
  const auto p = RadialPotential::constant();
  std::vector<double> r = {0.1, 0.2, 0.3};
  std::vector<double> phi = {1, 1, 1};
  EXPECT_THROW(residual(phi, problem(p, 1.0), r), Error);
  r = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6};
  phi.assign(6, 1.0);
  EXPECT_THROW(residual(phi, problem(p, 1.0), r), Error);
}

TEST(Trajectory, CsvExport) {
  const auto out = integrate(problem(RadialPotential::constant(), 2.0));
  std::ostringstream os;
  write_trajectory_csv(os, out);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "r,y,dy");
  std::size_t rows = 0;
  double prev = 0.0;
  while (std::getline(in, line)) {
    const double x = std::stod(line.substr(0, line.find(',')));
    EXPECT_GT(x, prev);
    prev = x;
    ++rows;
  }
  EXPECT_EQ(rows, out.trajectory.size());

  auto prob = problem(RadialPotential::adimurthi_log(1, std::exp(1.0), 1.0), 0.5, 1.0, OdeDomain::Log);
  prob.s_max = 100.0;
  std::ostringstream ls;
  write_trajectory_csv(ls, integrate(prob));
  EXPECT_EQ(ls.str().substr(0, 7), "s,z,dz\n");
}
