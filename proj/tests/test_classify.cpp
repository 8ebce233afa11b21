#include <chrono>
#include <cmath>

#include <gtest/gtest.h>

#include "hardy/classify.hpp"

using namespace hardy;

namespace {

double seconds_for(const RadialPotential& p, ClassLabel& out) {
  const auto t0 = std::chrono::steady_clock::now();
  out = classify(p);
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

class PowerLawBelowTwo : public ::testing::TestWithParam<double> {};

TEST_P(PowerLawBelowTwo, IsX) {
  ClassLabel out;
  const double t = seconds_for(RadialPotential::power_law(GetParam(), 1.0, 1.0), out);
  EXPECT_EQ(out.label, AdmissibilityClass::X);
  EXPECT_FALSE(out.divergent_inner_integral);
  EXPECT_LE(t, 1.0);
}

INSTANTIATE_TEST_SUITE_P(Alpha, PowerLawBelowTwo, ::testing::Values(0.5, 1.0, 1.5));

class PowerLawAtLeastTwo : public ::testing::TestWithParam<double> {};

TEST_P(PowerLawAtLeastTwo, IsY) {
  ClassLabel out;
  const double t = seconds_for(RadialPotential::power_law(GetParam(), 1.0, 1.0), out);
  EXPECT_EQ(out.label, AdmissibilityClass::Y);
  EXPECT_TRUE(out.divergent_inner_integral);
  EXPECT_LE(t, 1.0);
}

INSTANTIATE_TEST_SUITE_P(Alpha, PowerLawAtLeastTwo, ::testing::Values(2.0, 2.5));

TEST(Classify, ConstantIsX) {
  const auto out = classify(RadialPotential::constant(1.0, 1.0));
  EXPECT_EQ(out.label, AdmissibilityClass::X);
  // L(r) = ln(r) r^2 / 2
  for (std::size_t i = 0; i < out.evidence.size(); ++i) {
    const double s = out.probe_log_radii[i];
    EXPECT_NEAR(out.evidence[i], -s * std::exp(-2.0 * s) / 2.0, 1e-12 + 1e-8 * std::exp(-2.0 * s) * s);
  }
}

TEST(Classify, PowerLawOneEvidence) {
  const auto out = classify(RadialPotential::power_law(1.0, 1.0, 1.0));
  for (std::size_t i = 0; i < out.evidence.size(); ++i) {
    const double s = out.probe_log_radii[i];
    EXPECT_NEAR(out.evidence[i], -s * std::exp(-s), 1e-12);
  }
}

TEST(Classify, LogFamiliesAreX) {
  EXPECT_EQ(classify(RadialPotential::adimurthi_log(1, std::exp(1.0), 1.0)).label, AdmissibilityClass::X);
  EXPECT_EQ(classify(RadialPotential::filippas_tertikas(1, 1.0, 1.0)).label, AdmissibilityClass::X);
  EXPECT_EQ(classify(RadialPotential::adimurthi_log(2, exp_tower(2), 1.0)).label, AdmissibilityClass::X);
}

TEST(Classify, ScaleStable) {
  for (double alpha : {0.5, 1.0, 1.5, 2.0, 2.5}) {
    const auto base = classify(RadialPotential::power_law(alpha, 1.0, 1.0)).label;
    for (double beta : {0.5, 2.0}) {
      // beta^2 V(beta r) on (0, 1/beta)
      const auto scaled = RadialPotential::power_law(alpha, std::pow(beta, 2.0 - alpha), 1.0 / beta);
      EXPECT_EQ(classify(scaled).label, base) << alpha << " " << beta;
    }
  }
}

TEST(Classify, DefaultProbesReachSmallRadii) {
  const auto p = RadialPotential::power_law(1.0, 1.0, 2.0);
  const auto probes = default_probes(p);
  ASSERT_EQ(probes.size(), 41u);
  EXPECT_NEAR(probes.front(), std::log(1e6 / 2.0), 1e-12);
  for (std::size_t i = 1; i < probes.size(); ++i) EXPECT_GT(probes[i], probes[i - 1]);
}

TEST(Classify, RejectsBadProbes) {
  const auto p = RadialPotential::power_law(1.0, 1.0, 1.0);
  EXPECT_THROW(
      {
        try {
          classify(p, std::vector<double>{20.0, 30.0, 25.0, 40.0, 50.0, 60.0, 70.0});
        } catch (const Error& e) {
          EXPECT_EQ(e.code(), ErrorCode::DomainError);
          throw;
        }
      },
      Error);
  EXPECT_THROW(classify(p, std::vector<double>{20.0, 30.0, 40.0}), Error);
  EXPECT_THROW(classify(p, std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}), Error);
}

TEST(Classify, InnerIntegralMatchesAnalytic) {
  // int_0^r t * t^{-1/2} dt = (2/3) r^{3/2}
  const auto p = RadialPotential::power_law(0.5, 1.0, 1.0);
  for (double s : {0.0, 1.0, 10.0}) {
    const auto tail = inner_integral(p, s);
    ASSERT_FALSE(tail.divergent);
    EXPECT_NEAR(tail.value, 2.0 / 3.0 * std::exp(-1.5 * s), 1e-12);
  }
  EXPECT_TRUE(inner_integral(RadialPotential::power_law(2.0, 1.0, 1.0), 1.0).divergent);
}
