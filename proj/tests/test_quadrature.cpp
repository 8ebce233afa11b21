#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hardy/quadrature.hpp"

using namespace hardy;

TEST(Quadrature, FiniteInterval) {
  EXPECT_NEAR(integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi), 2.0, 1e-13);
  EXPECT_NEAR(integrate([](double x) { return x * x; }, -1.0, 2.0), 3.0, 1e-13);
  EXPECT_EQ(integrate([](double) { return 1.0; }, 1.0, 1.0), 0.0);
}

TEST(Quadrature, ExponentialTail) {
  const auto t = tail_integral([](double s) { return std::exp(-s); }, 0.0);
  EXPECT_FALSE(t.divergent);
  EXPECT_NEAR(t.value, 1.0, 1e-12);
}

TEST(Quadrature, AlgebraicTail) {
  const auto t = tail_integral([](double s) { return 1.0 / ((1.0 + s) * (1.0 + s)); }, 0.0);
  EXPECT_FALSE(t.divergent);
  EXPECT_NEAR(t.value, 1.0, 1e-9);
  const auto u = tail_integral([](double s) { return 0.25 / ((3.0 + s) * (3.0 + s)); }, 5.0);
  EXPECT_NEAR(u.value, 0.25 / 8.0, 1e-10);
}

TEST(Quadrature, DivergentTails) {
  EXPECT_TRUE(tail_integral([](double s) { return 1.0 / (1.0 + s); }, 0.0).divergent);
  EXPECT_TRUE(tail_integral([](double) { return 1.0; }, 0.0).divergent);
  EXPECT_TRUE(tail_integral([](double s) { return std::exp(0.5 * s); }, 0.0).divergent);
}

TEST(Quadrature, ZeroTail) {
  const auto t = tail_integral([](double) { return 0.0; }, 3.0);
  EXPECT_FALSE(t.divergent);
  EXPECT_EQ(t.value, 0.0);
}

TEST(Quadrature, NegativeIntegrandRejected) {
  EXPECT_THROW(tail_integral([](double) { return -1.0; }, 0.0), Error);
}
