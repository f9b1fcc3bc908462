#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "jladder/numerics.hpp"

using namespace jladder;
using namespace jladder::numerics;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(Integrate, PolynomialIsExact) {
  const auto r = integrate([](double t) { return t * t; }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(r.value, 1.0 / 3.0, 1e-12);
  EXPECT_GE(r.error_estimate, 0.0);
  EXPECT_GE(r.evaluations, 1u);
}

TEST(Integrate, SineSquaredOverPeriod) {
  const auto r = integrate([](double t) { return std::sin(t) * std::sin(t); }, 0.0, kPi, 1e-12);
  EXPECT_NEAR(r.value, kPi / 2.0, 1e-12);
}

TEST(Integrate, SineSquaredOnShiftedBase) {
  const double L = 3.0;
  const double U = kPi / 4.0;
  const auto r = integrate([](double t) { return std::sin(t) * std::sin(t); }, kPi * L, kPi * L + U, 1e-12);
  EXPECT_NEAR(r.value, kPi / 8.0 - 0.25, 1e-12);
  EXPECT_NEAR(r.value, 0.5 * U * (1.0 - std::sin(2.0 * U) / (2.0 * U)), 1e-12);
}

TEST(Integrate, Additivity) {
  auto f = [](double t) { return std::cos(3.0 * t) * std::exp(-0.1 * t) + 2.0; };
  const double tol = 1e-11;
  for (double c : {0.3, 1.7, 4.9}) {
    const double whole = integrate(f, 0.0, 5.0, tol).value;
    const double parts = integrate(f, 0.0, c, tol).value + integrate(f, c, 5.0, tol).value;
    EXPECT_LE(std::abs(whole - parts), 3.0 * tol) << "c = " << c;
  }
}

TEST(Integrate, WavelengthCapResolvesFastOscillation) {
  // Without a cap the first panel samples only the nodes of one rule.
  auto f = [](double t) { return std::cos(200.0 * t) * std::cos(200.0 * t); };
  const auto r = integrate(f, 0.0, 10.0, 1e-10, 2.0 * kPi / 200.0);
  EXPECT_NEAR(r.value, 5.0 + std::sin(4000.0) / 800.0, 1e-10);
}

TEST(Integrate, PanelLimitRaisesNonConvergence) {
  QuadratureOptions opt;
  opt.max_panels = 4;
  try {
    integrate([](double t) { return std::sqrt(std::abs(t - 0.3)); }, 0.0, 1.0, 1e-14, std::nullopt, opt);
    FAIL() << "expected NonConvergence";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
  }
}

TEST(Integrate, RejectsBadArguments) {
  auto f = [](double t) { return t; };
  EXPECT_THROW(integrate(f, 1.0, 1.0, 1e-10), Error);
  EXPECT_THROW(integrate(f, 0.0, 1.0, 0.0), Error);
  EXPECT_THROW(integrate(f, 0.0, 1.0, 1e-10, 0.0), Error);
}

TEST(Bracket, RequiresOrderedEnds) {
  try {
    Bracket b(2.0, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BracketInvalid);
  }
  EXPECT_THROW(Bracket(1.0, 1.0), Error);
  EXPECT_DOUBLE_EQ(Bracket(1.0, 3.5).width(), 2.5);
}

TEST(InvertIncreasing, SquareRootOfTwo) {
  const double tol = 1e-13;
  const double x = invert_increasing([](double v) { return v * v; }, Bracket(1.0, 2.0), 2.0, tol);
  EXPECT_NEAR(x, std::sqrt(2.0), tol);
}

TEST(InvertIncreasing, Identity) {
  const double x = invert_increasing([](double v) { return v; }, Bracket(0.0, 1.0), 0.25, 1e-14);
  EXPECT_NEAR(x, 0.25, 1e-14);
}

TEST(InvertIncreasing, ResidualBySubstitution) {
  auto g = [](double v) { return v + std::sin(v); };
  const double tol = 1e-12;
  const double x = invert_increasing(g, Bracket(0.0, 4.0), 3.0, tol);
  // |g'| <= 2, so the residual is at most 2 tol.
  EXPECT_LE(std::abs(g(x) - 3.0), 2.0 * tol);
}

TEST(InvertIncreasing, RoundTripsOnMonotoneFunctions) {
  auto g = [](double v) { return std::exp(v) + v * v * v; };
  for (double x0 : {-1.5, 0.0, 0.7, 2.2}) {
    const double x = invert_increasing(g, Bracket(-2.0, 3.0), g(x0), 1e-13);
    EXPECT_NEAR(x, x0, 1e-12);
  }
}

TEST(InvertIncreasing, UnbracketedTarget) {
  try {
    invert_increasing([](double v) { return v; }, Bracket(0.0, 1.0), 2.0, 1e-12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BracketInvalid);
  }
}

TEST(LevelCrossing, SineSquaredClosedForm) {
  const int L = 7;
  const double U = 1.2;
  const double a = kPi * L;
  const double tol = 1e-12;
  const double x =
      find_level_crossing([](double t) { return std::sin(t) * std::sin(t); }, a, a + U, 0.3, 512, tol);
  EXPECT_NEAR(x, a + std::asin(std::sqrt(0.3)), 4.0 * tol);
}

TEST(LevelCrossing, ConstantPicksLeftmostScanPoint) {
  const double x = find_level_crossing([](double) { return 2.5; }, 0.0, 1.0, 2.5, 11, 1e-12);
  EXPECT_DOUBLE_EQ(x, 0.1);
}

TEST(LevelCrossing, LeftmostOfSeveral) {
  const double x = find_level_crossing([](double t) { return std::sin(t); }, 0.1, 10.0, 0.5, 64, 1e-13);
  EXPECT_NEAR(x, kPi / 6.0, 1e-12);
}

TEST(LevelCrossing, ResidualWithinLipschitzTimesTol) {
  auto g = [](double t) { return 1.0 + 0.5 * std::sin(5.0 * t) + 0.1 * t; };
  const double tol = 1e-11;
  const double x = find_level_crossing(g, 0.0, 3.0, 1.2, 128, tol);
  EXPECT_LE(std::abs(g(x) - 1.2), 2.6 * tol);
}

TEST(LevelCrossing, RefinesGridToFindNarrowCrossing) {
  // A spike narrower than the initial grid spacing.
  auto g = [](double t) { return std::exp(-std::pow((t - 0.5037) / 0.002, 2)); };
  CrossingOptions opt;
  opt.max_refinements = 6;
  EXPECT_THROW(find_level_crossing(g, 0.0, 1.0, 0.5, 11, 1e-12), Error);
  const double x = find_level_crossing(g, 0.0, 1.0, 0.5, 11, 1e-12, opt);
  EXPECT_LT(x, 0.5037);
  EXPECT_NEAR(g(x), 0.5, 1e-8);
}

TEST(LevelCrossing, NoCrossing) {
  try {
    find_level_crossing([](double t) { return t; }, 0.0, 1.0, 5.0, 16, 1e-12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NoCrossing);
  }
}

TEST(LevelCrossing, ScanReportsBracket) {
  const auto br = scan_level_crossing([](double t) { return t * t; }, 0.0, 2.0, 1.5, 5);
  EXPECT_FALSE(br.exact);
  EXPECT_LT(br.h_lo, 0.0);
  EXPECT_GT(br.h_hi, 0.0);
  EXPECT_LE(br.lo, std::sqrt(1.5));
  EXPECT_GE(br.hi, std::sqrt(1.5));
  EXPECT_THROW(scan_level_crossing([](double t) { return t; }, 0.0, 1.0, 0.5, 2), Error);
}
