#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "jladder/tower.hpp"

using namespace jladder;
using namespace jladder::tower;

namespace {

constexpr double kPi = std::numbers::pi;

const ladder::LadderModel& model() {
  static ladder::LadderModel m;
  return m;
}

ChainWorkbench& bench() {
  static ChainWorkbench b(model());
  return b;
}

double base_integral(const FunctionFamily& f, double U) { return f.base_mean(U) * U; }

}  // namespace

TEST(Family, ClosedFormMeans) {
  const double U = kPi / 4.0;
  EXPECT_NEAR(FunctionFamily::sin2().base_mean(U), 0.5 * (1.0 - 2.0 / kPi), 1e-15);
  EXPECT_NEAR(FunctionFamily::sin2().base_mean(U), 0.181690, 1e-6);
  for (double u : {0.3, 1.0, 1.5}) {
    EXPECT_NEAR(FunctionFamily::sin2().base_mean(u) + FunctionFamily::cos2().base_mean(u), 1.0, 1e-15);
  }
  EXPECT_NEAR(FunctionFamily::power(Rational(1, 3)).base_mean(1.0), 0.75, 1e-15);
  EXPECT_EQ(FunctionFamily::one().base_mean(0.7), 1.0);
}

TEST(Family, OffsetFormMatchesAbsolute) {
  const double lo = kPi * 300;
  for (const auto& f : {FunctionFamily::sin2(), FunctionFamily::cos2(), FunctionFamily::power(Rational(1, 5))}) {
    for (double a : {0.01, 0.4, 1.3}) EXPECT_NEAR(f.at_offset(a), f(lo + a, lo), 1e-12) << f.name();
  }
}

TEST(Family, Names) {
  EXPECT_EQ(FunctionFamily::sin2().name(), "sin2");
  EXPECT_EQ(FunctionFamily::power(Rational(2, 6)).name(), "power(1/3)");
  EXPECT_THROW(FunctionFamily::power(Rational(0)), Error);
}

TEST(Tower, DepthZeroIsBase) {
  const auto t = build_tower(model(), 200, 1.0, 0);
  ASSERT_EQ(t.segments.size(), 1u);
  EXPECT_DOUBLE_EQ(t.segments[0].lo, kPi * 200);
  EXPECT_DOUBLE_EQ(t.segments[0].hi, kPi * 200 + 1.0);
}

TEST(Tower, EndpointsMapBack) {
  const auto t = build_tower(model(), 200, 1.0, 3);
  const double tol = 10.0 * model().config().root_tol;
  for (int r = 1; r <= 3; ++r) {
    const auto& s = t.segments[r];
    const auto& p = t.segments[r - 1];
    EXPECT_NEAR(model().phi1(s.lo), p.lo, tol);
    EXPECT_NEAR(model().phi1(s.hi), p.hi, tol);
    EXPECT_GT(s.lo, p.hi);
    EXPECT_LT(s.lo, s.hi);
    EXPECT_EQ(s.r, r);
  }
}

TEST(Tower, GapNearPrimeLaw) {
  const auto t = build_tower(model(), 500, 1.0, 1);
  const double gap = t.segments[1].lo - t.segments[0].hi;
  EXPECT_GT(gap, 0.0);
  // pi(1570.79) = 247
  EXPECT_NEAR(gap / ((1.0 - ladder::Constants::euler_c) * 247.0), 1.0, 0.3);
}

TEST(Tower, RejectsBadParameters) {
  try {
    build_tower(model(), 50, 1.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::DomainTooSmall);
  }
  EXPECT_THROW(build_tower(model(), 200, 0.0, 1), Error);
  EXPECT_THROW(build_tower(model(), 200, 1.6, 1), Error);
  EXPECT_THROW(build_tower(model(), 200, 1.0, 5), Error);
  EXPECT_THROW(build_tower(model(), 200, 1.0, -1), Error);
}

TEST(ChainWeight, OneAtDepthOneIntegratesToU) {
  const auto t = build_tower(model(), 200, 1.0, 1);
  const auto r = integrate_chain_weight(model(), FunctionFamily::one(), t, 1e-10);
  EXPECT_NEAR(r.value, 1.0, 1e-6);
}

TEST(ChainWeight, SineSquaredAtDepthTwo) {
  const auto t = build_tower(model(), 200, 1.0, 2);
  const auto r = integrate_chain_weight(model(), FunctionFamily::sin2(), t, 1e-10);
  EXPECT_NEAR(r.value, base_integral(FunctionFamily::sin2(), 1.0), 1e-6);
}

TEST(ChainWeight, ChangeOfVariablesAllFamilies) {
  for (int k = 0; k <= 4; ++k) {
    const auto t = build_tower(model(), 300, 0.8, k);
    for (const auto& f : {FunctionFamily::sin2(), FunctionFamily::cos2(), FunctionFamily::one(),
                          FunctionFamily::power(Rational(1, 3)), FunctionFamily::power(Rational(2))}) {
      const auto r = integrate_chain_weight(model(), f, t, 1e-10);
      EXPECT_NEAR(r.value, base_integral(f, 0.8), 1e-6) << f.name() << " k=" << k;
    }
  }
}

TEST(ChainWeight, NonNegative) {
  const auto t = build_tower(model(), 200, 1.0, 2);
  const auto g = chain_weight(model(), FunctionFamily::cos2(), t);
  const auto& s = t.top();
  for (int i = 0; i <= 1000; ++i) EXPECT_GE(g(s.lo + s.length() * i / 1000.0), 0.0);
}

TEST(Chain, LinearCaseAtDepthZero) {
  const auto t = build_tower(model(), 200, 1.0, 0);
  const auto c = solve_chain(model(), FunctionFamily::power(Rational(1)), t);
  EXPECT_NEAR(c.a0, 0.5, 1e-12);
  EXPECT_NEAR(c.alpha0(), kPi * 200 + 0.5, 1e-12);
}

TEST(Chain, LemmaOneAtDepthOne) {
  const auto c = bench().chain(200, 1.0, 1, FunctionFamily::sin2());
  const auto b = bench().beta(200, 1.0, 1);
  const auto res = lemma_residual(c, b, 1.0);
  EXPECT_LE(res.rel_residual, 1e-6);
  const double rhs = 0.5 * (1.0 - std::sin(2.0) / 2.0) / std::pow(std::sin(c.alpha0()), 2);
  EXPECT_NEAR(res.rhs / rhs, 1.0, 1e-9);
}

TEST(Chain, LemmaThreeAtDepthTwo) {
  const auto c = bench().chain(300, 1.0, 2, FunctionFamily::power(Rational(1, 3)));
  const auto b = bench().beta(300, 1.0, 2);
  EXPECT_LE(lemma_residual(c, b, 1.0).rel_residual, 1e-6);
}

TEST(Chain, MembershipAndResidual) {
  for (int k = 1; k <= 3; ++k) {
    const auto tw = bench().tower(200, 1.0, k);
    for (const auto& f : {FunctionFamily::sin2(), FunctionFamily::cos2(), FunctionFamily::one(),
                          FunctionFamily::power(Rational(1, 5))}) {
      const auto c = bench().chain(200, 1.0, k, f);
      EXPECT_TRUE(c.inside) << f.name() << " k=" << k;
      for (int r = 0; r <= k; ++r) EXPECT_TRUE(tw.segments[r].contains_open(c.alpha[r]));
      EXPECT_LE(c.residual / c.level, 1e-9);
      EXPECT_EQ(c.xi, c.alpha.back());
    }
  }
}

TEST(Chain, ForwardImagesOfSeed) {
  const auto c = bench().chain(250, 0.9, 3, FunctionFamily::cos2());
  for (int r = 0; r < 3; ++r) EXPECT_NEAR(model().forward_iterate(c.xi, 3 - r), c.alpha[r], 1e-9);
}

TEST(Chain, PointsCloseToBaseKeepPrecision) {
  // The leftmost crossing of the power(1/5) weight sits about 5e-11 above piL.
  const auto c = bench().chain(321, 1.1727, 3, FunctionFamily::power(Rational(1, 5)));
  const auto b = bench().beta(321, 1.1727, 3);
  EXPECT_LT(c.a0, 1e-6);
  EXPECT_LE(lemma_residual(c, b, 1.1727).rel_residual, 1e-6);
}

TEST(Beta, ProductTimesTopLengthIsU) {
  const auto tw = bench().tower(200, 1.0, 2);
  const auto b = bench().beta(200, 1.0, 2);
  EXPECT_NEAR(std::exp(b.log_product()) * tw.top().length() / 1.0, 1.0, 1e-6);
  for (int r = 0; r <= 2; ++r) EXPECT_TRUE(tw.segments[r].contains_open(b.alpha[r]));
}

TEST(Beta, SharedBitForBit) {
  const auto s1 = bench().chain_set(220, 1.1, 2, {FunctionFamily::sin2()});
  const auto s2 = bench().chain_set(220, 1.1, 2, {FunctionFamily::cos2(), FunctionFamily::power(Rational(1, 2))});
  EXPECT_EQ(s1.beta.alpha, s2.beta.alpha);
  for (std::size_t r = 1; r <= 2; ++r) EXPECT_EQ(s1.beta.ztilde_sq[r], s2.beta.ztilde_sq[r]);
  EXPECT_EQ(s2.chains.size(), 2u);
  try {
    s1.at(FunctionFamily::cos2());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::MissingChain);
  }
}

TEST(Beta, ShallowTowerIsPrefixOfDeep) {
  ChainWorkbench b(model());
  const auto deep = b.tower(260, 0.6, 3);
  const auto shallow = b.tower(260, 0.6, 1);
  ASSERT_EQ(shallow.segments.size(), 2u);
  EXPECT_EQ(shallow.segments[1].lo, deep.segments[1].lo);
  EXPECT_EQ(shallow.segments[1].hi, deep.segments[1].hi);
}

TEST(Lemma, GridResiduals) {
  for (int L : {150, 400}) {
    for (double U : {0.5, 1.4}) {
      for (int k = 1; k <= 3; ++k) {
        const auto b = bench().beta(L, U, k);
        for (const auto& f : {FunctionFamily::sin2(), FunctionFamily::cos2(), FunctionFamily::power(Rational(1)),
                              FunctionFamily::power(Rational(1, 5))}) {
          const auto res = lemma_residual(bench().chain(L, U, k, f), b, U);
          EXPECT_LE(res.rel_residual, std::max(1e-6, res.condition * 1e-9))
              << f.name() << " L=" << L << " U=" << U << " k=" << k;
        }
      }
    }
  }
}

TEST(Lemma, ConditionBoundIsEnforced) {
  ChainOptions opt;
  opt.condition_bound = 1e-3;
  const auto c = bench().chain(200, 1.0, 2, FunctionFamily::sin2());
  const auto b = bench().beta(200, 1.0, 2);
  try {
    lemma_residual(c, b, 1.0, opt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ConditionTooHigh);
  }
  const auto d = bench().chain(200, 1.0, 1, FunctionFamily::sin2());
  EXPECT_THROW(lemma_residual(d, b, 1.0), Error);
}
