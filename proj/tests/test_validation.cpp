#include <gtest/gtest.h>

#include <cmath>

#include "assouad/families.hpp"
#include "assouad/nonmonotone.hpp"
#include "assouad/validation.hpp"

using namespace assouad;

namespace {

const AmbientDim kD1(1);

SpectrumFn M(double kappa, double c) { return SpectrumFn(make_f({kappa, c})); }
SpectrumFn C(double kappa, double c1, double c2) { return SpectrumFn(make_h({kappa, c1, c2})); }

// phi(theta) = theta, exactly representable: beta = theta(1-theta) is not linear,
// so use a fine table.
SpectrumFn identity_table() {
  std::vector<double> g, v;
  for (int i = 0; i <= 1000; ++i) {
    g.push_back(i / 1000.0);
    v.push_back(i / 1000.0);
  }
  return SpectrumFn::tabulated(g, v, kD1);
}

SpectrumFn constant(double c, int d = 1) { return SpectrumFn(BetaFn({0.0, 1.0}, {c, 0.0}, AmbientDim(d))); }

}  // namespace

TEST(ThetaGrid, UniformAndGeometric) {
  const auto u = theta_grid({4});
  ASSERT_EQ(u.size(), 4u);
  EXPECT_DOUBLE_EQ(u.front(), 0.2);
  EXPECT_DOUBLE_EQ(u.back(), 0.8);
  const auto g = theta_grid({10, Spacing::geometric_near_endpoints});
  EXPECT_DOUBLE_EQ(g.back(), 1.0 - std::ldexp(1.0, -kGeometricLevels));
  EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
  EXPECT_THROW(theta_grid({1}), std::invalid_argument);
  EXPECT_THROW(theta_grid({10, Spacing::uniform, 0.0}), std::invalid_argument);
}

TEST(CheckAd, FamiliesPass) {
  for (double c : {0.1, 0.5, 0.9}) EXPECT_TRUE(check_Ad(M(1, c), {200}).passed) << c;
  EXPECT_TRUE(check_Ad(C(1, 1.0 / 3.0, 0.5), {200}).passed);
  EXPECT_TRUE(check_Ad(C(0.6, 0.04, 0.1), {200}).passed);
}

TEST(CheckAd, IdentityFailsWithWitness) {
  // beta(0.1) = 0.09 < beta(0.2) = 0.16.
  const ValidationReport r = check_Ad(identity_table(), {9});
  EXPECT_FALSE(r.passed);
  const CheckResult* c = r.find("beta_decreasing");
  ASSERT_NE(c, nullptr);
  EXPECT_FALSE(c->passed());
  ASSERT_EQ(c->witness.size(), 2u);
  EXPECT_LT(c->witness[0], c->witness[1]);
  EXPECT_LE(c->witness[0], 0.5);
  EXPECT_NEAR(0.2 * 0.8 - 0.1 * 0.9, 0.07, 1e-15);
  EXPECT_GE(c->worst_violation, 0.07 - 1e-12);
}

TEST(CheckAd, UpperInequalityViolation) {
  // beta drops too fast right after 0.5: slope -4 exceeds phi(lambda/theta) near the diagonal.
  const SpectrumFn f(BetaFn({0.0, 0.5, 0.6, 1.0}, {0.5, 0.5, 0.1, 0.0}, kD1));
  const ValidationReport r = check_Ad(f, {200});
  EXPECT_FALSE(r.find("secant_bound")->passed());
  EXPECT_TRUE(r.find("beta_decreasing")->passed());
}

TEST(CheckAd, SecantFormAgrees) {
  for (const SpectrumFn& f : {M(1, 0.5), C(1, 1.0 / 3.0, 0.5), identity_table()}) {
    const bool a = check_Ad(f, {120}).find("secant_bound")->passed();
    const bool b = check_secant_form(f, {120}).find("secant_slopes")->passed();
    EXPECT_EQ(a, b);
  }
  const SpectrumFn bad(BetaFn({0.0, 0.5, 0.6, 1.0}, {0.5, 0.5, 0.1, 0.0}, kD1));
  EXPECT_FALSE(check_secant_form(bad, {120}).passed);
}

TEST(CheckAd, ReportIsDeterministic) {
  const auto a = check_Ad(identity_table(), {150});
  const auto b = check_Ad(identity_table(), {150});
  for (std::size_t i = 0; i < a.checks.size(); ++i) {
    EXPECT_EQ(a.checks[i].worst_violation, b.checks[i].worst_violation);
    EXPECT_EQ(a.checks[i].witness, b.checks[i].witness);
  }
}

TEST(NthRoot, Cases) {
  EXPECT_TRUE(check_nth_root(M(1, 0.5), 0.5, 10).passed);
  EXPECT_TRUE(check_nth_root(C(1, 1.0 / 3.0, 0.5), 0.49, 6).passed);
  EXPECT_TRUE(check_nth_root(identity_table(), 0.3, 1).passed);
  EXPECT_EQ(check_nth_root(C(1, 1.0 / 3.0, 0.5), 0.3, 1).checks[0].worst_violation, 0.0);
}

TEST(DiniPlus, Values) {
  EXPECT_NEAR(dini_plus(M(1, 0.5), 0.75, 1e-6), 0.0, 1e-9);
  EXPECT_NEAR(dini_plus(M(1, 0.5), 0.25, 1e-6), 8.0 / 9.0, 1e-3);
  EXPECT_NEAR(dini_plus(constant(0.3), 0.5, 1e-6), 0.0, 1e-9);
  EXPECT_THROW(dini_plus(M(1, 0.5), 0.99999, 1e-6), std::domain_error);
  EXPECT_THROW(dini_plus(M(1, 0.5), 0.5, 0.0), std::domain_error);
}

TEST(RateBounds, Cases) {
  const ValidationReport r = check_rate_bounds(M(1, 0.5), {200});
  EXPECT_TRUE(r.passed);
  EXPECT_EQ(r.ladder.size(), static_cast<std::size_t>(kDiniLadderPoints));
  // The upper bound phi/(1-theta) = 8/9 is attained at theta = 1/4.
  EXPECT_NEAR(M(1, 0.5).phi(0.25) / 0.75, 8.0 / 9.0, 1e-15);
  EXPECT_TRUE(check_rate_bounds(constant(2, 2), {200}).passed);
  EXPECT_TRUE(check_rate_bounds(C(1, 1.0 / 3.0, 0.5), {200}).passed);
}

TEST(RateBounds, NonMonotoneConstruction) {
  const NonMonoBuild b = build_nonmonotone(M(1, 0.5), 0.1, 6);
  EXPECT_TRUE(check_rate_bounds(b.phi, {200}).passed);
}

TEST(IncreasingAd, Cases) {
  const ValidationReport m = check_increasing_Ad(M(1, 0.5), {200});
  EXPECT_TRUE(m.passed);
  EXPECT_FALSE(m.abstained);
  EXPECT_TRUE(m.find("agrees_with_check_Ad")->passed());

  const ValidationReport c = check_increasing_Ad(C(1, 1.0 / 3.0, 0.5), {200});
  EXPECT_TRUE(c.abstained);
  EXPECT_FALSE(c.find("increasing")->passed());
  EXPECT_EQ(c.find("dini_upper"), nullptr);

  EXPECT_TRUE(check_increasing_Ad(constant(0.0), {200}).passed);
}

TEST(IncreasingAd, AgreesWithCheckAdOnIncreasingFunctions) {
  // Increasing phi whose beta rises on [0.4,0.5]: both verdicts must be "fail".
  const SpectrumFn bad = SpectrumFn::tabulated({0.0, 0.4, 0.5, 1.0}, {0.3, 0.3, 0.9, 0.9}, kD1);
  for (const SpectrumFn& f : {M(0.5, 0.2), M(1, 0.9), bad}) {
    const ValidationReport r = check_increasing_Ad(f, {150});
    ASSERT_FALSE(r.abstained);
    EXPECT_TRUE(r.find("agrees_with_check_Ad")->passed());
  }
  EXPECT_FALSE(check_increasing_Ad(bad, {150}).find("dini_upper")->passed());
}

TEST(UpperForm, Cases) {
  EXPECT_TRUE(check_upper_form(M(1, 0.5), {200}).passed);
  EXPECT_TRUE(check_upper_form(running_max(C(1, 1.0 / 3.0, 0.5)), {200}).passed);
  EXPECT_FALSE(check_upper_form(C(1, 1.0 / 3.0, 0.5), {200}).passed);
  const ValidationReport id = check_upper_form(identity_table(), {200});
  EXPECT_TRUE(id.find("increasing")->passed());
  EXPECT_FALSE(id.find("beta_decreasing")->passed());
  EXPECT_LT(id.find("beta_decreasing")->witness[0], 0.5);
}

TEST(LimitProperties, Proxies) {
  for (const SpectrumFn& f : {M(1, 0.5), C(1, 1.0 / 3.0, 0.5), constant(0.0), M(0.25, 0.9)}) {
    const ValidationReport r = check_limit_properties(f, {200});
    EXPECT_TRUE(r.passed);
  }
  // Reaches phi(1) then dips: plateau proxy fails.
  const SpectrumFn dip =
      SpectrumFn::tabulated({0.0, 0.3, 0.4, 0.5, 0.7, 1.0}, {0.5, 1.0, 1.0, 0.6, 1.0, 1.0}, kD1);
  EXPECT_FALSE(check_limit_properties(dip, {200}).find("plateau_after_max")->passed());
}

TEST(Report, PassedIffAllChecksPass) {
  const ValidationReport r = check_Ad(identity_table(), {50});
  bool all = true;
  for (const auto& c : r.checks) {
    all = all && c.passed();
    if (!c.passed()) EXPECT_FALSE(c.witness.empty());
  }
  EXPECT_EQ(r.passed, all);
}
