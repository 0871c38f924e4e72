#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "assouad/families.hpp"
#include "assouad/growth.hpp"

using namespace assouad;

namespace {

const AmbientDim kD1(1);
const SpectrumFn kM(make_f({1, 0.5}));

std::size_t burn_in_block(double theta) { return static_cast<std::size_t>(std::ceil(-std::log(theta))) + 1; }

}  // namespace

TEST(Xi, MFamily) {
  const XiFn xi = xi_from_phi(kM);
  for (double y : {0.1, 0.3, 0.6}) EXPECT_NEAR(xi(y), 1 - std::exp(-y), 1e-15);
  for (double y : {0.8, 2.0, 30.0}) EXPECT_NEAR(xi(y), 0.5, 1e-15);
  EXPECT_NEAR(xi(std::log(2.0)), 0.5, 1e-15);
  EXPECT_THROW(xi(0.0), std::domain_error);
}

TEST(Xi, FullDimension) {
  const XiFn xi(SpectrumFn(BetaFn({0.0, 1.0}, {2.0, 0.0}, AmbientDim(2))));
  for (double y : {0.01, 1.0, 5.0}) EXPECT_NEAR(xi(y), 2 * (1 - std::exp(-y)), 1e-15);
}

TEST(Xi, IncrementProperties) {
  std::vector<double> ys;
  for (int i = 1; i <= 100; ++i) ys.push_back(0.05 * i);
  for (double c : {0.1, 0.5, 0.9}) EXPECT_TRUE(check_xi_props(XiFn(SpectrumFn(make_f({1, c}))), ys).passed);
  EXPECT_TRUE(check_xi_props(XiFn(SpectrumFn(make_h({1, 1.0 / 3.0, 0.5}))), ys).passed);
  // Equality case: xi(y2) - xi(y1) = d e^{-y1}(1 - e^{-(y2-y1)}) for phi = d.
  const XiFn full(SpectrumFn(BetaFn({0.0, 1.0}, {1.0, 0.0}, kD1)));
  const double y1 = 0.4, y2 = 1.3;
  EXPECT_NEAR(full(y2) - full(y1), std::exp(-y1) * full(y2 - y1), 1e-15);
}

TEST(Concatenate, SinglePieceAndJunctions) {
  const GrowthFn one = concatenate({Piece::relax(3.0, 1.0, 0.2)});
  for (double x : {0.0, 1.0, 3.0}) EXPECT_NEAR(one(x), 1.0 - 0.8 * std::exp(-x), 1e-15);
  EXPECT_THROW(one(3.5), RangeError);

  // (f_1, e_1, f_2) with lengths (1, 1, 2).
  const XiFn xi(kM);
  const double z1 = 0.25;
  const double w1 = xi(1.0) + std::exp(-1.0) * z1;
  const double z2 = w1 * std::exp(-1.0);
  const GrowthFn g = concatenate({Piece::xi(1, z1), Piece::decay(1, w1), Piece::xi(2, z2)}, kD1, xi);
  EXPECT_DOUBLE_EQ(g.length(), 4.0);
  EXPECT_NEAR(g(1.0), w1, 1e-15);
  EXPECT_NEAR(g(2.0), z2, 1e-15);
  EXPECT_NEAR(g(1.0 - 1e-13), g(1.0 + 1e-13), 1e-12);
  EXPECT_NEAR(g(2.0 - 1e-13), g(2.0 + 1e-13), 1e-12);
}

TEST(Concatenate, JunctionMismatchNamesIndex) {
  try {
    concatenate({Piece::constant(1.0, 0.3), Piece::constant(1.0, 0.3), Piece::constant(1.0, 0.5)});
    FAIL();
  } catch (const ConstructionError& e) {
    EXPECT_NE(std::string(e.what()).find("junction 1"), std::string::npos);
  }
}

TEST(BuildG, Recurrences) {
  const BuiltG b = build_g(kM, 1.0, 0.25);
  EXPECT_FALSE(b.u_blocks);
  // w_1 = 1/2 + e^{-1}/4 and z_2 = e^{-1} w_1, 40-digit values.
  EXPECT_NEAR(b.w[0], 0.5919698602928605804, 1e-15);
  EXPECT_NEAR(b.z[1], 0.21777354139487433377, 1e-15);
  const XiFn xi(kM);
  for (std::size_t i = 0; i + 1 < b.z.size(); ++i) {
    const double n = static_cast<double>(i + 1);
    EXPECT_EQ(b.w[i], xi(n) + std::exp(-n) * b.z[i]);
    EXPECT_EQ(b.z[i + 1], b.w[i] * std::exp(-n));
  }
  for (const auto& blk : b.blocks) EXPECT_DOUBLE_EQ(blk.x_n, static_cast<double>(blk.n * (blk.n - 1)));
}

TEST(BuildG, JunctionContinuity) {
  const BuiltG b = build_g(kM, 1.0);
  for (std::size_t i = 1; i < b.g.pieces().size(); ++i) {
    const double x = b.g.piece_start(i);
    EXPECT_NEAR(b.g.local(i - 1, b.g.pieces()[i - 1].length), b.g.local(i, 0.0), 1e-12) << i;
    EXPECT_NEAR(b.g(x), b.g.local(i, 0.0), 1e-12);
  }
  const BuiltG u = build_g(SpectrumFn(make_f({0.5, 0.5})), 0.7);
  EXPECT_TRUE(u.u_blocks);
  EXPECT_EQ(u.q.size(), u.blocks.size());
  for (std::size_t i = 1; i < u.g.pieces().size(); ++i)
    EXPECT_NEAR(u.g.local(i - 1, u.g.pieces()[i - 1].length), u.g.local(i, 0.0), 1e-12) << i;
}

TEST(BuildG, Errors) {
  EXPECT_THROW(build_g(kM, 0.9), std::invalid_argument);
  EXPECT_THROW(build_g(kM, 1.5), std::invalid_argument);
  EXPECT_THROW(build_g(kM, 1.0, 1.0), std::invalid_argument);
}

TEST(BuildG, TrivialZero) {
  const BuiltG b = build_g(SpectrumFn(make_f({0, 0.5})), 0.0);
  EXPECT_TRUE(b.trivial_zero);
  EXPECT_EQ(spectrum_from_g(b.g, 0.5, 60).value, 0.0);
}

TEST(CheckG, Cases) {
  // Upper bound flow: equality.
  const GrowthFn flow = concatenate({Piece::relax(50.0, 0.8, 0.1)});
  const ValidationReport r = check_G(flow, 0.0, 0.8);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.find("G_upper")->worst_violation, 1e-12);
  EXPECT_TRUE(check_G(concatenate({Piece::constant(50.0, 0.4)}), 0.2, 0.7).passed);
  EXPECT_TRUE(check_G(build_g(kM, 1.0).g, 0.0, 1.0).passed);
  // Rising faster than the alpha flow fails.
  EXPECT_FALSE(check_G(concatenate({Piece::relax(50.0, 0.9, 0.1)}), 0.0, 0.5).passed);
}

TEST(CheckG, XiPieceChain) {
  // f_n(y + t) <= (1 - e^{-t}) phi(1) + f_n(y) e^{-t}.
  const XiFn xi(SpectrumFn(make_h({1, 1.0 / 3.0, 0.5})));
  const GrowthFn g = concatenate({Piece::xi(40.0, 0.3)}, kD1, xi);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  for (int i = 0; i < 2000; ++i) {
    const double y = u(rng), t = u(rng);
    EXPECT_LE(g(y + t), (1 - std::exp(-t)) * 1.0 + g(y) * std::exp(-t) + 1e-12);
  }
}

TEST(SpectrumFromG, Trivial) {
  const GrowthFn c = concatenate({Piece::constant(80.0, 0.37)});
  for (double th : {0.1, 0.5, 0.9}) EXPECT_NEAR(spectrum_from_g(c, th, 60).value, 0.37, 1e-12);
  const GrowthFn d = concatenate({Piece::decay(80.0, 0.6)});
  for (double th : {0.1, 0.5, 0.9}) EXPECT_NEAR(spectrum_from_g(d, th, 60).value, 0.0, 1e-12);
  EXPECT_THROW(spectrum_from_g(c, 0.5, 79.5), RangeError);
}

TEST(SpectrumFromG, BlockStartsAreExact) {
  for (const SpectrumFn& f : {kM, SpectrumFn(make_h({1, 1.0 / 3.0, 0.5}))}) {
    const BuiltG b = build_g(f, f.phi_closed(1.0));
    for (int i = 1; i <= 9; ++i) {
      const double th = i / 10.0;
      for (std::size_t n = burn_in_block(th); n <= b.blocks.size(); ++n) {
        const double x = b.blocks[n - 1].x_n;
        if (x + (-std::log(th)) > b.g.length() || x > 60) break;
        EXPECT_NEAR(g_quotient(b.g, th, x), f.phi(th), 1e-9) << th << " n=" << n;
      }
    }
  }
}

TEST(SpectrumFromG, NeverAboveTargetAfterBurnIn) {
  const BuiltG b = build_g(kM, 1.0);
  for (int i = 1; i <= 9; ++i) {
    const double th = i / 10.0;
    const double x0 = b.blocks[burn_in_block(th) - 1].x_n;
    for (double x = x0; x <= 60; x += 0.01) ASSERT_LE(g_quotient(b.g, th, x), kM.phi(th) + 1e-6) << th << " " << x;
  }
}

TEST(SpectrumFromG, EarlyTransientCanExceedTarget) {
  // Before the first full block the quotient depends on z_1 and can overshoot.
  const BuiltG b = build_g(kM, 1.0);
  EXPECT_GT(spectrum_from_g(b.g, 0.1, 60).value, kM.phi(0.1) + 0.01);
}

TEST(SpectrumFromG, RoundtripReportsArgmaxAndTail) {
  const BuiltG b = build_g(kM, 1.0);
  const LimsupEstimate e = spectrum_from_g(b.g, 0.3, 60, 0.01, b.blocks[burn_in_block(0.3) - 1].x_n);
  EXPECT_NEAR(e.value, kM.phi(0.3), 1e-9);
  EXPECT_GE(e.argmax, b.blocks[burn_in_block(0.3) - 1].x_n);
  EXPECT_NEAR(e.tail_max, kM.phi(0.3), 1e-9);
}

TEST(AssouadDimFromG, Cases) {
  const GrowthFn c = concatenate({Piece::constant(80.0, 0.37)});
  EXPECT_NEAR(assouad_dim_from_g(c, 60, default_windows()).value, 0.37, 1e-12);
  EXPECT_NEAR(assouad_dim_from_g(build_g(kM, 1.0).g, 60, default_windows()).value, 1.0, 0.05);
  const BuiltG u = build_g(SpectrumFn(make_f({0.5, 0.5})), 0.7);
  EXPECT_NEAR(assouad_dim_from_g(u.g, 60, default_windows()).value, 0.7, 0.1);
}

TEST(SpectrumFromG, Deterministic) {
  const BuiltG b = build_g(kM, 1.0);
  const double a = spectrum_from_g(b.g, 0.37, 60).value;
  const double c = spectrum_from_g(b.g, 0.37, 60).value;
  EXPECT_EQ(a, c);
}
