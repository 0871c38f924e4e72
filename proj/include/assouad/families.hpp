#pragma once

// Explicit families of admissible spectra, in beta-form:
//
//   f_(k,c):      beta = k(1-c) on [0,c], k(1-theta) on [c,1]
//   h_(k,c1,c2):  slope 0 on [0,c1] and [c2,c1/c2], slope -k on [c1,c2] and
//                 [c1/c2,1], h(1) = 0
//
// and the example whose spectrum is not Holder at 1.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "assouad/spectrum.hpp"

namespace assouad {

struct MParam {
  double kappa;
  double c;
};

struct CParam {
  double kappa;
  double c1;
  double c2;
};

namespace detail {

inline void require_kappa(double kappa, AmbientDim d, const char* who) {
  if (!(kappa >= 0.0 && kappa <= d.real()))
    throw std::invalid_argument(std::string(who) + ": kappa must lie in [0, d], got " + std::to_string(kappa));
}

inline BetaFn zero_beta(AmbientDim d) { return BetaFn({0.0, 1.0}, {0.0, 0.0}, d); }

}  // namespace detail

inline BetaFn make_f(MParam p, AmbientDim d = AmbientDim(1)) {
  detail::require_kappa(p.kappa, d, "make_f");
  if (!(p.c > 0.0 && p.c < 1.0)) throw std::invalid_argument("make_f: c must lie in (0,1), got " + std::to_string(p.c));
  const double v = p.kappa * (1.0 - p.c);
  return BetaFn({0.0, p.c, 1.0}, {v, v, 0.0}, d);
}

/// Slack allowed when comparing c2 with sqrt(c1).
inline constexpr double kRootSlack = 1e-12;

/// h_(kappa,c1,c2). c1 = 0 is accepted as a degenerate flag (h = kappa(1-theta)).
inline BetaFn make_h(CParam p, AmbientDim d = AmbientDim(1)) {
  detail::require_kappa(p.kappa, d, "make_h");
  const double k = p.kappa, c1 = p.c1, c2 = p.c2;
  if (c1 == 0.0) {
    if (!(c2 >= 0.0 && c2 < 1.0)) throw std::invalid_argument("make_h: c2 must lie in [0,1)");
    return BetaFn({0.0, 1.0}, {k, 0.0}, d);
  }
  const double root = std::sqrt(c1);
  if (!(c1 > 0.0 && c1 <= c2 && c2 <= root + kRootSlack && root < 1.0))
    throw std::invalid_argument("make_h: need 0 < c1 <= c2 <= sqrt(c1) < 1, got c1=" + std::to_string(c1) +
                                " c2=" + std::to_string(c2));
  if (c2 >= root - kRootSlack) return make_f({k, c1}, d);
  if (c1 == c2 || k == 0.0) return detail::zero_beta(d);
  const double r = c1 / c2;
  const double flat = k * (1.0 - r);      // value on [c2, c1/c2]
  const double top = flat + k * (c2 - c1);  // value on [0, c1]
  return BetaFn({0.0, c1, c2, r, 1.0}, {top, top, flat, flat, 0.0}, d);
}

/// The c2 for which h_(phi_lambda, lambda, c2)(lambda) = y, for 0 <= y <= (1-lambda) phi_lambda.
inline double c_of(double lambda, double y, double phi_lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("c_of: lambda must lie in (0,1)");
  if (!(phi_lambda > 0.0)) throw std::invalid_argument("c_of: phi(lambda) must be > 0");
  const double top = (1.0 - lambda) * phi_lambda;
  if (!(y >= -kDefaultTolerance && y <= top + kDefaultTolerance))
    throw std::invalid_argument("c_of: y=" + std::to_string(y) + " outside [0, " + std::to_string(top) + "]");
  const double b = lambda + std::clamp(y, 0.0, top) / phi_lambda - 1.0;
  const double c = 0.5 * (b + std::sqrt(b * b + 4.0 * lambda));
  return std::clamp(c, lambda, std::sqrt(lambda));
}

/// h_{c(lambda,y)} with kappa = phi(lambda).
inline BetaFn h_through(double lambda, double y, double phi_lambda, AmbientDim d) {
  return make_h({phi_lambda, lambda, c_of(lambda, y, phi_lambda)}, d);
}

// ---------------------------------------------------------------------------
// f(theta) = 1 + 1/log(1-theta). With u = -log(1-theta), (1-theta) f(theta) is
// decreasing exactly when u^2 - u - 1 > 0, i.e. beyond theta0 = 1 - exp(-golden).

inline double holder_f(double theta) { return 1.0 + 1.0 / std::log1p(-theta); }

inline double holder_theta0_closed_form() { return -std::expm1(-std::numbers::phi); }

/// theta0 by bisection on the sign of d/dtheta [(1-theta) f(theta)].
inline double holder_theta0() {
  const auto slope_sign = [](double theta) {
    const double u = -std::log1p(-theta);
    return 1.0 / u + 1.0 / (u * u) - 1.0;
  };
  const auto done = [](double a, double b) { return b - a <= 1e-13; };
  const auto [lo, hi] = boost::math::tools::bisect(slope_sign, 0.5, 0.99, done);
  return 0.5 * (lo + hi);
}

struct HolderFailure {
  SpectrumFn sigma;  // tabulated
  double theta0;
  double f_theta0;
};

/// sigma(theta): (1-theta0) f(theta0)/(1-theta) up to theta0, f beyond; sigma(1) = 1.
inline double holder_sigma(double theta, double theta0) {
  if (theta >= 1.0) return 1.0;
  if (theta <= theta0) return (1.0 - theta0) * holder_f(theta0) / (1.0 - theta);
  return holder_f(theta);
}

/// Grid for the tabulated sigma. Below theta0 sigma = C/(1-theta), whose linear
/// interpolation error in beta is uniform in u = -log(1-theta), so 80% of the
/// points are uniform in u on [0, u(theta0)]; the rest are uniform in
/// s = -log10(1-theta) up to s = 15, plus the points 1 - 10^-k.
inline std::vector<double> holder_grid(int n_points, double theta0) {
  if (n_points < 10) throw std::invalid_argument("holder_grid: need at least 10 points");
  const int n_left = n_points * 4 / 5;
  const int n_right = n_points - n_left;
  const double u0 = -std::log1p(-theta0);
  std::vector<double> g{0.0, 1.0, theta0};
  for (int i = 1; i < n_left; ++i) g.push_back(-std::expm1(-u0 * i / n_left));
  const double s0 = u0 / std::log(10.0), s1 = 15.0;
  for (int i = 1; i <= n_right; ++i) g.push_back(1.0 - std::pow(10.0, -(s0 + (s1 - s0) * i / n_right)));
  for (int k = 1; k <= 15; ++k) g.push_back(1.0 - std::pow(10.0, -k));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

inline HolderFailure make_holder_failure(int n_points = 10000) {
  const double t0 = holder_theta0();
  std::vector<double> grid = holder_grid(n_points, t0);
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = holder_sigma(grid[i], t0);
  return {SpectrumFn::tabulated(std::move(grid), std::move(vals), AmbientDim(1)), t0, holder_f(t0)};
}

/// phi = h/(1-theta) with h(theta) = inf_{theta' <= theta} (1-theta') f(theta'),
/// tabulated on grid (which must span [0,1]); phi(1) = f(1).
inline SpectrumFn holder_envelope(const std::function<double(double)>& f, std::vector<double> grid,
                                  AmbientDim d = AmbientDim(1)) {
  detail::require_abscissae(grid, "holder_envelope");
  if (!(f(0.0) > 0.0)) throw std::invalid_argument("holder_envelope: need f(0) > 0");
  std::vector<double> vals(grid.size());
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    h = std::min(h, (1.0 - grid[i]) * f(grid[i]));
    vals[i] = h / (1.0 - grid[i]);
  }
  vals.back() = f(1.0);
  return SpectrumFn::tabulated(std::move(grid), std::move(vals), d);
}

}  // namespace assouad
