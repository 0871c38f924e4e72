#pragma once

// A spectrum within eps of an increasing target that has a strict local maximum
// at every dyadic rational up to a finite depth. The beta-form is the maximum
// of finitely many h curves h_{c(lambda, y_lambda)}, one per dyadic lambda; the
// y_lambda are chosen generation by generation from open constraint windows.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "assouad/errors.hpp"
#include "assouad/families.hpp"
#include "assouad/parallel.hpp"
#include "assouad/spectrum.hpp"
#include "assouad/validation.hpp"

namespace assouad {

struct DyadicChoice {
  double lambda;
  int level;        // lambda in D_level \ D_{level-1}
  double kappa;     // phi(lambda) of the (perturbed) target
  double y;         // chosen value of the beta-form at lambda
  double c;         // c(lambda, y)
  double window_lo; // open window (window_lo, window_hi) that y was taken from
  double window_hi;
  double psi;       // psi(lambda)
  double beta;      // target beta(lambda)
};

struct NonMonoBuild {
  SpectrumFn target;
  double eps;
  int depth;
  double eta;      // weight of d(1+theta)/2 in the strictly increasing target
  std::vector<DyadicChoice> choices;
  BetaFn psi;      // continuous decreasing lower barrier
  BetaFn beta;     // max of the h curves
  SpectrumFn phi;  // beta / (1 - theta)
};

namespace detail {

/// Scan (a, b) for the first place where lhs exceeds rhs by more than tol.
/// Returns b if it never does. Both sides are piecewise linear on `pts`.
inline double first_excess(const std::vector<double>& pts, double a, double b,
                           const std::function<double(double)>& lhs, const std::function<double(double)>& rhs,
                           double tol) {
  double px = a, pd = lhs(a) - rhs(a);
  for (double x : pts) {
    if (x <= a) continue;
    if (x >= b) break;
    const double dx = lhs(x) - rhs(x);
    if (dx > tol) {
      if (pd >= tol) return px;
      return px + (x - px) * ((tol - pd) / (dx - pd));
    }
    px = x;
    pd = dx;
  }
  return b;
}

/// Mirror of first_excess scanning leftwards from b.
inline double last_excess(const std::vector<double>& pts, double a, double b,
                          const std::function<double(double)>& lhs, const std::function<double(double)>& rhs,
                          double tol) {
  double px = b, pd = lhs(b) - rhs(b);
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    const double x = *it;
    if (x >= b) continue;
    if (x <= a) break;
    const double dx = lhs(x) - rhs(x);
    if (dx > tol) {
      if (pd >= tol) return px;
      return px - (px - x) * ((tol - pd) / (dx - pd));
    }
    px = x;
    pd = dx;
  }
  return a;
}

inline std::vector<double> merged(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace detail

/// Where y_lambda sits inside its window (0 = lower wall, 1 = upper wall).
/// Coarse generations sit high so that the chord cap (y_l1 + y_l2)/2 of later
/// generations stays above psi; the two finest generations sit low so their
/// plateaus stay below the coarser peaks at scale 2^-(depth+3).
inline constexpr double kCoarsePosition = 0.9;
inline constexpr double kFinePosition = 0.25;

inline NonMonoBuild build_nonmonotone(const SpectrumFn& target, double eps, int depth) {
  if (!(eps > 0.0)) throw std::invalid_argument("build_nonmonotone: eps must be > 0");
  if (depth < 1 || depth > 16) throw std::invalid_argument("build_nonmonotone: depth must lie in [1, 16]");
  const AmbientDim dim = target.dim();
  const double d = dim.real();

  const GridSpec probe{200, Spacing::uniform, kDefaultTolerance};
  if (!check_upper_form(target, probe).find("increasing")->passed())
    throw std::invalid_argument("build_nonmonotone: target is not increasing");
  if (!check_Ad(target, probe).passed) throw std::invalid_argument("build_nonmonotone: target fails the A_d check");

  // Strictly increasing target: convex combination with d(1+theta)/2, which lies
  // in A_d and is strictly increasing (A_d is convex). The weight is the largest
  // one that moves phi by at most eps/2; the other eps/2 is the margin of psi.
  const auto probe_pts = theta_grid({1000, Spacing::uniform, kDefaultTolerance});
  double spread = 0.0;
  for (double t : probe_pts) spread = std::max(spread, std::abs(d * (1.0 + t) / 2.0 - target.phi(t)));
  const double eta = spread > 0.0 ? std::min(1.0, eps / (2.0 * spread)) : 0.0;
  const std::function<double(double)> phi_t = [&target, eta, d](double t) {
    return (1.0 - eta) * target.phi_closed(t) + eta * d * (1.0 + t) / 2.0;
  };
  const std::function<double(double)> beta_t = [&phi_t](double t) { return (1.0 - t) * phi_t(t); };
  const double margin = eps / 2.0;

  // psi: right-running max of max(omega, beta - margin (1 - theta)) on a fine grid.
  const int K = depth + 8;
  std::vector<double> grid;
  const double step = std::ldexp(1.0, -K);
  for (long j = 0; j <= (1L << K); ++j) grid.push_back(static_cast<double>(j) * step);
  for (int j = K + 1; j <= 40; ++j) grid.push_back(1.0 - std::ldexp(1.0, -j));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<double> psi_vals(grid.size(), 0.0);
  double run = 0.0;
  for (std::size_t i = grid.size(); i-- > 0;) {
    const double t = grid[i];
    const double omega = (1.0 - t) * phi_t(t * t);
    const double floor = beta_t(t) - margin * (1.0 - t);
    run = std::max(run, std::max(omega, floor));
    psi_vals[i] = t >= 1.0 ? 0.0 : run;
  }
  const BetaFn psi(grid, psi_vals, dim);

  std::vector<BetaFn> curves;
  std::vector<DyadicChoice> choices;
  std::vector<double> y_at(static_cast<std::size_t>(1) << depth, 0.0);  // indexed by j for lambda = j 2^-depth
  BetaFn beta_n = detail::zero_beta(dim);

  for (int level = 1; level <= depth; ++level) {
    const int n = level - 1;  // neighbours live in D_n
    const long count = 1L << n;
    const double spacing = std::ldexp(1.0, -n);
    const int shift = depth - level;
    std::vector<DyadicChoice> gen(static_cast<std::size_t>(count));
    const std::function<double(double)> landscape = [&](double t) { return std::max(beta_n(t), psi(t)); };
    const std::vector<double> scan_pts = detail::merged(grid, beta_n.breakpoints());

    parallel_for(static_cast<std::size_t>(count), [&](std::size_t idx) {
      const long j = 2 * static_cast<long>(idx) + 1;  // lambda = j 2^-level
      const double lambda = std::ldexp(static_cast<double>(j), -level);
      const double kappa = phi_t(lambda);
      const double b = beta_t(lambda);
      const double p = psi(lambda);
      const bool has_left = j > 1, has_right = j < (1L << level) - 1;
      const double l1 = lambda - spacing / 2.0, l2 = lambda + spacing / 2.0;
      const double y1 = has_left ? y_at[static_cast<std::size_t>((j - 1) << shift)] : 0.0;
      const double y2 = has_right ? y_at[static_cast<std::size_t>((j + 1) << shift)] : 0.0;

      double lo = std::max(n == 0 ? 0.0 : beta_n(lambda), p);
      double hi = b;
      if (has_left) hi = std::min(hi, y1);
      if (has_right) lo = std::max(lo, y2);
      if (has_left && has_right) {
        hi = std::min(hi, 0.5 * (y1 + y2));

        // Right Dini control at l1, in the form used along the sequence of right
        // children (m = 1): the drop from y_l1 is at most (phi(l1) + 1/(n+1)) 2^-n-1.
        const double k1 = phi_t(l1);
        const BetaFn H = h_through(l1, y1, k1, dim);
        const double l0 = detail::first_excess(scan_pts, l1, l2, landscape, [&H](double t) { return H(t); }, 1e-12);
        lo = std::max(lo, y1 - (lambda - l1) * (k1 + 1.0 / (n + 1)));

        // Left Dini control at l2: the curve must meet the plateau y_l2 gently.
        const double l0p = std::max(
            l0, detail::last_excess(scan_pts, l1, l2, landscape, [y2](double) { return y2; }, 1e-12));
        int k = 1;
        while (l2 - std::ldexp(1.0, -n - k) < l0p && k < 60) ++k;
        const double dk = std::ldexp(1.0, -n - k);
        const double cap = y2 + dk / (n + k);
        if (k == 1) {
          hi = std::min(hi, cap);
        } else if (lo < hi) {
          const auto at_l0p = [&](double y) { return h_through(lambda, y, kappa, dim)(l0p); };
          if (at_l0p(hi) > cap) {
            if (at_l0p(lo) >= cap) {
              hi = lo;
            } else {
              double a = lo, z = hi;
              for (int it = 0; it < 200 && z - a > 1e-15 * std::max(1.0, z); ++it) {
                const double mid = 0.5 * (a + z);
                (at_l0p(mid) > cap ? z : a) = mid;
              }
              hi = a;
            }
          }
        }
      }
      gen[idx] = DyadicChoice{lambda, level, kappa, 0.0, 0.0, lo, hi, p, b};
    });

    for (auto& g : gen) {
      if (!(g.window_lo < g.window_hi))
        throw ConstructionError("build_nonmonotone: empty constraint window at lambda=" + std::to_string(g.lambda) +
                                " (lo=" + std::to_string(g.window_lo) + ", hi=" + std::to_string(g.window_hi) + ")");
      const double pos = g.level <= depth - 2 ? kCoarsePosition : kFinePosition;
      g.y = g.window_lo + pos * (g.window_hi - g.window_lo);
      g.c = c_of(g.lambda, g.y, g.kappa);
      const long j = std::lround(std::ldexp(g.lambda, depth));
      y_at[static_cast<std::size_t>(j)] = g.y;
      curves.push_back(make_h({g.kappa, g.lambda, g.c}, dim));
      choices.push_back(g);
    }
    beta_n = upper_envelope(curves);
  }

  std::sort(choices.begin(), choices.end(),
            [](const DyadicChoice& a, const DyadicChoice& b) { return a.lambda < b.lambda; });
  return NonMonoBuild{target, eps, depth, eta, std::move(choices), psi, beta_n, SpectrumFn(beta_n)};
}

}  // namespace assouad
