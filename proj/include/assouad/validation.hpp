#pragma once

// Grid-based verification of the admissibility inequalities
//
//   0 <= (1-l) phi(l) - (1-t) phi(t) <= (t-l) phi(l/t),   0 < l < t < 1,
//
// and of the regularity properties every admissible function has. Mathematical
// failure is reported as data (worst violation plus witness), never thrown.
// Limits and Dini derivatives are replaced by declared finite ladders, which are
// recorded in the report.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "assouad/parallel.hpp"
#include "assouad/spectrum.hpp"

namespace assouad {

enum class Spacing { uniform, geometric_near_endpoints };

struct GridSpec {
  int n_theta = 200;
  Spacing spacing = Spacing::uniform;
  double tolerance = kDefaultTolerance;

  void validate() const {
    if (n_theta < 2) throw std::invalid_argument("GridSpec: n_theta must be >= 2");
    if (!(tolerance > 0)) throw std::invalid_argument("GridSpec: tolerance must be > 0");
  }
};

/// Number of geometric refinement levels 2^-j, 1 - 2^-j added near the ends.
inline constexpr int kGeometricLevels = 30;

/// Interior grid points in (0,1), strictly increasing.
inline std::vector<double> theta_grid(const GridSpec& g) {
  g.validate();
  if (g.spacing == Spacing::uniform) {
    std::vector<double> pts(static_cast<std::size_t>(g.n_theta));
    for (int i = 0; i < g.n_theta; ++i) pts[static_cast<std::size_t>(i)] = static_cast<double>(i + 1) / (g.n_theta + 1);
    return pts;
  }
  return probe_grid(g.n_theta, kGeometricLevels);
}

struct CheckResult {
  std::string name;
  double worst_violation = 0.0;  // >= 0, or the measured quantity for bound-style checks
  std::vector<double> witness;   // location of the worst excess (e.g. {lambda, theta})
  double tolerance = kDefaultTolerance;
  std::string note;

  bool passed() const { return worst_violation <= tolerance; }
};

struct ValidationReport {
  bool passed = true;
  bool abstained = false;  // the check declined to give an A_d verdict
  std::vector<CheckResult> checks;
  std::optional<GridSpec> grid;
  std::vector<double> ladder;  // finite ladder replacing a limit, when one was used

  void add(CheckResult c) {
    passed = passed && c.passed();
    checks.push_back(std::move(c));
  }

  const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks)
      if (c.name == name) return &c;
    return nullptr;
  }

  void merge(const ValidationReport& other) {
    for (const auto& c : other.checks) add(c);
    passed = passed && other.passed;
  }
};

namespace detail {

/// Tracks the largest signed excess; ties keep the first offer.
struct WorstExcess {
  double excess = -std::numeric_limits<double>::infinity();
  std::vector<double> witness;

  void offer(double e, std::vector<double> w) {
    if (e > excess) {
      excess = e;
      witness = std::move(w);
    }
  }
  void absorb(const WorstExcess& other) { offer(other.excess, other.witness); }

  CheckResult result(std::string name, double tol, std::string note = {}) const {
    CheckResult c;
    c.name = std::move(name);
    c.worst_violation = std::max(0.0, excess);
    c.witness = witness;
    c.tolerance = tol;
    c.note = std::move(note);
    return c;
  }
};

}  // namespace detail

/// Membership in A_d over all grid pairs lambda < theta.
inline ValidationReport check_Ad(const SpectrumFn& f, const GridSpec& grid) {
  const std::vector<double> pts = theta_grid(grid);
  const std::size_t n = pts.size();
  const double d = f.dim().real();
  std::vector<double> beta(n), phi(n);
  for (std::size_t i = 0; i < n; ++i) {
    phi[i] = f.phi(pts[i]);
    beta[i] = f.beta(pts[i]);
  }

  detail::WorstExcess range;
  for (std::size_t i = 0; i < n; ++i) range.offer(std::max(-phi[i], phi[i] - d), {pts[i]});

  std::vector<detail::WorstExcess> left_rows(n), right_rows(n);
  parallel_for(n, [&](std::size_t i) {
    const double lam = pts[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      const double th = pts[j];
      const double drop = beta[i] - beta[j];
      left_rows[i].offer(-drop, {lam, th});
      right_rows[i].offer(drop - (th - lam) * f.phi(lam / th), {lam, th});
    }
  });
  detail::WorstExcess left, right;
  for (std::size_t i = 0; i < n; ++i) {
    left.absorb(left_rows[i]);
    right.absorb(right_rows[i]);
  }

  ValidationReport r;
  r.grid = grid;
  r.add(range.result("range", grid.tolerance, "0 <= phi <= d"));
  r.add(left.result("beta_decreasing", grid.tolerance, "(1-l)phi(l) - (1-t)phi(t) >= 0"));
  r.add(right.result("secant_bound", grid.tolerance, "(1-l)phi(l) - (1-t)phi(t) <= (t-l)phi(l/t)"));
  return r;
}

struct SecantSlopes {
  double chord;  // -(slope of beta between lambda and theta)
  double tail;   // -(slope of the line from (lambda/theta, beta(lambda/theta)) to (1, 0))
};

/// The two secant slopes compared by the upper admissibility inequality.
inline SecantSlopes secant_slopes(const SpectrumFn& f, double lambda, double theta) {
  if (!(0.0 < lambda && lambda < theta && theta < 1.0))
    throw std::domain_error("secant_slopes: need 0 < lambda < theta < 1");
  const double r = lambda / theta;
  return {(f.beta(lambda) - f.beta(theta)) / (theta - lambda), f.beta(r) / (1.0 - r)};
}

/// The upper inequality in secant-slope form; agrees with check_Ad's
/// "secant_bound" on every pair up to the factor (theta - lambda).
inline ValidationReport check_secant_form(const SpectrumFn& f, const GridSpec& grid) {
  const std::vector<double> pts = theta_grid(grid);
  detail::WorstExcess worst;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const auto s = secant_slopes(f, pts[i], pts[j]);
      worst.offer(s.chord - s.tail, {pts[i], pts[j]});
    }
  ValidationReport r;
  r.grid = grid;
  r.add(worst.result("secant_slopes", grid.tolerance));
  return r;
}

/// phi(theta) <= phi(theta^{1/n}) for n = 1..n_max.
inline ValidationReport check_nth_root(const SpectrumFn& f, double theta, int n_max,
                                       double tol = kDefaultTolerance) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("check_nth_root: theta must lie in (0,1)");
  if (n_max < 1) throw std::invalid_argument("check_nth_root: n_max must be >= 1");
  const double base = f.phi(theta);
  detail::WorstExcess worst;
  for (int n = 1; n <= n_max; ++n) worst.offer(base - f.phi(std::pow(theta, 1.0 / n)), {theta, static_cast<double>(n)});
  ValidationReport r;
  r.add(worst.result("nth_root", tol, "witness = {theta, n}"));
  return r;
}

inline constexpr int kDiniLadderPoints = 9;

/// Geometric ladder of kDiniLadderPoints step sizes spanning [h_min, 100 h_min].
inline std::vector<double> dini_ladder(double h_min) {
  std::vector<double> eps(kDiniLadderPoints);
  for (int k = 0; k < kDiniLadderPoints; ++k)
    eps[static_cast<std::size_t>(k)] = h_min * std::pow(10.0, 2.0 * k / (kDiniLadderPoints - 1));
  return eps;
}

/// Finite-depth proxy for the upper right Dini derivative: the largest forward
/// difference quotient over dini_ladder(h_min).
inline double dini_plus(const SpectrumFn& f, double theta, double h_min) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("dini_plus: theta must lie in (0,1)");
  if (!(h_min > 0.0)) throw std::domain_error("dini_plus: h_min must be > 0");
  if (theta + 100.0 * h_min >= 1.0) throw std::domain_error("dini_plus: ladder leaves (0,1)");
  const double base = f.phi(theta);
  double best = -std::numeric_limits<double>::infinity();
  for (double eps : dini_ladder(h_min)) best = std::max(best, (f.phi(theta + eps) - base) / eps);
  return best;
}

/// Rate checks stop this far from 1; the Dini ladder needs room to the right.
inline constexpr double kRateMargin = 1e-3;
inline constexpr double kRateStep = 1e-6;

namespace detail {

inline std::vector<double> rate_points(const GridSpec& grid) {
  std::vector<double> pts;
  for (double t : theta_grid(grid))
    if (1.0 - t >= kRateMargin) pts.push_back(t);
  return pts;
}

/// Upper rate bound at finite step: each quotient q(eps) is compared with
/// phi(theta+eps)/(1-theta). The identity
///   (1-theta) q(eps) = [beta(theta+eps) - beta(theta)]/eps + phi(theta+eps)
/// makes this exactly "beta does not increase", and it tends to
/// D+phi <= phi/(1-theta) as eps -> 0.
inline WorstExcess dini_upper_excess(const SpectrumFn& f, const std::vector<double>& pts,
                                     const std::vector<double>& ladder) {
  WorstExcess worst;
  for (double th : pts) {
    const double base = f.phi(th);
    for (double eps : ladder) {
      const double ahead = f.phi(th + eps);
      const double q = (ahead - base) / eps;
      worst.offer(q - ahead / (1.0 - th), {th, eps});
    }
  }
  return worst;
}

}  // namespace detail

/// Dini rate bounds -(phi(1)-phi)/(1-theta) <= D+phi <= phi/(1-theta) and the
/// uniform Lipschitz bound d/delta on [0, 1-delta] for delta in {0.1, 0.25}.
///
/// The lower bound is compared at finite step against
/// (phi(theta+eps) - phi(theta/(theta+eps)))/(1-theta), which follows from the
/// upper admissibility inequality at the pair (theta, theta+eps) and tends to the
/// stated bound as eps -> 0.
inline ValidationReport check_rate_bounds(const SpectrumFn& f, const GridSpec& grid) {
  const std::vector<double> pts = detail::rate_points(grid);
  const std::vector<double> ladder = dini_ladder(kRateStep);
  ValidationReport r;
  r.grid = grid;
  r.ladder = ladder;

  r.add(detail::dini_upper_excess(f, pts, ladder).result("dini_upper", grid.tolerance,
                                                          "D+phi <= phi/(1-theta), theta <= 1-1e-3"));

  detail::WorstExcess lower;
  for (double th : pts) {
    const double base = f.phi(th);
    for (double eps : ladder) {
      const double ahead = f.phi(th + eps);
      const double q = (ahead - base) / eps;
      const double bound = (ahead - f.phi(th / (th + eps))) / (1.0 - th);
      lower.offer(bound - q, {th, eps});
    }
  }
  r.add(lower.result("dini_lower", grid.tolerance, "D+phi >= -(phi(1)-phi)/(1-theta), theta <= 1-1e-3"));

  const double d = f.dim().real();
  for (double delta : {0.1, 0.25}) {
    std::vector<double> xs{0.0};
    for (double t : theta_grid(grid))
      if (t < 1.0 - delta) xs.push_back(t);
    xs.push_back(1.0 - delta);
    detail::WorstExcess lip;
    const double L = d / delta;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double dv = std::abs(f.phi_closed(xs[i + 1]) - f.phi_closed(xs[i]));
      lip.offer(dv - L * (xs[i + 1] - xs[i]), {xs[i], xs[i + 1]});
    }
    r.add(lip.result(delta == 0.1 ? "lipschitz_delta_0.1" : "lipschitz_delta_0.25", grid.tolerance,
                     "|phi(a)-phi(b)| <= (d/delta)|a-b| on [0,1-delta]"));
  }
  return r;
}

namespace detail {

inline WorstExcess increasing_excess(const SpectrumFn& f, const std::vector<double>& xs) {
  WorstExcess w;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    w.offer(f.phi_closed(xs[i]) - f.phi_closed(xs[i + 1]), {xs[i], xs[i + 1]});
  return w;
}

inline WorstExcess beta_decreasing_excess(const SpectrumFn& f, const std::vector<double>& xs) {
  WorstExcess w;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) w.offer(f.beta(xs[i + 1]) - f.beta(xs[i]), {xs[i], xs[i + 1]});
  return w;
}

inline std::vector<double> closed_grid(const GridSpec& grid) {
  std::vector<double> xs{0.0};
  for (double t : theta_grid(grid)) xs.push_back(t);
  xs.push_back(1.0);
  return xs;
}

}  // namespace detail

/// For increasing phi, membership in A_d reduces to D+phi <= phi/(1-theta).
/// Abstains (passed = false, abstained = true) when phi is not increasing; for
/// increasing input the verdict is cross-checked against check_Ad.
inline ValidationReport check_increasing_Ad(const SpectrumFn& f, const GridSpec& grid) {
  ValidationReport r;
  r.grid = grid;
  const auto inc = detail::increasing_excess(f, detail::closed_grid(grid));
  r.add(inc.result("increasing", grid.tolerance));
  if (!r.passed) {
    r.abstained = true;
    return r;
  }
  const std::vector<double> ladder = dini_ladder(kRateStep);
  r.ladder = ladder;
  const CheckResult dini = detail::dini_upper_excess(f, detail::rate_points(grid), ladder)
                               .result("dini_upper", grid.tolerance, "D+phi <= phi/(1-theta), theta <= 1-1e-3");
  const bool own_verdict = dini.passed();
  r.add(dini);
  const bool ad_verdict = check_Ad(f, grid).passed;
  CheckResult agree;
  agree.name = "agrees_with_check_Ad";
  agree.worst_violation = own_verdict == ad_verdict ? 0.0 : 1.0;
  agree.tolerance = 0.5;
  agree.witness = {ad_verdict ? 1.0 : 0.0, own_verdict ? 1.0 : 0.0};
  agree.note = "witness = {check_Ad verdict, Dini verdict}";
  r.add(agree);
  return r;
}

/// Attainable upper spectra: phi increasing and beta decreasing.
inline ValidationReport check_upper_form(const SpectrumFn& f, const GridSpec& grid) {
  const auto xs = detail::closed_grid(grid);
  ValidationReport r;
  r.grid = grid;
  r.add(detail::increasing_excess(f, xs).result("increasing", grid.tolerance));
  r.add(detail::beta_decreasing_excess(f, xs).result("beta_decreasing", grid.tolerance));
  return r;
}

/// Finite proxies of two structural properties of A_d:
///  - once phi reaches phi(1) it stays there (within 10 tol);
///  - phi(0) = 0 forces phi = 0 (within C tol, C = 1 + 1/(1 - max grid point)).
inline ValidationReport check_limit_properties(const SpectrumFn& f, const GridSpec& grid) {
  const std::vector<double> pts = theta_grid(grid);
  const double tol = grid.tolerance;
  const double phi1 = f.phi_closed(1.0);
  ValidationReport r;
  r.grid = grid;

  CheckResult plateau{"plateau_after_max", 0.0, {}, 10.0 * tol, "max |phi(t)-phi(t0)| for t > t0 once phi(t0) >= phi(1)-tol"};
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double v0 = f.phi(pts[i]);
    if (v0 < phi1 - tol) continue;
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      const double dv = std::abs(f.phi(pts[j]) - v0);
      if (dv > plateau.worst_violation) {
        plateau.worst_violation = dv;
        plateau.witness = {pts[i], pts[j]};
      }
    }
    break;
  }
  r.add(plateau);

  const double C = 1.0 + 1.0 / (1.0 - pts.back());
  CheckResult vanish{"zero_at_zero_forces_zero", 0.0, {}, C * tol, "max phi on grid when phi(0) <= tol"};
  if (f.phi_closed(0.0) <= tol) {
    for (double t : pts) {
      const double v = f.phi(t);
      if (v > vanish.worst_violation) {
        vanish.worst_violation = v;
        vanish.witness = {t};
      }
    }
  }
  r.add(vanish);
  return r;
}

}  // namespace assouad
