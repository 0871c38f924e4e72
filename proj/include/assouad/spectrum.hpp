#pragma once

// Candidate spectrum functions phi : [0,1] -> [0,d] and their beta-transform
// beta(theta) = (1 - theta) * phi(theta).
//
// The canonical representation is beta-form: every explicit family handled by
// this library is exactly piecewise linear in beta, and finite maxima of such
// functions stay piecewise linear. Division by (1 - theta) only happens at
// evaluation. Functions that are not piecewise linear in beta enter as tables of
// phi values with linear interpolation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace assouad {

inline constexpr double kDefaultTolerance = 1e-9;

/// Ambient Euclidean dimension d >= 1.
class AmbientDim {
 public:
  explicit AmbientDim(int d) : d_(d) {
    if (d < 1) throw std::invalid_argument("ambient dimension must be >= 1, got " + std::to_string(d));
  }
  int value() const { return d_; }
  double real() const { return static_cast<double>(d_); }
  friend bool operator==(AmbientDim, AmbientDim) = default;

 private:
  int d_;
};

namespace detail {

/// Value at x of the segment through (x0, y0) and (x1, y1). Exact at both ends.
inline double lerp(double x0, double x1, double y0, double y1, double x) {
  if (x == x0 || y0 == y1) return y0;
  if (x == x1) return y1;
  const double w = x1 - x0;
  // Weighted form keeps relative accuracy when x1 - x is tiny (theta near 1).
  return y0 * ((x1 - x) / w) + y1 * ((x - x0) / w);
}

/// Piecewise-linear interpolation on a strictly increasing abscissa list,
/// clamped outside.
inline double interpolate(std::span<const double> xs, std::span<const double> ys, double x) {
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs.begin());
  return lerp(xs[i - 1], xs[i], ys[i - 1], ys[i], x);
}

inline void require_abscissae(std::span<const double> xs, const char* what) {
  if (xs.size() < 2) throw std::invalid_argument(std::string(what) + ": need at least two points");
  if (xs.front() != 0.0 || xs.back() != 1.0)
    throw std::invalid_argument(std::string(what) + ": abscissae must start at 0 and end at 1");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1]))
      throw std::invalid_argument(std::string(what) + ": abscissae must be strictly increasing (index " +
                                  std::to_string(i) + ")");
  }
}

/// Sorted union of several abscissa lists with exact duplicates removed.
inline std::vector<double> merge_abscissae(const std::vector<std::span<const double>>& lists) {
  std::vector<double> out;
  for (auto l : lists) out.insert(out.end(), l.begin(), l.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

/// beta-form of a candidate spectrum: continuous, piecewise linear on [0,1].
///
/// Invariants: breakpoints start at 0, end at 1, strictly increasing;
/// 0 <= beta <= d (1 - theta) at every breakpoint (hence everywhere), so beta(1) = 0.
class BetaFn {
 public:
  BetaFn(std::vector<double> breakpoints, std::vector<double> values, AmbientDim d)
      : xs_(std::move(breakpoints)), ys_(std::move(values)), d_(d) {
    detail::require_abscissae(xs_, "BetaFn");
    if (ys_.size() != xs_.size()) throw std::invalid_argument("BetaFn: breakpoints/values size mismatch");
    for (std::size_t i = 0; i < ys_.size(); ++i) {
      const double bound = d_.real() * (1.0 - xs_[i]);
      if (!std::isfinite(ys_[i]) || ys_[i] < -kDefaultTolerance || ys_[i] > bound + kDefaultTolerance)
        throw std::invalid_argument("BetaFn: value " + std::to_string(ys_[i]) + " at theta=" +
                                    std::to_string(xs_[i]) + " outside [0, d(1-theta)]");
      ys_[i] = std::clamp(ys_[i], 0.0, bound);
    }
  }

  /// beta(theta) for theta in [0,1].
  double operator()(double theta) const {
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::domain_error("BetaFn: theta outside [0,1]");
    return detail::interpolate(xs_, ys_, theta);
  }

  /// phi(theta) = beta(theta)/(1-theta) on [0,1); at 1 the left limit, which is
  /// the negative slope of the last piece.
  double phi(double theta) const {
    if (theta >= 1.0) return phi_at_one();
    return (*this)(theta) / (1.0 - theta);
  }

  double phi_at_one() const {
    const std::size_t n = xs_.size();
    return ys_[n - 2] / (1.0 - xs_[n - 2]);
  }

  const std::vector<double>& breakpoints() const { return xs_; }
  const std::vector<double>& values() const { return ys_; }
  AmbientDim dim() const { return d_; }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  AmbientDim d_;
};

/// Tabulated phi-form: grid includes both endpoints; linear interpolation in phi.
struct TableForm {
  std::vector<double> grid;
  std::vector<double> values;
};

/// A candidate spectrum phi on [0,1], either exactly in beta-form or tabulated.
/// Immutable; safe to share across threads.
class SpectrumFn {
 public:
  explicit SpectrumFn(BetaFn beta) : form_(std::move(beta)), d_(std::get<BetaFn>(form_).dim()) {}

  static SpectrumFn tabulated(std::vector<double> grid, std::vector<double> phi_values, AmbientDim d) {
    detail::require_abscissae(grid, "tabulated spectrum");
    if (phi_values.size() != grid.size())
      throw std::invalid_argument("tabulated spectrum: grid/values size mismatch");
    for (std::size_t i = 0; i < phi_values.size(); ++i) {
      double& v = phi_values[i];
      if (!std::isfinite(v) || v < -kDefaultTolerance || v > d.real() + kDefaultTolerance)
        throw std::invalid_argument("tabulated spectrum: value " + std::to_string(v) + " at theta=" +
                                    std::to_string(grid[i]) + " outside [0, d]");
      v = std::clamp(v, 0.0, d.real());
    }
    return SpectrumFn(TableForm{std::move(grid), std::move(phi_values)}, d);
  }

  bool is_exact() const { return std::holds_alternative<BetaFn>(form_); }
  const BetaFn* exact() const { return std::get_if<BetaFn>(&form_); }
  const TableForm* table() const { return std::get_if<TableForm>(&form_); }
  AmbientDim dim() const { return d_; }

  /// phi on the open interval (0,1).
  double phi(double theta) const {
    if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("phi: theta must lie in (0,1)");
    return phi_closed(theta);
  }

  /// phi on [0,1], endpoints given by the one-sided limits.
  double phi_closed(double theta) const {
    if (!(theta >= 0.0 && theta <= 1.0)) throw std::domain_error("phi: theta must lie in [0,1]");
    if (const auto* b = exact()) return b->phi(theta);
    const auto& t = std::get<TableForm>(form_);
    return detail::interpolate(t.grid, t.values, theta);
  }

  /// beta(theta) = (1 - theta) phi(theta) on [0,1].
  double beta(double theta) const {
    if (const auto* b = exact()) return (*b)(theta);
    return (1.0 - theta) * phi_closed(theta);
  }

  /// Abscissae at which the representation changes slope.
  const std::vector<double>& knots() const {
    if (const auto* b = exact()) return b->breakpoints();
    return std::get<TableForm>(form_).grid;
  }

 private:
  SpectrumFn(TableForm t, AmbientDim d) : form_(std::move(t)), d_(d) {}

  std::variant<BetaFn, TableForm> form_;
  AmbientDim d_;
};

inline double eval_phi(const SpectrumFn& f, double theta) { return f.phi(theta); }

/// beta-form of f. Exact for beta-form input; for tables, beta is sampled on the
/// table grid (so phi_of(beta_of(f)) reproduces f at every grid point).
inline BetaFn beta_of(const SpectrumFn& f) {
  if (const auto* b = f.exact()) return *b;
  const auto& t = *f.table();
  std::vector<double> ys(t.grid.size());
  for (std::size_t i = 0; i < ys.size(); ++i) ys[i] = (1.0 - t.grid[i]) * t.values[i];
  return BetaFn(t.grid, std::move(ys), f.dim());
}

inline SpectrumFn phi_of(BetaFn b) { return SpectrumFn(std::move(b)); }

/// Samples f (endpoint limits included) on a grid that must span [0,1].
inline SpectrumFn tabulate(const SpectrumFn& f, std::vector<double> grid) {
  std::vector<double> vals(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = f.phi_closed(grid[i]);
  return SpectrumFn::tabulated(std::move(grid), std::move(vals), f.dim());
}

/// Interior sample points used for endpoint and oscillation probes: a uniform
/// grid plus geometric refinement 2^-j and 1 - 2^-j toward both ends.
inline std::vector<double> probe_grid(int uniform_points, int geometric_levels = 30) {
  std::vector<double> g;
  for (int i = 1; i <= uniform_points; ++i) g.push_back(static_cast<double>(i) / (uniform_points + 1));
  for (int j = 1; j <= geometric_levels; ++j) {
    g.push_back(std::ldexp(1.0, -j));
    g.push_back(1.0 - std::ldexp(1.0, -j));
  }
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

struct EndpointLimits {
  double phi0;
  double phi1;
};

/// Grid evidence that phi(0) is not the infimum or phi(1) not the supremum.
struct OscillationFailure {
  std::string message;
  double witness;
  double value;
};

/// phi(0) and phi(1) as one-sided limits, validated against the grid: for a
/// member of A_d the endpoint limits are the infimum and supremum of phi.
inline std::variant<EndpointLimits, OscillationFailure> endpoint_limits(const SpectrumFn& f, int grid_size,
                                                                        double tol = kDefaultTolerance) {
  const EndpointLimits lim{f.phi_closed(0.0), f.phi_closed(1.0)};
  for (double th : probe_grid(grid_size)) {
    const double v = f.phi_closed(th);
    if (v < lim.phi0 - tol)
      return OscillationFailure{"phi drops below its limit at 0 (limit is not the infimum)", th, v};
    if (v > lim.phi1 + tol)
      return OscillationFailure{"phi exceeds its limit at 1 (limit is not the supremum)", th, v};
  }
  return lim;
}

namespace detail {

/// Drops interior points lying on the segment through their neighbours.
inline void drop_collinear(std::vector<double>& xs, std::vector<double>& ys, double tol = 1e-14) {
  if (xs.size() < 3) return;
  std::vector<double> ox{xs.front()}, oy{ys.front()};
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    const double pred = lerp(ox.back(), xs[i + 1], oy.back(), ys[i + 1], xs[i]);
    if (std::abs(pred - ys[i]) > tol) {
      ox.push_back(xs[i]);
      oy.push_back(ys[i]);
    }
  }
  ox.push_back(xs.back());
  oy.push_back(ys.back());
  xs = std::move(ox);
  ys = std::move(oy);
}

}  // namespace detail

/// Exact pointwise maximum of piecewise-linear functions on [0,1]. Breakpoints of
/// the result are the union of the inputs' breakpoints and the segment crossings
/// that lie on the envelope.
inline BetaFn upper_envelope(std::span<const BetaFn> fs) {
  if (fs.empty()) throw std::invalid_argument("upper_envelope: empty input");
  const AmbientDim d = fs.front().dim();
  std::vector<std::span<const double>> lists;
  for (const auto& f : fs) {
    if (!(f.dim() == d)) throw std::invalid_argument("upper_envelope: mixed ambient dimensions");
    lists.emplace_back(f.breakpoints());
  }
  if (fs.size() == 1) return fs.front();
  const std::vector<double> xs = detail::merge_abscissae(lists);

  std::vector<double> ox, oy;
  std::vector<double> va(fs.size()), vb(fs.size());
  std::vector<double> cand;
  for (std::size_t s = 0; s + 1 < xs.size(); ++s) {
    const double a = xs[s], b = xs[s + 1];
    for (std::size_t i = 0; i < fs.size(); ++i) {
      va[i] = fs[i](a);
      vb[i] = fs[i](b);
    }
    cand.assign(1, a);
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (std::size_t j = i + 1; j < fs.size(); ++j) {
        const double da = va[i] - va[j];
        const double db = vb[i] - vb[j];
        if ((da > 0 && db < 0) || (da < 0 && db > 0)) {
          const double x = a + (b - a) * (da / (da - db));
          if (x > a && x < b) cand.push_back(x);
        }
      }
    }
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    for (double x : cand) {
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < fs.size(); ++i) m = std::max(m, detail::lerp(a, b, va[i], vb[i], x));
      ox.push_back(x);
      oy.push_back(m);
    }
  }
  double last = 0.0;
  for (const auto& f : fs) last = std::max(last, f(1.0));
  ox.push_back(1.0);
  oy.push_back(last);
  detail::drop_collinear(ox, oy);
  return BetaFn(std::move(ox), std::move(oy), d);
}

/// Pointwise supremum of spectra sharing an ambient dimension. Exact (beta-form)
/// when every input is exact; otherwise tabulated on the union of all knots.
inline SpectrumFn pointwise_sup(std::span<const SpectrumFn> fs) {
  if (fs.empty()) throw std::invalid_argument("pointwise_sup: empty list");
  const AmbientDim d = fs.front().dim();
  bool all_exact = true;
  for (const auto& f : fs) {
    if (!(f.dim() == d)) throw std::invalid_argument("pointwise_sup: mixed ambient dimensions");
    all_exact = all_exact && f.is_exact();
  }
  if (fs.size() == 1) return fs.front();
  if (all_exact) {
    std::vector<BetaFn> bs;
    bs.reserve(fs.size());
    for (const auto& f : fs) bs.push_back(*f.exact());
    return SpectrumFn(upper_envelope(bs));
  }
  std::vector<std::span<const double>> lists;
  for (const auto& f : fs) lists.emplace_back(f.knots());
  std::vector<double> grid = detail::merge_abscissae(lists);
  std::vector<double> vals(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i)
    for (const auto& f : fs) vals[i] = std::max(vals[i], f.phi_closed(grid[i]));
  return SpectrumFn::tabulated(std::move(grid), std::move(vals), d);
}

inline SpectrumFn pointwise_sup(std::initializer_list<SpectrumFn> fs) {
  return pointwise_sup(std::span<const SpectrumFn>(fs.begin(), fs.size()));
}

/// Running maximum phi_bar(theta) = sup_{theta' <= theta} phi(theta').
///
/// On a linear piece of beta, phi = beta/(1-theta) is monotone, and a constant
/// level M of phi is the line M(1-theta) in beta-form, so the running maximum of
/// an exact input is again exactly piecewise linear in beta.
inline SpectrumFn running_max(const SpectrumFn& f) {
  constexpr double kSlack = 1e-14;
  if (const auto* t = f.table()) {
    std::vector<double> vals = t->values;
    for (std::size_t i = 1; i < vals.size(); ++i) vals[i] = std::max(vals[i], vals[i - 1]);
    return SpectrumFn::tabulated(t->grid, std::move(vals), f.dim());
  }
  const BetaFn& b = *f.exact();
  const auto& xs = b.breakpoints();
  const auto& ys = b.values();
  const std::size_t n = xs.size();

  std::vector<double> ox{0.0}, oy{ys[0]};
  double level = ys[0];  // running max of phi so far
  for (std::size_t s = 0; s + 1 < n; ++s) {
    const double a = xs[s], c = xs[s + 1];
    const double pa = ys[s] / (1.0 - a);
    // phi is constant on the last piece because beta(1) = 0.
    const double pc = s + 2 == n ? pa : ys[s + 1] / (1.0 - c);
    const double slack = kSlack * std::max(1.0, level);
    if (pa >= level - slack && pc >= pa - slack) {
      // beta itself is on top throughout the piece.
      ox.push_back(c);
      oy.push_back(ys[s + 1]);
      level = std::max(level, pc);
      continue;
    }
    if (pc <= level + slack) {
      ox.push_back(c);
      oy.push_back(level * (1.0 - c));
      continue;
    }
    // phi increases through the level inside the piece.
    const double slope = (ys[s + 1] - ys[s]) / (c - a);
    const double cross = (level - ys[s] + slope * a) / (slope + level);
    if (cross > a && cross < c) {
      ox.push_back(cross);
      oy.push_back(level * (1.0 - cross));
    }
    ox.push_back(c);
    oy.push_back(ys[s + 1]);
    level = pc;
  }
  detail::drop_collinear(ox, oy);
  return SpectrumFn(BetaFn(std::move(ox), std::move(oy), f.dim()));
}

}  // namespace assouad
