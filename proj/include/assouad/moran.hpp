#pragma once

// Homogeneous Moran sets in [0,1]^d. Level k consists of 2^{dk} cubes of side
// rho_k = r_1 ... r_k placed by the corner maps x -> r x + b, b in {0, 1-r}^d.
// Schedules store t_k = -log(rho_k) so that deep levels do not underflow.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "assouad/errors.hpp"
#include "assouad/growth.hpp"
#include "assouad/spectrum.hpp"
#include "assouad/validation.hpp"

namespace assouad {

inline constexpr double kLn2 = std::numbers::ln2;

class RatioSchedule {
 public:
  /// t must start at 0 and increase by at least log 2 per level.
  RatioSchedule(std::vector<double> t, AmbientDim d) : t_(std::move(t)), d_(d) {
    if (t_.empty() || t_.front() != 0.0) throw std::invalid_argument("RatioSchedule: t_0 must be 0");
    for (std::size_t k = 1; k < t_.size(); ++k)
      if (!(t_[k] - t_[k - 1] >= kLn2 * (1.0 - 1e-12)))
        throw std::invalid_argument("RatioSchedule: t_" + std::to_string(k) + " - t_" + std::to_string(k - 1) +
                                    " < log 2");
  }

  static RatioSchedule from_ratios(const std::vector<double>& r, AmbientDim d) {
    std::vector<double> t{0.0};
    for (double x : r) {
      if (!(x > 0.0 && x <= 0.5)) throw std::invalid_argument("RatioSchedule: ratios must lie in (0, 1/2]");
      t.push_back(t.back() - std::log(x));
    }
    return RatioSchedule(std::move(t), d);
  }

  static RatioSchedule constant(double r, int levels, AmbientDim d) {
    return from_ratios(std::vector<double>(static_cast<std::size_t>(levels), r), d);
  }

  int levels() const { return static_cast<int>(t_.size()) - 1; }
  double t(int k) const { return t_.at(static_cast<std::size_t>(k)); }
  double t_max() const { return t_.back(); }
  const std::vector<double>& ts() const { return t_; }
  AmbientDim dim() const { return d_; }
  /// r_k = exp(-(t_k - t_{k-1})), k >= 1.
  double r(int k) const { return std::exp(-(t(k) - t(k - 1))); }
  /// Side of a level-k cylinder.
  double side(int k) const { return std::exp(-t(k)); }

  /// k(delta) for delta = e^-u: the least k with t_k >= u. Values of u within
  /// relative 1e-14 of some t_k snap to that level.
  int level_at(double u) const {
    if (!(u >= 0.0)) throw std::domain_error("level_at: u must be >= 0");
    if (u > t_max() * (1.0 + 1e-14))
      throw RangeError("schedule: scale e^-" + std::to_string(u) + " below the materialized range (t_max = " +
                       std::to_string(t_max()) + ")");
    auto it = std::lower_bound(t_.begin(), t_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - t_.begin());
    if (k == t_.size()) k = t_.size() - 1;
    if (k > 0 && u - t_[k - 1] <= 1e-14 * u) --k;
    return static_cast<int>(k);
  }

  /// Level count with linear interpolation in u between consecutive t_k.
  double level_interp(double u) const {
    const int k = level_at(u);
    if (k == 0) return 0.0;
    const double a = t_[static_cast<std::size_t>(k - 1)], b = t_[static_cast<std::size_t>(k)];
    return (k - 1) + std::clamp((u - a) / (b - a), 0.0, 1.0);
  }

 private:
  std::vector<double> t_;
  AmbientDim d_;
};

/// s at scale delta = e^-u: k(delta) d log 2 / u.
inline double s_of_u(const RatioSchedule& s, double u) {
  if (!(u > 0.0)) throw std::domain_error("s: delta must lie in (0,1)");
  return s.level_at(u) * s.dim().real() * kLn2 / u;
}

inline double s_delta(const RatioSchedule& s, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("s_delta: delta must lie in (0,1)");
  return s_of_u(s, -std::log(delta));
}

/// Schedule whose level count follows g: t_k solves k d log 2 = g(log t) t, with
/// t_k - t_{k-1} >= log 2 enforced by clamping. g is extended to t < 1 by the
/// constant g(0). Levels are materialized while t_k <= e^{x_max}, plus one.
inline RatioSchedule schedule_from_g(const GrowthFn& g, double x_max, std::size_t cap = 1000000) {
  const AmbientDim dim = g.dim();
  const double step = dim.real() * kLn2;
  const double t_end = std::exp(x_max);
  if (std::log(t_end) > g.length()) throw RangeError("schedule_from_g: x_max beyond the growth function's range");
  const auto F = [&g](double t) { return g(std::clamp(std::log(t), 0.0, g.length())) * t; };

  std::vector<double> t{0.0};
  bool zero = true;
  for (const auto& p : g.pieces())
    zero = zero && p.kind == PieceKind::relax && p.a == 0.0 && p.b == 0.0;
  if (zero) {
    // g = 0: ratios min(1/2, 1/(k+1)).
    for (std::size_t k = 1; t.back() <= t_end; ++k) {
      if (k > cap) throw CapacityError("schedule_from_g: level cap reached");
      t.push_back(t.back() + std::log(std::max(2.0, static_cast<double>(k + 1))));
    }
    return RatioSchedule(std::move(t), dim);
  }

  for (std::size_t k = 1; t.back() <= t_end; ++k) {
    if (k > cap)
      throw CapacityError("schedule_from_g: level cap " + std::to_string(cap) + " reached at x = " +
                          std::to_string(std::log(t.back())) + " (requested x_max " + std::to_string(x_max) + ")");
    const double target = static_cast<double>(k) * step;
    const double lo = t.back() + kLn2;
    if (F(lo) >= target) {
      t.push_back(lo);
      continue;
    }
    double hi = 2.0 * lo;
    while (F(hi) < target) {
      hi *= 2.0;
      if (std::log(hi) > g.length())
        throw RangeError("schedule_from_g: level " + std::to_string(k) + " needs g beyond its materialized range");
    }
    const auto tol = [](double a, double b) { return b - a <= 4.0 * std::numeric_limits<double>::epsilon() * b; };
    const auto [a, b] = boost::math::tools::bisect([&](double x) { return F(x) - target; }, lo, hi, tol);
    t.push_back(b);
  }
  return RatioSchedule(std::move(t), dim);
}

/// |s(exp(-t_k)) - g(log t_k)| <= d log 2 exp(-log t_k) at every level k >= 1
/// (g extended to log t_k < 0 by g(0)).
inline ValidationReport check_discretization(const RatioSchedule& s, const GrowthFn& g,
                                             double tol = kDefaultTolerance) {
  detail::WorstExcess worst;
  const double dl = s.dim().real() * kLn2;
  for (int k = 1; k <= s.levels(); ++k) {
    const double tk = s.t(k);
    const double x = std::log(tk);
    if (x > g.length()) break;
    const double sk = k * dl / tk;
    worst.offer(std::abs(sk - g(std::max(0.0, x))) - dl / tk, {static_cast<double>(k), tk});
  }
  ValidationReport r;
  r.add(worst.result("discretization", tol, "witness = {k, t_k}"));
  return r;
}

/// Finite-depth proxy for the limsup of (s(delta^{1/theta}) - theta s(delta))/(1 - theta)
/// over a geometric mesh of delta in [delta_min, delta_min^0.1], given through
/// u_max = -log(delta_min). With interpolate = true the level count is
/// interpolated linearly between consecutive t_k, removing the integer
/// quantization of k(delta).
inline LimsupEstimate spectrum_from_schedule(const RatioSchedule& s, double theta, double u_max, int mesh = 200,
                                             bool interpolate = true) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("spectrum_from_schedule: theta must lie in (0,1)");
  if (mesh < 2) throw std::invalid_argument("spectrum_from_schedule: mesh must be >= 2");
  if (u_max / theta > s.t_max() * (1.0 + 1e-14))
    throw RangeError("spectrum_from_schedule: delta_min^{1/theta} below the materialized range");
  const double dl = s.dim().real() * kLn2;
  const auto sval = [&](double u) { return (interpolate ? s.level_interp(u) : s.level_at(u)) * dl / u; };
  const double u_min = 0.1 * u_max;
  const double ratio = std::log(u_max / u_min) / (mesh - 1);
  const auto u_at = [&](double i) { return i >= mesh - 1 ? u_max : u_min * std::exp(ratio * i); };
  LimsupEstimate e = detail::sweep_max(0.0, static_cast<double>(mesh - 1), 1.0, [&](double i) {
    const double u = u_at(i);
    return (sval(std::min(u / theta, s.t_max())) - theta * sval(u)) / (1.0 - theta);
  });
  e.argmax = u_at(e.argmax);  // reported as u = -log(delta)
  return e;
}

inline LimsupEstimate spectrum_from_schedule_delta(const RatioSchedule& s, double theta, double delta_min,
                                                   int mesh = 200, bool interpolate = true) {
  if (!(delta_min > 0.0 && delta_min < 1.0)) throw std::domain_error("delta_min must lie in (0,1)");
  return spectrum_from_schedule(s, theta, -std::log(delta_min), mesh, interpolate);
}

/// Level-k cylinder: digits in [0, 2^d), bit j of a digit selects the offset
/// along axis j.
struct CylinderAddress {
  int level = 0;
  std::vector<std::uint32_t> digits;
};

/// Corner (minimal point) of a cylinder.
inline std::vector<double> corner(const RatioSchedule& s, const CylinderAddress& a) {
  if (static_cast<int>(a.digits.size()) != a.level) throw std::invalid_argument("address: digit count != level");
  if (a.level > s.levels()) throw RangeError("address deeper than the schedule");
  const int d = s.dim().value();
  std::vector<double> x(static_cast<std::size_t>(d), 0.0);
  for (int i = 1; i <= a.level; ++i) {
    const std::uint32_t dig = a.digits[static_cast<std::size_t>(i - 1)];
    if (dig >= (1u << d)) throw std::invalid_argument("address: digit out of range");
    const double off = (1.0 - s.r(i)) * s.side(i - 1);
    for (int j = 0; j < d; ++j)
      if (dig >> j & 1u) x[static_cast<std::size_t>(j)] += off;
  }
  return x;
}

struct CoverCount {
  double geometric;   // N
  double prediction;  // 2^{d (k(delta') - k(delta))}
  double delta;
  double delta_prime;
  int k_delta;
  int k_delta_prime;
  std::vector<double> center;
};

inline constexpr std::size_t kCylinderCap = 1000000;

namespace detail {

/// Level-k cylinder intervals of the 1-d projection meeting [lo, hi].
inline void collect_1d(const RatioSchedule& s, int k, double lo, double hi, int level, double left,
                       std::vector<std::pair<double, double>>& out) {
  const double side = s.side(level);
  if (left > hi || left + side < lo) return;
  if (level == k) {
    if (out.size() >= kCylinderCap) throw CapacityError("covering_count: more than 1e6 cylinders in the ball");
    out.emplace_back(left, left + side);
    return;
  }
  const double off = (1.0 - s.r(level + 1)) * side;
  collect_1d(s, k, lo, hi, level + 1, left, out);
  collect_1d(s, k, lo, hi, level + 1, left + off, out);
}

/// Minimal number of closed intervals of length len covering the union of the
/// given intervals (sorted by left end), each clipped to [lo, hi].
inline std::size_t greedy_cover(std::vector<std::pair<double, double>> iv, double lo, double hi, double len) {
  std::sort(iv.begin(), iv.end());
  std::size_t n = 0;
  double reach = -std::numeric_limits<double>::infinity();
  for (auto [a, b] : iv) {
    a = std::max(a, lo);
    b = std::min(b, hi);
    if (a > b) continue;
    if (b <= reach) continue;
    double start = std::max(a, reach);
    // Intervals are closed: a point at exactly `reach` is already covered.
    if (start == reach && start == b) continue;
    if (a > reach) start = a;
    while (reach < b) {
      ++n;
      reach = start + len;
      start = reach;
    }
  }
  return n;
}

}  // namespace detail

/// Geometric covering count of the level-k(delta') part of the set inside the
/// ball of radius delta (max metric) around the corner of `center`, by
/// intervals (cubes) of side 2 delta'. In d > 1 the count is the product of the
/// per-axis counts; for Euclidean balls multiply by at most ceil(sqrt(d))^d.
inline CoverCount covering_count(const RatioSchedule& s, const CylinderAddress& center, double delta,
                                 double delta_prime) {
  if (!(delta > 0.0 && delta < 1.0 && delta_prime > 0.0 && delta_prime <= delta))
    throw std::invalid_argument("covering_count: need 0 < delta' <= delta < 1");
  const int d = s.dim().value();
  const std::vector<double> x = corner(s, center);
  const int kd = s.level_at(-std::log(delta));
  const int kp = s.level_at(-std::log(delta_prime));
  double total = 1.0;
  for (int j = 0; j < d; ++j) {
    const double c = x[static_cast<std::size_t>(j)];
    std::vector<std::pair<double, double>> iv;
    detail::collect_1d(s, kp, c - delta, c + delta, 0, 0.0, iv);
    total *= static_cast<double>(detail::greedy_cover(std::move(iv), c - delta, c + delta, 2.0 * delta_prime));
  }
  return {total, std::pow(2.0, d * (kp - kd)), delta, delta_prime, kd, kp, x};
}

/// Corners of the level-`level` cylinders in lexicographic order (first
/// coordinate major). With subsample, every stride-th point of that order is
/// kept so that at most max_points remain.
inline std::vector<std::vector<double>> sample_points(const RatioSchedule& s, int level, std::size_t max_points,
                                                     bool subsample = false) {
  if (level < 0 || level > s.levels()) throw RangeError("sample_points: level outside the schedule");
  const int d = s.dim().value();
  const double count = std::pow(2.0, static_cast<double>(d) * level);
  if (count > static_cast<double>(max_points) && !subsample)
    throw CapacityError("sample_points: 2^(d level) = " + std::to_string(count) + " exceeds max_points");
  if (count > 1e12) throw CapacityError("sample_points: level too deep to enumerate");
  std::vector<double> axis{0.0};
  for (int i = 1; i <= level; ++i) {
    const double off = (1.0 - s.r(i)) * s.side(i - 1);
    std::vector<double> next;
    next.reserve(axis.size() * 2);
    for (double a : axis) next.push_back(a);
    for (double a : axis) next.push_back(a + off);
    std::sort(next.begin(), next.end());
    axis = std::move(next);
  }
  const std::uint64_t m = axis.size();
  std::uint64_t total = 1;
  for (int j = 0; j < d; ++j) total *= m;
  const std::uint64_t stride =
      total > max_points ? (total + max_points - 1) / std::max<std::uint64_t>(1, max_points) : 1;
  std::vector<std::vector<double>> pts;
  for (std::uint64_t idx = 0; idx < total; idx += stride) {
    std::vector<double> p(static_cast<std::size_t>(d));
    std::uint64_t rest = idx;
    for (int j = d - 1; j >= 0; --j) {
      p[static_cast<std::size_t>(j)] = axis[rest % m];
      rest /= m;
    }
    pts.push_back(std::move(p));
  }
  return pts;
}

}  // namespace assouad
