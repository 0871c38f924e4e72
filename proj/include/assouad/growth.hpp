#pragma once

// Logarithmic-scale machinery. A spectrum phi becomes xi(y) = beta(e^-y); growth
// functions g : (0, L] -> [0, d] are concatenations of explicit pieces, and the
// spectrum of the associated Moran set is read off g through
//
//   (g(x + log(1/theta)) - theta g(x)) / (1 - theta).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "assouad/errors.hpp"
#include "assouad/parallel.hpp"
#include "assouad/spectrum.hpp"
#include "assouad/validation.hpp"

namespace assouad {

/// xi(y) = (1 - e^-y) phi(e^-y) = beta(e^-y) for y > 0.
class XiFn {
 public:
  explicit XiFn(SpectrumFn f) : f_(std::move(f)) {}

  double operator()(double y) const {
    if (!(y > 0.0)) throw std::domain_error("xi: y must be > 0");
    return eval(y);
  }
  /// Same on [0, inf), with xi(0) = beta(1) = 0.
  double eval(double y) const { return f_.beta(std::exp(-y)); }
  const SpectrumFn& spectrum() const { return f_; }

 private:
  SpectrumFn f_;
};

inline XiFn xi_from_phi(const SpectrumFn& f) { return XiFn(f); }

/// 0 <= xi(y2) - xi(y1) <= e^-y1 xi(y2 - y1) over all pairs y1 < y2 of samples.
inline ValidationReport check_xi_props(const XiFn& xi, const std::vector<double>& samples,
                                       double tol = kDefaultTolerance) {
  std::vector<double> ys = samples;
  std::sort(ys.begin(), ys.end());
  detail::WorstExcess lower, upper;
  for (std::size_t i = 0; i < ys.size(); ++i)
    for (std::size_t j = i + 1; j < ys.size(); ++j) {
      const double y1 = ys[i], y2 = ys[j];
      if (!(y2 > y1)) continue;
      const double inc = xi(y2) - xi(y1);
      lower.offer(-inc, {y1, y2});
      upper.offer(inc - std::exp(-y1) * xi(y2 - y1), {y1, y2});
    }
  ValidationReport r;
  r.add(lower.result("xi_increasing", tol));
  r.add(upper.result("xi_increment_bound", tol, "xi(y2)-xi(y1) <= e^-y1 xi(y2-y1)"));
  return r;
}

enum class PieceKind { xi, decay, relax, table };

inline const char* to_string(PieceKind k) {
  switch (k) {
    case PieceKind::xi: return "xi";
    case PieceKind::decay: return "decay";
    case PieceKind::relax: return "relax";
    case PieceKind::table: return "table";
  }
  return "?";
}

/// One concatenation block, evaluated in local coordinates y in [0, length]:
///   xi:    xi(y) + e^-y z            (a = z)
///   decay: w e^-y                    (a = w)
///   relax: alpha - (alpha - q) e^-y  (a = alpha, b = q); relax(s, s) is constant s
///   table: linear interpolation of (xs, ys), xs starting at 0 and ending at length
struct Piece {
  PieceKind kind;
  double length;
  double a = 0.0;
  double b = 0.0;
  std::vector<double> xs{};
  std::vector<double> ys{};

  static Piece xi(double length, double z) { return {PieceKind::xi, length, z}; }
  static Piece decay(double length, double w) { return {PieceKind::decay, length, w}; }
  static Piece relax(double length, double alpha, double q) { return {PieceKind::relax, length, alpha, q}; }
  static Piece constant(double length, double s) { return relax(length, s, s); }
  static Piece table(std::vector<double> xs, std::vector<double> ys) {
    if (xs.size() < 2 || xs.size() != ys.size() || xs.front() != 0.0)
      throw std::invalid_argument("table piece: need >= 2 points starting at 0");
    const double len = xs.back();
    return {PieceKind::table, len, 0.0, 0.0, std::move(xs), std::move(ys)};
  }
};

struct BlockIndex {
  int n;
  double x_n;  // start of the n-th xi block
};

/// Junction tolerance of concatenate().
inline constexpr double kJunctionTolerance = 1e-9;

/// Concatenation of pieces on (0, L], L = total length. Immutable.
class GrowthFn {
 public:
  GrowthFn(std::vector<Piece> pieces, std::optional<XiFn> xi, AmbientDim d)
      : pieces_(std::move(pieces)), xi_(std::move(xi)), d_(d) {
    if (pieces_.empty()) throw std::invalid_argument("GrowthFn: no pieces");
    starts_.reserve(pieces_.size() + 1);
    double x = 0.0;
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
      const Piece& p = pieces_[i];
      if (!(p.length > 0.0)) throw std::invalid_argument("GrowthFn: piece " + std::to_string(i) + " has length <= 0");
      if (p.kind == PieceKind::xi && !xi_) throw std::invalid_argument("GrowthFn: xi piece without a base spectrum");
      starts_.push_back(x);
      x += p.length;
    }
    starts_.push_back(x);
    for (std::size_t i = 0; i + 1 < pieces_.size(); ++i) {
      const double left = local(i, pieces_[i].length);
      const double right = local(i + 1, 0.0);
      if (std::abs(left - right) > kJunctionTolerance)
        throw ConstructionError("concatenate: junction " + std::to_string(i) + " mismatch " + std::to_string(left) +
                                " vs " + std::to_string(right));
    }
  }

  double length() const { return starts_.back(); }
  AmbientDim dim() const { return d_; }
  const std::vector<Piece>& pieces() const { return pieces_; }
  double piece_start(std::size_t i) const { return starts_.at(i); }
  const std::optional<XiFn>& xi() const { return xi_; }

  /// g(x) for x in [0, length]; junctions take the right piece (both sides agree).
  double operator()(double x) const {
    if (!(x >= 0.0 && x <= length()))
      throw RangeError("GrowthFn: x=" + std::to_string(x) + " outside [0, " + std::to_string(length()) + "]");
    const std::size_t i = locate(x);
    return local(i, std::min(x - starts_[i], pieces_[i].length));
  }

  /// Index of the piece containing x (the later piece at a junction).
  std::size_t locate(double x) const {
    auto it = std::upper_bound(starts_.begin(), starts_.end() - 1, x);
    const std::size_t i = static_cast<std::size_t>(it - starts_.begin());
    return i == 0 ? 0 : i - 1;
  }

  double local(std::size_t i, double y) const {
    const Piece& p = pieces_[i];
    switch (p.kind) {
      case PieceKind::xi: return xi_->eval(y) + std::exp(-y) * p.a;
      case PieceKind::decay: return p.a * std::exp(-y);
      case PieceKind::relax: return p.a - (p.a - p.b) * std::exp(-y);
      case PieceKind::table: return detail::interpolate(p.xs, p.ys, y);
    }
    return 0.0;
  }

 private:
  std::vector<Piece> pieces_;
  std::optional<XiFn> xi_;
  AmbientDim d_;
  std::vector<double> starts_;
};

inline GrowthFn concatenate(std::vector<Piece> pieces, AmbientDim d = AmbientDim(1),
                            std::optional<XiFn> xi = std::nullopt) {
  return GrowthFn(std::move(pieces), std::move(xi), d);
}

/// Output of build_g: the growth function plus its block layout.
struct BuiltG {
  GrowthFn g;
  double alpha;
  double z1;
  bool u_blocks;
  bool trivial_zero;  // target and alpha are 0; g = 0
  std::vector<BlockIndex> blocks;
  std::vector<double> w;  // w_n
  std::vector<double> z;  // z_n
  std::vector<double> q;  // q_n (u blocks only)
};

/// Layout (f_1, e_1, [u_1,] f_2, e_2, [u_2,] ...) with f_n = xi_{z_n} and
/// e_n = w_n e^-y on [0, n], and u_n = alpha - (alpha - q_n) e^-y on [0, 1/n]
/// when alpha > phi(1). Blocks are added until the total length reaches
/// min_length.
inline BuiltG build_g(const SpectrumFn& target, double alpha, std::optional<double> z1_opt = std::nullopt,
                      double min_length = 128.0) {
  const AmbientDim dim = target.dim();
  const double d = dim.real();
  const double phi1 = target.phi_closed(1.0);
  if (alpha < phi1 - kDefaultTolerance)
    throw std::invalid_argument("build_g: alpha=" + std::to_string(alpha) + " below phi(1)=" + std::to_string(phi1));
  if (alpha > d) throw std::invalid_argument("build_g: alpha exceeds d");
  if (!(min_length > 0.0)) throw std::invalid_argument("build_g: min_length must be > 0");

  if (alpha <= 0.0) {
    GrowthFn g({Piece::constant(min_length, 0.0)}, std::nullopt, dim);
    return {std::move(g), 0.0, 0.0, false, true, {}, {}, {}, {}};
  }
  const double z1 = z1_opt.value_or(alpha / 2.0);
  if (!(z1 > 0.0 && z1 < alpha)) throw std::invalid_argument("build_g: z1 must lie in (0, alpha)");
  const bool with_u = alpha > phi1 + kDefaultTolerance;

  const XiFn xi(target);
  std::vector<Piece> pieces;
  std::vector<BlockIndex> blocks;
  std::vector<double> ws, zs, qs;
  double x = 0.0, z = z1;
  for (int n = 1; x < min_length; ++n) {
    const double len = n;
    blocks.push_back({n, x});
    zs.push_back(z);
    pieces.push_back(Piece::xi(len, z));
    const double w = xi.eval(len) + std::exp(-len) * z;
    ws.push_back(w);
    pieces.push_back(Piece::decay(len, w));
    x += 2.0 * len;
    // q_n (and without u blocks z_{n+1}) from continuity at the end of e_n.
    const double end_e = pieces.back().a * std::exp(-len);
    if (with_u) {
      const double q = end_e;
      qs.push_back(q);
      const double ulen = 1.0 / n;
      pieces.push_back(Piece::relax(ulen, alpha, q));
      x += ulen;
      z = alpha - (alpha - q) * std::exp(-ulen);
    } else {
      z = end_e;
    }
  }
  GrowthFn g(std::move(pieces), xi, dim);
  return {std::move(g), alpha, z1, with_u, false, std::move(blocks), std::move(ws), std::move(zs), std::move(qs)};
}

/// lambda - (lambda - g(y)) e^-t <= g(y + t) <= alpha - (alpha - g(y)) e^-t on
/// n_pairs pseudo-random pairs (fixed seed) with 0 < y < y + t <= length.
inline ValidationReport check_G(const GrowthFn& g, double lambda, double alpha, int n_pairs = 10000,
                                double tol = kDefaultTolerance, std::uint64_t seed = 20240601) {
  if (!(lambda >= 0.0 && lambda <= alpha)) throw std::invalid_argument("check_G: need 0 <= lambda <= alpha");
  std::mt19937_64 rng(seed);
  const double L = g.length();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  detail::WorstExcess lower, upper;
  for (int i = 0; i < n_pairs; ++i) {
    const double y = L * unit(rng);
    // Half the pairs use short gaps, where the constraint is tight.
    const double span = L - y;
    const double t = (i % 2 == 0) ? span * unit(rng) : std::min(span, 0.05 * unit(rng));
    if (!(y > 0.0 && t > 0.0)) continue;
    const double gy = g(y), gyt = g(y + t), e = std::exp(-t);
    lower.offer((lambda - (lambda - gy) * e) - gyt, {y, t});
    upper.offer(gyt - (alpha - (alpha - gy) * e), {y, t});
  }
  ValidationReport r;
  r.add(lower.result("G_lower", tol, "lambda - (lambda - g(y)) e^-t <= g(y+t)"));
  r.add(upper.result("G_upper", tol, "g(y+t) <= alpha - (alpha - g(y)) e^-t"));
  return r;
}

struct LimsupEstimate {
  double value;     // max of the quotient over the sweep
  double argmax;    // x attaining it (first on ties)
  double tail_max;  // max over the last 20% of the sweep
};

namespace detail {

/// Max of q(x) over x = x_min + k step <= x_max, data-parallel with a
/// deterministic first-max reduction.
template <typename Q>
LimsupEstimate sweep_max(double x_min, double x_max, double step, Q&& q) {
  if (!(step > 0.0)) throw std::invalid_argument("sweep: step must be > 0");
  if (!(x_max >= x_min)) throw std::invalid_argument("sweep: x_max < x_min");
  const std::size_t n = static_cast<std::size_t>(std::floor((x_max - x_min) / step + 1e-9)) + 1;
  const std::size_t tail_from = n - std::max<std::size_t>(1, n / 5);
  const std::size_t chunks = std::min<std::size_t>(n, 64);
  struct Best {
    double v = -std::numeric_limits<double>::infinity();
    double x = 0.0;
    double tail = -std::numeric_limits<double>::infinity();
  };
  std::vector<Best> part(chunks);
  const std::size_t per = (n + chunks - 1) / chunks;
  parallel_for(chunks, [&](std::size_t c) {
    Best b;
    for (std::size_t k = c * per; k < std::min(n, (c + 1) * per); ++k) {
      const double x = x_min + static_cast<double>(k) * step;
      const double v = q(x);
      if (v > b.v) {
        b.v = v;
        b.x = x;
      }
      if (k >= tail_from) b.tail = std::max(b.tail, v);
    }
    part[c] = b;
  });
  Best out;
  for (const auto& b : part) {
    if (b.v > out.v) {
      out.v = b.v;
      out.x = b.x;
    }
    out.tail = std::max(out.tail, b.tail);
  }
  return {out.v, out.x, out.tail};
}

}  // namespace detail

/// (g(x + tau) - theta g(x)) / (1 - theta), tau = log(1/theta).
inline double g_quotient(const GrowthFn& g, double theta, double x) {
  const double tau = -std::log(theta);
  return (g(x + tau) - theta * g(x)) / (1.0 - theta);
}

/// Finite-depth proxy for the limsup of g_quotient over x in
/// {x_min, x_min + step, ..., <= x_max}; x_min defaults to step.
inline LimsupEstimate spectrum_from_g(const GrowthFn& g, double theta, double x_max, double step = 0.01,
                                      std::optional<double> x_min = std::nullopt) {
  if (!(theta > 0.0 && theta < 1.0)) throw std::domain_error("spectrum_from_g: theta must lie in (0,1)");
  const double tau = -std::log(theta);
  if (x_max + tau > g.length())
    throw RangeError("spectrum_from_g: x_max + log(1/theta) = " + std::to_string(x_max + tau) +
                     " exceeds the materialized length " + std::to_string(g.length()));
  return detail::sweep_max(x_min.value_or(step), x_max, step, [&](double x) { return g_quotient(g, theta, x); });
}

/// Default window grid for assouad_dim_from_g: 41 geometric values in [1e-3, 10].
inline std::vector<double> default_windows() {
  std::vector<double> w;
  for (int i = 0; i <= 40; ++i) w.push_back(1e-3 * std::pow(10.0, 4.0 * i / 40.0));
  return w;
}

/// max over x and window tau of (g(x + tau) - e^-tau g(x)) / (1 - e^-tau): the
/// two-scale quotient at every theta = e^-tau in the window grid.
inline LimsupEstimate assouad_dim_from_g(const GrowthFn& g, double x_max, const std::vector<double>& windows,
                                         double step = 0.01, std::optional<double> x_min = std::nullopt) {
  if (windows.empty()) throw std::invalid_argument("assouad_dim_from_g: empty window grid");
  const double wmax = *std::max_element(windows.begin(), windows.end());
  if (x_max + wmax > g.length()) throw RangeError("assouad_dim_from_g: window leaves the materialized range");
  return detail::sweep_max(x_min.value_or(step), x_max, step, [&](double x) {
    double best = -std::numeric_limits<double>::infinity();
    const double gx = g(x);
    for (double tau : windows) {
      const double e = std::exp(-tau);
      best = std::max(best, (g(x + tau) - e * gx) / (1.0 - e));
    }
    return best;
  });
}

}  // namespace assouad
