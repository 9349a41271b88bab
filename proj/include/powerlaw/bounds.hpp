#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "powerlaw/layers.hpp"
#include "powerlaw/model.hpp"

namespace powerlaw {

/// Ratio of the near-1 constants, collapsed into one knob.
struct BoundConfig {
  double c_ratio = 1.0;
};

/// Largest v with 1 - exp(-v) >= v/2; the half-linearization step in the
/// neighborhood bound is only valid for volume ratios up to this value.
inline constexpr double kHalfLinearizationLimit = 1.5936242600400401;

/// Per-layer uplink probability bound, both forms.
struct LayerLinkBound {
  double exact = 0.0;       // 1 - exp(-N^{beta_j} V(U_{j-1}) / L_N)
  double simplified = 0.0;  // 1 - exp(-c_ratio e^l)
  bool empty_previous = false;
};

inline LayerLinkBound layer_link_bound(const LayerStructure& layers, int j,
                                       const BoundConfig& cfg = {}) {
  if (j < 1 || j > layers.depth())
    throw std::domain_error("layer index out of range");
  LayerLinkBound b;
  b.simplified = 1.0 - std::exp(-cfg.c_ratio * std::exp(layers.params.l_value));
  std::size_t ju = static_cast<std::size_t>(j);
  double volume_prev = layers.volumes[ju - 1];
  if (layers.cardinalities[ju - 1] == 0 || volume_prev <= 0.0) {
    b.empty_previous = true;
    b.exact = 0.0;
    return b;
  }
  double arg = layers.thresholds[ju] * volume_prev / layers.total_capacity;
  b.exact = -std::expm1(-arg);
  return b;
}

/// The exact uplink bound alone; 0 (flagged inside the struct variant) when
/// the feeding layer is empty.
inline double p_layer_bound(const LayerStructure& layers, int j,
                            const BoundConfig& cfg = {}) {
  return layer_link_bound(layers, j, cfg).exact;
}

/// p_0 = 1 - exp(-c_ratio e^{(3-tau) l}).
inline double p_zero(const ModelParams& p, const BoundConfig& cfg = {}) {
  return -std::expm1(-cfg.c_ratio * std::exp((3.0 - p.tau) * p.l_value));
}

/// ln s(x, l) with real-valued x, computed fully in log space:
///   ln s = (1 - (tau-2)^{x+1}/(tau-1)) ln N + x ln(1 - e^{-m}) - (tau-2) l,
/// where m = e^{(3-tau) l}.
inline double log_s_objective(std::int64_t n, double tau, double x, double l) {
  double log_n = std::log(static_cast<double>(n));
  double m = std::exp((3.0 - tau) * l);
  double exponent = 1.0 - std::pow(tau - 2.0, x + 1.0) / (tau - 1.0);
  return exponent * log_n + x * std::log1p(-std::exp(-m)) - (tau - 2.0) * l;
}

inline double s_objective(std::int64_t n, double tau, int x, double l) {
  if (x < 0) throw std::domain_error("x must be >= 0");
  if (!(l > 0.0)) throw std::domain_error("l must be > 0");
  return std::exp(log_s_objective(n, tau, static_cast<double>(x), l));
}

/// Real stationary point of ln s in x at fixed m, from d(ln s)/dx = 0:
///   x = ln ln N / q - ln((tau-1) Lm / q) / q - 1,
/// with q = -ln(tau-2) and Lm = -ln(1 - e^{-m}). Empty when the outer log
/// has no positive argument (no interior stationary point).
inline std::optional<double> stationary_x(std::int64_t n, double tau, double m) {
  if (!(m > 0.0)) throw std::domain_error("m must be > 0");
  if (n < 16) throw std::domain_error("stationary point requires N >= 16");
  double q = -std::log(tau - 2.0);
  double lm = -std::log1p(-std::exp(-m));
  double arg = (tau - 1.0) * lm / q;
  if (!(arg > 0.0) || !std::isfinite(arg)) return std::nullopt;
  double x = std::log(std::log(static_cast<double>(n))) / q -
             std::log(arg) / q - 1.0;
  if (!std::isfinite(x)) return std::nullopt;
  return x;
}

inline std::optional<double> stationary_x_at_l(std::int64_t n, double tau,
                                               double l) {
  return stationary_x(n, tau, std::exp((3.0 - tau) * l));
}

/// Search grid: integer x range and a log-spaced l range. x_max <= 0 means
/// "use 3 k*(N)".
struct GridSpec {
  int x_min = 1;
  int x_max = 0;
  double l_min = 0.1;
  double l_max = 10.0;
  int l_points = 200;
};

inline std::vector<double> l_grid_points(const GridSpec& g) {
  if (!(g.l_min > 0.0) || g.l_max < g.l_min || g.l_points < 1)
    throw std::domain_error("bad l grid");
  std::vector<double> ls;
  ls.reserve(static_cast<std::size_t>(g.l_points));
  if (g.l_points == 1) {
    ls.push_back(g.l_min);
    return ls;
  }
  double lo = std::log(g.l_min), hi = std::log(g.l_max);
  for (int i = 0; i < g.l_points; ++i) {
    double t = static_cast<double>(i) / (g.l_points - 1);
    ls.push_back(std::exp(lo + t * (hi - lo)));
  }
  ls.front() = g.l_min;
  ls.back() = g.l_max;
  return ls;
}

struct SurfacePoint {
  int x = 0;
  double l = 0.0;
  double s = 0.0;
};

struct Optimum {
  int x_star = 0;
  double l_star = 0.0;
  double s_value = 0.0;
  double log_s = 0.0;
  std::optional<double> stationary_x_real;
  bool on_boundary = false;
  bool stationary_consistent = false;
};

namespace detail {

/// Golden-section maximization of ln s over l in [lo, hi] at fixed x.
inline double golden_max_l(std::int64_t n, double tau, int x, double lo,
                           double hi, double tol) {
  constexpr double invphi = 0.6180339887498949;
  double xd = static_cast<double>(x);
  while (hi - lo > tol) {
    double c = hi - invphi * (hi - lo);
    double d = lo + invphi * (hi - lo);
    if (log_s_objective(n, tau, xd, c) >= log_s_objective(n, tau, xd, d))
      hi = d;
    else
      lo = c;
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// Grid scan with the lexicographically smallest (x, l) winning exact ties,
/// golden-section refinement of l at fixed x, then a hill-climb over the
/// integer neighbors x +/- 1 until s(x*, l*) >= s(x* +/- 1, refined l).
/// `surface`, when given, receives every coarse grid sample.
inline Optimum optimize(std::int64_t n, double tau, GridSpec spec = {},
                        std::vector<SurfacePoint>* surface = nullptr) {
  constexpr double kLTol = 1e-6;
  if (spec.x_max <= 0) spec.x_max = 3 * k_star(n, tau);
  if (spec.x_min < 1) spec.x_min = 1;
  if (spec.x_max < spec.x_min)
    throw std::domain_error("empty x range");
  std::vector<double> ls = l_grid_points(spec);

  int best_x = spec.x_min;
  int best_li = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (int x = spec.x_min; x <= spec.x_max; ++x) {
    for (std::size_t i = 0; i < ls.size(); ++i) {
      double v = log_s_objective(n, tau, static_cast<double>(x), ls[i]);
      if (surface)
        surface->push_back({x, ls[i], std::exp(v)});
      if (v > best) {
        best = v;
        best_x = x;
        best_li = static_cast<int>(i);
      }
    }
  }

  Optimum opt;

  auto refine = [&](int x) {
    double lo = ls[static_cast<std::size_t>(std::max(best_li - 1, 0))];
    double hi = ls[static_cast<std::size_t>(
        std::min(best_li + 1, static_cast<int>(ls.size()) - 1))];
    return detail::golden_max_l(n, tau, x, lo, hi, kLTol);
  };

  opt.x_star = best_x;
  opt.l_star = refine(best_x);
  opt.log_s = log_s_objective(n, tau, best_x, opt.l_star);
  if (opt.log_s < best) {  // refinement never loses to the grid
    opt.l_star = ls[static_cast<std::size_t>(best_li)];
    opt.log_s = best;
  }

  // The l landscape shifts with x, so neighbor comparisons get their own
  // full-range refinement.
  for (bool moved = true; moved;) {
    moved = false;
    for (int dx : {-1, 1}) {
      int x = opt.x_star + dx;
      if (x < spec.x_min || x > spec.x_max) continue;
      double l = detail::golden_max_l(n, tau, x, spec.l_min, spec.l_max, kLTol);
      double v = log_s_objective(n, tau, static_cast<double>(x), l);
      if (v > opt.log_s) {
        opt.x_star = x;
        opt.l_star = l;
        opt.log_s = v;
        moved = true;
      }
    }
  }

  if (opt.x_star == spec.x_max ||
      opt.l_star - spec.l_min < 10 * kLTol ||
      spec.l_max - opt.l_star < 10 * kLTol)
    opt.on_boundary = true;
  opt.s_value = std::exp(opt.log_s);
  opt.stationary_x_real =
      stationary_x(n, tau, std::exp((3.0 - tau) * opt.l_star));
  if (opt.stationary_x_real) {
    double sx = *opt.stationary_x_real;
    opt.stationary_consistent =
        opt.x_star == static_cast<int>(std::floor(sx)) ||
        opt.x_star == static_cast<int>(std::ceil(sx));
  }
  return opt;
}

/// exp(-(tau-2) l): the expected core-neighborhood fraction of N.
inline double asymptotic_density(double tau, double l) {
  if (l < 0.0) throw std::domain_error("l must be >= 0");
  return std::exp(-(tau - 2.0) * l);
}

/// Lower bounds on the ascended-core counts at a given x, evaluated at the
/// l the layers were built with. The neighborhood bound comes in the
/// exact-volume form and in the closed s(x, l) form side by side; the
/// former needs the half-linearization hypothesis, checked not assumed.
struct CoreCountBounds {
  double p0 = 0.0;
  double u_prime_size = 0.0;         // p0^x |U_x|
  double u_prime_volume = 0.0;       // N^{beta_x} p0^x |U_x|
  double neighborhood_size = 0.0;    // N^{beta_x} N p0^x |U_x| / (2 L_N)
  double neighborhood_simplified = 0.0;  // s(x, l)
  double volume_ratio = 0.0;         // u_prime_volume / L_N
  bool half_linearization_valid = false;
  bool empty_core_layer = false;
};

inline CoreCountBounds expected_core_counts(const LayerStructure& layers,
                                            int x,
                                            const BoundConfig& cfg = {}) {
  if (x < 1 || x > layers.depth())
    throw std::domain_error("x out of built layer range");
  const ModelParams& p = layers.params;
  CoreCountBounds out;
  out.p0 = p_zero(p, cfg);
  std::size_t xu = static_cast<std::size_t>(x);
  double ux = static_cast<double>(layers.cardinalities[xu]);
  double px = std::pow(out.p0, x);
  out.u_prime_size = px * ux;
  out.u_prime_volume = layers.thresholds[xu] * px * ux;
  out.neighborhood_size = out.u_prime_volume *
                          static_cast<double>(p.n) /
                          (2.0 * layers.total_capacity);
  out.neighborhood_simplified = s_objective(p.n, p.tau, x, p.l_value);
  out.volume_ratio = out.u_prime_volume / layers.total_capacity;
  out.half_linearization_valid = out.volume_ratio <= kHalfLinearizationLimit;
  out.empty_core_layer = layers.cardinalities[xu] == 0;
  return out;
}

/// Everything cmd_bounds reports: uplink bounds at the given l, the sampled
/// (x, l) surface, the optimum, and the densities.
struct BoundReport {
  ModelParams params;
  BoundConfig config;
  LayerStructure layers;
  std::vector<LayerLinkBound> p_layer;  // entry j-1 is layer j
  double p0 = 0.0;
  std::vector<SurfacePoint> s_surface;
  Optimum optimum;
  double s_max = 0.0;
  double density = 0.0;              // s_max / N
  double asymptotic_density = 0.0;   // at the given l
  CoreCountBounds core;              // at x = min(x*, built depth)
  int core_x = 0;
};

inline BoundReport make_bound_report(const ModelParams& p,
                                     const BoundConfig& cfg = {},
                                     const GridSpec& grid = {},
                                     int core_x = 0) {
  BoundReport r;
  r.params = p;
  r.config = cfg;
  r.optimum = optimize(p.n, p.tau, grid, &r.s_surface);
  if (core_x <= 0) core_x = r.optimum.x_star;
  r.s_max = r.optimum.s_value;
  r.density = r.s_max / static_cast<double>(p.n);
  r.asymptotic_density = asymptotic_density(p.tau, p.l_value);
  int depth = std::max(k_star(p), core_x);
  r.layers = build_layers(p, depth);
  r.p_layer.reserve(static_cast<std::size_t>(depth));
  for (int j = 1; j <= depth; ++j)
    r.p_layer.push_back(layer_link_bound(r.layers, j, cfg));
  r.p0 = p_zero(p, cfg);
  r.core_x = core_x;
  r.core = expected_core_counts(r.layers, r.core_x, cfg);
  return r;
}

/// One row of the size-scaling table: the optimizer pair next to the three
/// iterated-log curves it should interleave with.
struct ScalingRow {
  std::int64_t n = 0;
  int x_star = 0;
  double loglog_ratio = 0.0;  // ln ln N / -ln(tau-2)
  double l_star = 0.0;
  double lll = 0.0;   // ln ln ln N (NaN below its domain)
  double llll = 0.0;  // ln ln ln ln N (NaN below its domain)
  bool ordering_ok = false;  // x* >= ratio >= l* >= lll >= llll where defined
};

inline std::vector<ScalingRow> scaling_series(
    double tau, const std::vector<std::int64_t>& ns, const GridSpec& grid = {}) {
  std::vector<ScalingRow> rows;
  rows.reserve(ns.size());
  for (std::int64_t n : ns) {
    ScalingRow row;
    row.n = n;
    Optimum opt = optimize(n, tau, grid);
    row.x_star = opt.x_star;
    row.l_star = opt.l_star;
    row.loglog_ratio = loglog_ratio(n, tau);
    double ll = std::log(std::log(static_cast<double>(n)));
    row.lll = ll > 0.0 ? std::log(ll)
                       : std::numeric_limits<double>::quiet_NaN();
    row.llll = row.lll > 0.0 ? std::log(row.lll)
                             : std::numeric_limits<double>::quiet_NaN();
    row.ordering_ok = static_cast<double>(row.x_star) >= row.loglog_ratio &&
                      row.loglog_ratio >= row.l_star;
    if (!std::isnan(row.lll))
      row.ordering_ok = row.ordering_ok && row.l_star >= row.lll;
    if (!std::isnan(row.lll) && !std::isnan(row.llll))
      row.ordering_ok = row.ordering_ok && row.lll >= row.llll;
    rows.push_back(row);
  }
  return rows;
}

struct CurvePoint {
  double l = 0.0;
  double s = 0.0;
};

/// s(x, l) over the l grid at fixed x.
inline std::vector<CurvePoint> objective_curve(std::int64_t n, double tau,
                                               int x, const GridSpec& grid) {
  std::vector<CurvePoint> pts;
  for (double l : l_grid_points(grid))
    pts.push_back({l, s_objective(n, tau, x, l)});
  return pts;
}

}  // namespace powerlaw
