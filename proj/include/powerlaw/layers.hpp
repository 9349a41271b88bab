#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "powerlaw/model.hpp"

namespace powerlaw {

/// epsilon(N) = l / log N. Requires N >= 2 so that log N > 0.
inline double epsilon_of(const ModelParams& p) {
  if (p.n < 2) throw std::domain_error("epsilon requires N >= 2");
  return p.l_value / std::log(static_cast<double>(p.n));
}

/// The affine threshold-exponent recursion with an explicit epsilon:
///   beta_0 = 1/(tau-1) + eps/(tau-2),  beta_j = (tau-2) beta_{j-1} + eps.
/// eps = 0 is permitted here (the recursion collapses to geometric decay);
/// the fixed point is eps/(3-tau).
inline std::vector<double> beta_sequence_eps(double tau, double eps, int depth) {
  if (depth < 0) throw std::domain_error("depth must be >= 0");
  std::vector<double> betas;
  betas.reserve(static_cast<std::size_t>(depth) + 1);
  double beta = 1.0 / (tau - 1.0) + eps / (tau - 2.0);
  betas.push_back(beta);
  for (int j = 1; j <= depth; ++j) {
    beta = (tau - 2.0) * beta + eps;
    betas.push_back(beta);
  }
  return betas;
}

inline std::vector<double> beta_sequence(const ModelParams& p, int depth) {
  return beta_sequence_eps(p.tau, epsilon_of(p), depth);
}

/// log log N / -log(tau-2): the real-valued hierarchy height whose ceiling
/// is k*.
inline double loglog_ratio(std::int64_t n, double tau) {
  return std::log(std::log(static_cast<double>(n))) / -std::log(tau - 2.0);
}

/// k*(N) = ceil(log log N / -log(tau-2)). Requires N >= 16 so that
/// log log N is safely positive.
inline int k_star(std::int64_t n, double tau) {
  if (n < 16) throw std::domain_error("k* requires N >= 16");
  return static_cast<int>(std::ceil(loglog_ratio(n, tau)));
}

inline int k_star(const ModelParams& p) { return k_star(p.n, p.tau); }

/// The layer hierarchy U_0 = {1} subset ... subset U_depth, with exact and
/// closed-form cardinalities, capacity volumes and their lower bounds.
/// Because capacities decrease in the node index, every layer is a prefix
/// {1..cardinalities[j]} of the node ordering.
struct LayerStructure {
  ModelParams params;
  double epsilon = 0.0;
  std::vector<double> betas;
  std::vector<double> thresholds;                  // N^{beta_j}
  std::vector<std::int64_t> cardinalities;         // direct count; [0] = 1
  std::vector<std::int64_t> cardinalities_closed;  // floor(N^{1-(tau-1)beta_j})
  std::vector<double> volumes;                     // V(U_j), exact prefix sums
  std::vector<double> volume_lower_bounds;         // V_0(U_j)
  double total_capacity = 0.0;                     // L_N, exact
  int k_star = 0;
  std::vector<bool> empty_layer;      // j > 0 with U_j empty by closed form
  std::vector<int> count_mismatch;    // |direct - closed| per layer
  bool any_count_mismatch = false;

  int depth() const { return static_cast<int>(betas.size()) - 1; }

  bool member(std::int64_t node, int layer) const {
    return node >= 1 && node <= cardinalities[static_cast<std::size_t>(layer)];
  }

  /// Smallest j with node in U_j; depth()+1 if the node is below every layer.
  int smallest_layer(std::int64_t node) const {
    for (int j = 0; j <= depth(); ++j)
      if (member(node, j)) return j;
    return depth() + 1;
  }
};

namespace detail {

/// Largest i in [1, n] with (n/i)^alpha >= threshold, by bisection on the
/// monotone capacity sequence. 0 if even node 1 misses the threshold.
inline std::int64_t count_at_or_above(const ModelParams& p, double threshold) {
  if (capacity(p, 1) < threshold) return 0;
  std::int64_t lo = 1, hi = p.n;  // capacity(lo) >= threshold
  while (lo < hi) {
    std::int64_t mid = lo + (hi - lo + 1) / 2;
    if (capacity(p, mid) >= threshold)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

}  // namespace detail

/// Builds the hierarchy to the given depth (default: k*(N)).
/// Cardinalities are computed both ways; a mismatch beyond the floating-point
/// tie tolerance of one node is flagged, never silently dropped.
inline LayerStructure build_layers(const ModelParams& p, int depth = -1) {
  LayerStructure ls;
  ls.params = p;
  ls.epsilon = epsilon_of(p);
  ls.k_star = k_star(p);
  if (depth < 0) depth = ls.k_star;
  ls.betas = beta_sequence(p, depth);

  double n = static_cast<double>(p.n);
  double log_n = std::log(n);
  ls.thresholds.resize(ls.betas.size());
  ls.cardinalities.resize(ls.betas.size());
  ls.cardinalities_closed.resize(ls.betas.size());
  ls.empty_layer.assign(ls.betas.size(), false);
  ls.count_mismatch.assign(ls.betas.size(), 0);

  for (std::size_t j = 0; j < ls.betas.size(); ++j) {
    ls.thresholds[j] = std::exp(ls.betas[j] * log_n);
    if (j == 0) {
      // U_0 = {1} by definition, independent of the threshold.
      ls.cardinalities[0] = 1;
      ls.cardinalities_closed[0] = 1;
      continue;
    }
    double exponent = 1.0 - (p.tau - 1.0) * ls.betas[j];
    double closed = std::floor(std::exp(exponent * log_n));
    std::int64_t closed_count =
        closed < 0.5 ? 0 : static_cast<std::int64_t>(std::min(closed, n));
    std::int64_t direct = detail::count_at_or_above(p, ls.thresholds[j]);
    ls.cardinalities[j] = direct;
    ls.cardinalities_closed[j] = closed_count;
    ls.count_mismatch[j] = static_cast<int>(std::llabs(direct - closed_count));
    if (ls.count_mismatch[j] != 0) ls.any_count_mismatch = true;
    if (closed_count == 0) ls.empty_layer[j] = true;
  }

  // Prefix capacity sums give every V(U_j) and, continued to N, L_N itself.
  std::int64_t max_card = 1;
  for (std::int64_t c : ls.cardinalities) max_card = std::max(max_card, c);
  double sum = 0.0;
  std::vector<double> prefix(static_cast<std::size_t>(max_card) + 1, 0.0);
  std::int64_t i = 1;
  for (; i <= max_card; ++i) {
    sum += capacity(p, i);
    prefix[static_cast<std::size_t>(i)] = sum;
  }
  for (; i <= p.n; ++i) sum += capacity(p, i);
  ls.total_capacity = sum;

  ls.volumes.resize(ls.betas.size());
  ls.volume_lower_bounds.resize(ls.betas.size());
  for (std::size_t j = 0; j < ls.betas.size(); ++j) {
    ls.volumes[j] = prefix[static_cast<std::size_t>(ls.cardinalities[j])];
    if (j == 0) {
      ls.volume_lower_bounds[0] = std::pow(n, p.alpha);  // V(U_0) exactly
    } else {
      ls.volume_lower_bounds[j] =
          std::exp((1.0 - (p.tau - 2.0) * ls.betas[j]) * log_n) - ls.thresholds[j];
    }
  }
  return ls;
}

}  // namespace powerlaw
