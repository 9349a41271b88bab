#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace powerlaw {

/// Capacity exponent from the degree exponent: alpha = 1/(tau-1).
/// Valid range is 2 < tau < 3 (finite mean, infinite variance).
inline double alpha_from_tau(double tau) {
  if (!(tau > 2.0 && tau < 3.0))
    throw std::domain_error("tau must lie in (2, 3), got " + std::to_string(tau));
  return 1.0 / (tau - 1.0);
}

inline double tau_from_alpha(double alpha) {
  if (!(alpha > 0.5 && alpha < 1.0))
    throw std::domain_error("alpha must lie in (1/2, 1), got " + std::to_string(alpha));
  return 1.0 / alpha + 1.0;
}

/// Canonical choices of the slack value l at a given graph size:
/// lll = log log log N, llll = log log log log N (natural logs).
enum class LFamily { lll, llll };

inline const char* to_string(LFamily f) { return f == LFamily::lll ? "lll" : "llll"; }

inline double l_family_value(LFamily f, std::int64_t n) {
  double v = std::log(std::log(static_cast<double>(n)));
  v = std::log(v);  // lll
  if (f == LFamily::llll) v = std::log(v);
  if (!std::isfinite(v) || v <= 0.0)
    throw std::domain_error(std::string("l family ") + to_string(f) +
                            " is not positive at N = " + std::to_string(n));
  return v;
}

/// Model parameters. Node i in 1..N carries capacity (N/i)^alpha; l is the
/// slack scalar entering the layer recursion through epsilon = l / log N.
/// Immutable after construction; all operations on it are pure.
struct ModelParams {
  std::int64_t n = 0;
  double tau = 0.0;
  double alpha = 0.0;
  double l_value = 0.0;

  static ModelParams from_tau(std::int64_t n, double tau, double l) {
    ModelParams p;
    p.n = n;
    p.tau = tau;
    p.alpha = alpha_from_tau(tau);
    p.l_value = l;
    p.validate();
    return p;
  }

  static ModelParams from_alpha(std::int64_t n, double alpha, double l) {
    ModelParams p;
    p.n = n;
    p.tau = tau_from_alpha(alpha);
    p.alpha = alpha;
    p.l_value = l;
    p.validate();
    return p;
  }

  static ModelParams from_family(std::int64_t n, double tau, LFamily f) {
    return from_tau(n, tau, l_family_value(f, n));
  }

  void validate() const {
    if (n < 1) throw std::domain_error("N must be >= 1");
    if (!(tau > 2.0 && tau < 3.0)) throw std::domain_error("tau must lie in (2, 3)");
    if (!(l_value > 0.0)) throw std::domain_error("l must be positive");
    if (std::fabs(alpha * (tau - 1.0) - 1.0) > 1e-12)
      throw std::domain_error("alpha and tau are inconsistent");
  }
};

/// Capacity of node i: (N/i)^alpha. Strictly decreasing in i; node N has
/// capacity exactly 1.
inline double capacity(const ModelParams& p, std::int64_t i) {
  if (i < 1 || i > p.n)
    throw std::out_of_range("node index " + std::to_string(i) + " outside 1.." +
                            std::to_string(p.n));
  return std::pow(static_cast<double>(p.n) / static_cast<double>(i), p.alpha);
}

/// Total capacity L_N = sum_i (N/i)^alpha by direct summation. O(N).
inline double total_capacity(const ModelParams& p) {
  double sum = 0.0;
  for (std::int64_t i = 1; i <= p.n; ++i)
    sum += std::pow(static_cast<double>(p.n) / static_cast<double>(i), p.alpha);
  return sum;
}

///// Expected number of parallel edges between i and j: lambda_i lambda_j / L_N.
inline double edge_mean(const ModelParams& p, std::int64_t i, std::int64_t j) {
  return capacity(p, i) * capacity(p, j) / total_capacity(p);
}

/// As above but with L_N precomputed; the hot-path form.
inline double edge_mean(const ModelParams& p, std::int64_t i, std::int64_t j,
                        double total) {
  return capacity(p, i) * capacity(p, j) / total;
}

/// Closed-form lower bound L_N >= (9/10) N / (1-alpha), valid when
/// N > 10^(1/(1-alpha)). Returns 0 when the validity condition fails.
inline double total_capacity_lower_bound(const ModelParams& p) {
  double n_min = std::pow(10.0, 1.0 / (1.0 - p.alpha));
  if (!(static_cast<double>(p.n) > n_min)) return 0.0;
  return 0.9 * static_cast<double>(p.n) / (1.0 - p.alpha);
}

/// Concrete thresholds for the finite-size regime where the layer picture is
/// expected to hold. Overridable for sensitivity studies.
struct RangeThresholds {
  double alpha_max = 0.75;
  std::int64_t n_min = 1000;
};

struct CommunicationRangeFlag {
  bool in_range = false;
  std::vector<std::string> reasons;  // empty iff in_range
};

inline CommunicationRangeFlag communication_range_check(
    const ModelParams& p, const RangeThresholds& t = {}) {
  CommunicationRangeFlag flag;
  if (p.alpha > t.alpha_max)
    flag.reasons.push_back("alpha = " + std::to_string(p.alpha) + " exceeds " +
                           std::to_string(t.alpha_max));
  double n_bound = std::pow(10.0, 1.0 / (1.0 - p.alpha));
  if (!(static_cast<double>(p.n) > n_bound))
    flag.reasons.push_back("N = " + std::to_string(p.n) +
                           " does not exceed 10^(1/(1-alpha)) = " +
                           std::to_string(n_bound));
  if (p.n < t.n_min)
    flag.reasons.push_back("N = " + std::to_string(p.n) + " below " +
                           std::to_string(t.n_min));
  flag.in_range = flag.reasons.empty();
  return flag;
}

}  // namespace powerlaw
