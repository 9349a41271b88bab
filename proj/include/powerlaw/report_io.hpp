#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "powerlaw/bounds.hpp"
#include "powerlaw/graphops.hpp"
#include "powerlaw/rng.hpp"

namespace powerlaw {

/// 12 significant digits, plain decimal point; the CSV number format.
inline std::string format_sig(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

/// Writes via a sibling temp file and a rename, so readers never observe a
/// partial file.
inline void atomic_write(const std::filesystem::path& path,
                         const std::string& content) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open " + tmp.string());
    os << content;
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

struct MeanErr {
  double mean = 0.0;
  double stderr_ = 0.0;
  int count = 0;
};

inline MeanErr mean_stderr(const std::vector<double>& xs) {
  MeanErr m;
  m.count = static_cast<int>(xs.size());
  if (xs.empty()) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return m;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.stderr_ = std::sqrt(ss / static_cast<double>(xs.size() - 1) /
                        static_cast<double>(xs.size()));
  return m;
}

inline nlohmann::json to_json(const Optimum& o) {
  nlohmann::json j{{"x_star", o.x_star},
                   {"l_star", o.l_star},
                   {"s_value", o.s_value},
                   {"log_s", o.log_s},
                   {"on_boundary", o.on_boundary},
                   {"stationary_consistent", o.stationary_consistent}};
  if (o.stationary_x_real)
    j["stationary_x_real"] = *o.stationary_x_real;
  else
    j["stationary_x_real"] = nullptr;
  return j;
}

inline nlohmann::json to_json(const LayerStructure& ls) {
  return nlohmann::json{
      {"n", ls.params.n},
      {"tau", ls.params.tau},
      {"alpha", ls.params.alpha},
      {"l", ls.params.l_value},
      {"epsilon", ls.epsilon},
      {"k_star", ls.k_star},
      {"betas", ls.betas},
      {"thresholds", ls.thresholds},
      {"cardinalities", ls.cardinalities},
      {"cardinalities_closed", ls.cardinalities_closed},
      {"volumes", ls.volumes},
      {"volume_lower_bounds", ls.volume_lower_bounds},
      {"total_capacity", ls.total_capacity},
      {"any_count_mismatch", ls.any_count_mismatch}};
}

inline nlohmann::json to_json(const CoreCountBounds& c) {
  return nlohmann::json{
      {"p0", c.p0},
      {"u_prime_size", c.u_prime_size},
      {"u_prime_volume", c.u_prime_volume},
      {"neighborhood_size", c.neighborhood_size},
      {"neighborhood_simplified", c.neighborhood_simplified},
      {"volume_ratio", c.volume_ratio},
      {"half_linearization_valid", c.half_linearization_valid},
      {"empty_core_layer", c.empty_core_layer}};
}

inline nlohmann::json to_json(const BoundReport& r) {
  nlohmann::json p_layer = nlohmann::json::array();
  for (std::size_t i = 0; i < r.p_layer.size(); ++i)
    p_layer.push_back({{"j", i + 1},
                       {"exact", r.p_layer[i].exact},
                       {"simplified", r.p_layer[i].simplified},
                       {"empty_previous", r.p_layer[i].empty_previous}});
  nlohmann::json surface = nlohmann::json::array();
  for (const SurfacePoint& point : r.s_surface)
    surface.push_back({point.x, point.l, point.s});
  return nlohmann::json{{"rng", kRngAlgorithm},
                        {"n", r.params.n},
                        {"tau", r.params.tau},
                        {"l", r.params.l_value},
                        {"c_ratio", r.config.c_ratio},
                        {"k_star", r.layers.k_star},
                        {"layers", to_json(r.layers)},
                        {"p_layer", p_layer},
                        {"p0", r.p0},
                        {"s_surface", surface},
                        {"x_star", r.optimum.x_star},
                        {"l_star", r.optimum.l_star},
                        {"s_max", r.s_max},
                        {"density", r.density},
                        {"asymptotic_density", r.asymptotic_density},
                        {"optimum", to_json(r.optimum)},
                        {"core_x", r.core_x},
                        {"core", to_json(r.core)}};
}

inline nlohmann::json to_json(const SimReport& r) {
  nlohmann::json samples = nlohmann::json::array();
  for (const DistanceSample& s : r.distances.samples)
    samples.push_back({s.source, s.target, s.hops});
  nlohmann::json uplink = nlohmann::json::array();
  for (std::size_t j = 1; j < r.uplink.ring_fraction.size(); ++j)
    uplink.push_back({{"j", j},
                      {"ring_size", r.uplink.ring_size[j]},
                      {"ring_linked", r.uplink.ring_linked[j]},
                      {"ring_fraction", r.uplink.ring_fraction[j]},
                      {"layer_size", r.uplink.layer_size[j]},
                      {"layer_linked", r.uplink.layer_linked[j]},
                      {"layer_fraction", r.uplink.layer_fraction[j]},
                      {"bound", r.uplink_bound[j]}});
  return nlohmann::json{
      {"rng", kRngAlgorithm},
      {"seed", r.seed},
      {"n", r.n},
      {"tau", r.tau},
      {"l", r.l_value},
      {"method", to_string(r.method)},
      {"x", r.x},
      {"k_star", r.k_star},
      {"edge_count", r.edge_count},
      {"giant_size", r.giant_size},
      {"distance_median", r.distances.median},
      {"distance_mean", r.distances.mean},
      {"distance_max", r.distances.max},
      {"distance_limit", r.distances.distance_limit},
      {"within_limit_fraction", r.distances.within_fraction},
      {"distance_samples", samples},
      {"uplink", uplink},
      {"u_prime_size", r.u_prime_size},
      {"u_prime_volume", r.u_prime_volume},
      {"n_x_size", r.n_x_size},
      {"bounds", to_json(r.bounds)}};
}

/// Cross-seed aggregate: one row per metric with mean, standard error and,
/// where one exists, the analytic lower bound to compare against.
inline std::string simulate_aggregate_csv(const std::vector<SimReport>& runs) {
  if (runs.empty()) throw std::invalid_argument("no reports to aggregate");
  const SimReport& first = runs.front();
  std::string csv = "metric,seeds,mean,stderr,bound\n";
  auto collect = [&](auto get) {
    std::vector<double> xs;
    xs.reserve(runs.size());
    for (const SimReport& r : runs) xs.push_back(get(r));
    return mean_stderr(xs);
  };
  auto row = [&](const std::string& name, const MeanErr& m, double bound,
                 bool has_bound) {
    csv += name + ',' + std::to_string(m.count) + ',' + format_sig(m.mean) +
           ',' + format_sig(m.stderr_) + ',' +
           (has_bound ? format_sig(bound) : std::string()) + '\n';
  };

  double n = static_cast<double>(first.n);
  row("giant_fraction",
      collect([&](const SimReport& r) {
        return static_cast<double>(r.giant_size) / n;
      }),
      0, false);
  row("distance_median",
      collect([](const SimReport& r) { return r.distances.median; }), 0, false);
  row("distance_mean",
      collect([](const SimReport& r) { return r.distances.mean; }), 0, false);
  row("within_limit_fraction",
      collect([](const SimReport& r) { return r.distances.within_fraction; }),
      0, false);
  for (std::size_t j = 1; j < first.uplink.ring_fraction.size(); ++j)
    row("uplink_ring_fraction_" + std::to_string(j),
        collect([&](const SimReport& r) { return r.uplink.ring_fraction[j]; }),
        first.uplink_bound[j], true);
  row("u_prime_size",
      collect([](const SimReport& r) {
        return static_cast<double>(r.u_prime_size);
      }),
      first.bounds.u_prime_size, true);
  row("u_prime_volume",
      collect([](const SimReport& r) { return r.u_prime_volume; }),
      first.bounds.u_prime_volume, true);
  row("n_x_size",
      collect([](const SimReport& r) {
        return static_cast<double>(r.n_x_size);
      }),
      first.bounds.neighborhood_size, true);
  row("n_x_fraction",
      collect([&](const SimReport& r) {
        return static_cast<double>(r.n_x_size) / n;
      }),
      first.bounds.neighborhood_size / n, true);
  return csv;
}

inline std::string fig1_csv(const std::vector<ScalingRow>& rows) {
  std::string csv = "n,x_star,loglog_ratio,l_star,lll_n,llll_n\n";
  for (const ScalingRow& r : rows) {
    csv += std::to_string(r.n) + ',' + std::to_string(r.x_star) + ',' +
           format_sig(r.loglog_ratio) + ',' + format_sig(r.l_star) + ',' +
           format_sig(r.lll) + ',' + format_sig(r.llll) + '\n';
  }
  return csv;
}

inline std::string fig2_csv(const std::vector<CurvePoint>& pts) {
  std::string csv = "l,s\n";
  for (const CurvePoint& p : pts)
    csv += format_sig(p.l) + ',' + format_sig(p.s) + '\n';
  return csv;
}

}  // namespace powerlaw
