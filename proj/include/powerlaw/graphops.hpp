#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "powerlaw/bounds.hpp"
#include "powerlaw/graphgen.hpp"
#include "powerlaw/layers.hpp"
#include "powerlaw/model.hpp"
#include "powerlaw/parallel.hpp"
#include "powerlaw/rng.hpp"

namespace powerlaw {

/// Union-find with path halving and union by size.
class DisjointSet {
 public:
  explicit DisjointSet(std::int64_t n)
      : parent_(static_cast<std::size_t>(n) + 1),
        size_(static_cast<std::size_t>(n) + 1, 1) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  std::int64_t find(std::int64_t v) {
    while (parent_[static_cast<std::size_t>(v)] != v) {
      parent_[static_cast<std::size_t>(v)] =
          parent_[static_cast<std::size_t>(parent_[static_cast<std::size_t>(v)])];
      v = parent_[static_cast<std::size_t>(v)];
    }
    return v;
  }

  void merge(std::int64_t a, std::int64_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (size_[static_cast<std::size_t>(a)] < size_[static_cast<std::size_t>(b)])
      std::swap(a, b);
    parent_[static_cast<std::size_t>(b)] = a;
    size_[static_cast<std::size_t>(a)] += size_[static_cast<std::size_t>(b)];
  }

 private:
  std::vector<std::int64_t> parent_;
  std::vector<std::int64_t> size_;
};

/// Component label per node (1-based; label = smallest node in the component).
inline std::vector<std::int64_t> component_labels(const MultiGraph& g) {
  DisjointSet ds(g.n);
  for (const Edge& e : g.edges) ds.merge(e.first, e.second);
  // Roots are arbitrary; relabel by the smallest member.
  std::vector<std::int64_t> label(static_cast<std::size_t>(g.n) + 1, 0);
  std::vector<std::int64_t> smallest(static_cast<std::size_t>(g.n) + 1,
                                     std::numeric_limits<std::int64_t>::max());
  for (std::int64_t v = 1; v <= g.n; ++v) {
    std::int64_t r = ds.find(v);
    smallest[static_cast<std::size_t>(r)] =
        std::min(smallest[static_cast<std::size_t>(r)], v);
  }
  for (std::int64_t v = 1; v <= g.n; ++v)
    label[static_cast<std::size_t>(v)] =
        smallest[static_cast<std::size_t>(ds.find(v))];
  return label;
}

/// The full partition, parts ordered by their smallest member.
inline std::vector<std::vector<std::int64_t>> components(const MultiGraph& g) {
  std::vector<std::int64_t> label = component_labels(g);
  std::vector<std::vector<std::int64_t>> parts;
  std::vector<std::int64_t> part_of(static_cast<std::size_t>(g.n) + 1, -1);
  for (std::int64_t v = 1; v <= g.n; ++v) {
    std::int64_t l = label[static_cast<std::size_t>(v)];
    if (part_of[static_cast<std::size_t>(l)] < 0) {
      part_of[static_cast<std::size_t>(l)] =
          static_cast<std::int64_t>(parts.size());
      parts.emplace_back();
    }
    parts[static_cast<std::size_t>(part_of[static_cast<std::size_t>(l)])]
        .push_back(v);
  }
  return parts;
}

/// Largest component, smallest-member tie-break; sorted ascending.
inline std::vector<std::int64_t> giant_component(const MultiGraph& g) {
  std::vector<std::vector<std::int64_t>> parts = components(g);
  const std::vector<std::int64_t>* best = nullptr;
  for (const auto& part : parts)
    if (!best || part.size() > best->size()) best = &part;
  return best ? *best : std::vector<std::int64_t>{};
}

/// Hop distances from one source to every node; -1 where unreachable.
/// Parallel edges and self-loops cannot change a BFS front, so no special
/// casing is needed.
inline std::vector<std::int32_t> bfs_distances(const MultiGraph& g,
                                               std::int64_t source) {
  if (source < 1 || source > g.n) throw std::out_of_range("bad source node");
  std::vector<std::int32_t> dist(static_cast<std::size_t>(g.n) + 1, -1);
  std::vector<std::int64_t> frontier{source};
  dist[static_cast<std::size_t>(source)] = 0;
  std::vector<std::int64_t> next;
  for (std::int32_t d = 1; !frontier.empty(); ++d) {
    next.clear();
    for (std::int64_t v : frontier) {
      for (const std::int64_t* it = g.neighbors_begin(v);
           it != g.neighbors_end(v); ++it) {
        if (dist[static_cast<std::size_t>(*it)] < 0) {
          dist[static_cast<std::size_t>(*it)] = d;
          next.push_back(*it);
        }
      }
    }
    frontier.swap(next);
  }
  return dist;
}

/// Minimum hop count, empty when unreachable. Stops as soon as the target's
/// level is complete.
inline std::optional<int> bfs_distance(const MultiGraph& g, std::int64_t s,
                                       std::int64_t t) {
  if (s < 1 || s > g.n) throw std::out_of_range("bad source node");
  if (t < 1 || t > g.n) throw std::out_of_range("bad target node");
  if (s == t) return 0;
  std::vector<std::int32_t> dist(static_cast<std::size_t>(g.n) + 1, -1);
  std::vector<std::int64_t> frontier{s};
  dist[static_cast<std::size_t>(s)] = 0;
  std::vector<std::int64_t> next;
  for (std::int32_t d = 1; !frontier.empty(); ++d) {
    next.clear();
    for (std::int64_t v : frontier) {
      for (const std::int64_t* it = g.neighbors_begin(v);
           it != g.neighbors_end(v); ++it) {
        if (dist[static_cast<std::size_t>(*it)] < 0) {
          if (*it == t) return static_cast<int>(d);
          dist[static_cast<std::size_t>(*it)] = d;
          next.push_back(*it);
        }
      }
    }
    frontier.swap(next);
  }
  return std::nullopt;
}

struct DistanceSample {
  std::int64_t source = 0;
  std::int64_t target = 0;
  int hops = 0;
};

struct DistanceSummary {
  std::vector<DistanceSample> samples;
  double median = 0.0;
  double mean = 0.0;
  int max = 0;
  int distance_limit = 0;       // the "close enough" cutoff used below
  double within_fraction = 0.0; // fraction of samples with hops <= limit
  std::int64_t giant_size = 0;
};

/// Uniform random distinct pairs within the giant component; hop counts by
/// per-pair BFS (parallel across pairs, order-independent results).
inline DistanceSummary sample_distances(const MultiGraph& g, int pairs,
                                        std::uint64_t seed,
                                        int distance_limit) {
  if (pairs < 1) throw std::domain_error("pairs must be >= 1");
  std::vector<std::int64_t> giant = giant_component(g);
  if (giant.size() < 2)
    throw std::runtime_error("giant component has fewer than 2 nodes");

  DistanceSummary out;
  out.distance_limit = distance_limit;
  out.giant_size = static_cast<std::int64_t>(giant.size());
  out.samples.resize(static_cast<std::size_t>(pairs));

  SplitMix64 pick(derive_stream(seed, 0xd15749ull, 0));
  auto draw_node = [&] {
    std::size_t i = static_cast<std::size_t>(pick.uniform() *
                                             static_cast<double>(giant.size()));
    return giant[std::min(i, giant.size() - 1)];
  };
  for (auto& sample : out.samples) {
    sample.source = draw_node();
    do {
      sample.target = draw_node();
    } while (sample.target == sample.source);
  }

  parallel_for(out.samples.size(), [&](std::size_t k) {
    DistanceSample& sample = out.samples[k];
    // both ends sit in the giant component, so a distance always exists
    sample.hops = *bfs_distance(g, sample.source, sample.target);
  });

  std::vector<int> hops;
  hops.reserve(out.samples.size());
  long long sum = 0;
  int within = 0;
  for (const DistanceSample& sample : out.samples) {
    hops.push_back(sample.hops);
    sum += sample.hops;
    out.max = std::max(out.max, sample.hops);
    if (sample.hops <= distance_limit) ++within;
  }
  std::sort(hops.begin(), hops.end());
  std::size_t h = hops.size() / 2;
  out.median = hops.size() % 2 == 1
                   ? hops[h]
                   : 0.5 * (hops[h - 1] + hops[h]);
  out.mean = static_cast<double>(sum) / static_cast<double>(hops.size());
  out.within_fraction = static_cast<double>(within) / static_cast<double>(pairs);
  return out;
}

/// Cutoff defaulted to 2 k*(N) + 2 from the graph's own metadata.
inline DistanceSummary sample_distances(const MultiGraph& g, int pairs,
                                        std::uint64_t seed) {
  return sample_distances(g, pairs, seed, 2 * k_star(g.n, g.tau) + 2);
}

/// Per-layer uplink statistics. Entries are indexed by the layer j, valid
/// for 1 <= j <= depth; index 0 is unused. "Ring" is U_j \ U_{j-1}; the
/// whole-layer variant counts all of U_j. Fractions are NaN for empty
/// denominators.
struct UplinkStats {
  std::vector<std::int64_t> ring_size, ring_linked;
  std::vector<std::int64_t> layer_size, layer_linked;
  std::vector<double> ring_fraction, layer_fraction;
};

inline UplinkStats layer_uplink_fractions(const MultiGraph& g,
                                          const LayerStructure& layers) {
  if (g.n != layers.params.n)
    throw std::invalid_argument("graph and layers disagree on N");
  int depth = layers.depth();
  UplinkStats s;
  std::size_t m = static_cast<std::size_t>(depth) + 1;
  s.ring_size.assign(m, 0);
  s.ring_linked.assign(m, 0);
  s.layer_size.assign(m, 0);
  s.layer_linked.assign(m, 0);
  s.ring_fraction.assign(m, std::numeric_limits<double>::quiet_NaN());
  s.layer_fraction.assign(m, std::numeric_limits<double>::quiet_NaN());

  for (int j = 1; j <= depth; ++j) {
    std::size_t ju = static_cast<std::size_t>(j);
    std::int64_t prev = layers.cardinalities[ju - 1];
    std::int64_t cur = layers.cardinalities[ju];
    std::int64_t ring_linked = 0, ring_size = 0;
    std::int64_t layer_linked = 0;
    for (std::int64_t v = 1; v <= cur; ++v) {
      bool linked = false;
      for (const std::int64_t* it = g.neighbors_begin(v);
           it != g.neighbors_end(v) && !linked; ++it)
        linked = *it <= prev && *it != v;
      if (v > prev) {
        ++ring_size;
        if (linked) ++ring_linked;
      }
      if (linked) ++layer_linked;
    }
    s.ring_size[ju] = ring_size;
    s.ring_linked[ju] = ring_linked;
    s.layer_size[ju] = cur;
    s.layer_linked[ju] = layer_linked;
    if (ring_size > 0)
      s.ring_fraction[ju] =
          static_cast<double>(ring_linked) / static_cast<double>(ring_size);
    if (cur > 0)
      s.layer_fraction[ju] =
          static_cast<double>(layer_linked) / static_cast<double>(cur);
  }
  return s;
}

/// U'_x: nodes of U_x with a strictly layer-ascending path of <= x hops to
/// node 1. Good-node recursion over the rings: node 1 is good; a node whose
/// smallest layer is j is good iff it has an edge to a good node of U_{j-1}.
/// Sorted ascending.
inline std::vector<std::int64_t> core_ascending_set(const MultiGraph& g,
                                                    const LayerStructure& layers,
                                                    int x) {
  if (x < 0 || x > layers.depth())
    throw std::domain_error("x out of built layer range");
  if (g.n != layers.params.n)
    throw std::invalid_argument("graph and layers disagree on N");
  std::vector<char> good(static_cast<std::size_t>(g.n) + 1, 0);
  good[1] = 1;
  for (int j = 1; j <= x; ++j) {
    std::size_t ju = static_cast<std::size_t>(j);
    std::int64_t prev = layers.cardinalities[ju - 1];
    std::int64_t cur = layers.cardinalities[ju];
    for (std::int64_t v = prev + 1; v <= cur; ++v) {
      for (const std::int64_t* it = g.neighbors_begin(v);
           it != g.neighbors_end(v); ++it) {
        if (*it <= prev && good[static_cast<std::size_t>(*it)]) {
          good[static_cast<std::size_t>(v)] = 1;
          break;
        }
      }
    }
  }
  std::vector<std::int64_t> result;
  std::int64_t cx = layers.cardinalities[static_cast<std::size_t>(x)];
  for (std::int64_t v = 1; v <= cx; ++v)
    if (good[static_cast<std::size_t>(v)]) result.push_back(v);
  return result;
}

/// N_x: the set together with every neighbor of it. Sorted ascending.
inline std::vector<std::int64_t> core_neighborhood(
    const MultiGraph& g, const std::vector<std::int64_t>& u_prime) {
  std::vector<char> in(static_cast<std::size_t>(g.n) + 1, 0);
  for (std::int64_t v : u_prime) {
    if (v < 1 || v > g.n) throw std::out_of_range("set member out of range");
    in[static_cast<std::size_t>(v)] = 1;
  }
  std::vector<char> out = in;
  for (std::int64_t v : u_prime)
    for (const std::int64_t* it = g.neighbors_begin(v);
         it != g.neighbors_end(v); ++it)
      out[static_cast<std::size_t>(*it)] = 1;
  std::vector<std::int64_t> result;
  for (std::int64_t v = 1; v <= g.n; ++v)
    if (out[static_cast<std::size_t>(v)]) result.push_back(v);
  return result;
}

/// Everything one seeded run measures, next to the bounds it will be
/// compared with.
struct SimReport {
  std::uint64_t seed = 0;
  std::int64_t n = 0;
  double tau = 0.0;
  double l_value = 0.0;
  GenMethod method = GenMethod::pairwise;
  int x = 0;
  int k_star = 0;
  std::int64_t edge_count = 0;
  std::int64_t giant_size = 0;
  DistanceSummary distances;
  UplinkStats uplink;
  std::vector<double> uplink_bound;        // exact p_j per layer, [0] unused
  std::int64_t u_prime_size = 0;
  double u_prime_volume = 0.0;
  std::int64_t n_x_size = 0;
  CoreCountBounds bounds;
};

struct SimConfig {
  int pairs = 1000;
  int x = 0;  // <= 0: use the optimizer's x*
  std::optional<GenMethod> method;
  int distance_slack = 2;
  BoundConfig bound_config;
};

inline SimReport run_simulation(const ModelParams& params, std::uint64_t seed,
                                const SimConfig& cfg = {}) {
  SimReport r;
  r.seed = seed;
  r.n = params.n;
  r.tau = params.tau;
  r.l_value = params.l_value;
  r.x = cfg.x > 0 ? cfg.x : optimize(params.n, params.tau).x_star;
  r.k_star = k_star(params);
  r.method = cfg.method ? *cfg.method : default_method(params.n);

  MultiGraph g = sample_graph(GenSpec{params, seed, r.method});
  r.edge_count = static_cast<std::int64_t>(g.edges.size());

  LayerStructure layers = build_layers(params, std::max(r.k_star, r.x));
  r.uplink = layer_uplink_fractions(g, layers);
  r.uplink_bound.assign(r.uplink.ring_fraction.size(), 0.0);
  for (int j = 1; j <= layers.depth(); ++j)
    r.uplink_bound[static_cast<std::size_t>(j)] =
        p_layer_bound(layers, j, cfg.bound_config);

  std::vector<std::int64_t> u_prime = core_ascending_set(g, layers, r.x);
  r.u_prime_size = static_cast<std::int64_t>(u_prime.size());
  for (std::int64_t v : u_prime) r.u_prime_volume += capacity(params, v);
  r.n_x_size =
      static_cast<std::int64_t>(core_neighborhood(g, u_prime).size());
  r.bounds = expected_core_counts(layers, r.x, cfg.bound_config);

  r.distances = sample_distances(g, cfg.pairs, seed,
                                 2 * r.k_star + cfg.distance_slack);
  r.giant_size = r.distances.giant_size;
  return r;
}

}  // namespace powerlaw
