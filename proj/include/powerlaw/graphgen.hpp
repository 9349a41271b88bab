#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "powerlaw/model.hpp"
#include "powerlaw/parallel.hpp"
#include "powerlaw/rng.hpp"

namespace powerlaw {

enum class GenMethod { pairwise, endpoint_sampling };

inline const char* to_string(GenMethod m) {
  return m == GenMethod::pairwise ? "pairwise" : "endpoint-sampling";
}

inline GenMethod gen_method_from_string(const std::string& s) {
  if (s == "pairwise") return GenMethod::pairwise;
  if (s == "endpoint-sampling") return GenMethod::endpoint_sampling;
  throw std::invalid_argument("unknown generation method: " + s);
}

/// Pairwise is exact for every entry including self-loops but costs O(N^2)
/// Poisson draws; endpoint sampling costs O(L_N).
inline GenMethod default_method(std::int64_t n) {
  return n <= 20000 ? GenMethod::pairwise : GenMethod::endpoint_sampling;
}

struct GenSpec {
  ModelParams params;
  std::uint64_t seed = 0;
  GenMethod method = GenMethod::pairwise;

  static GenSpec make(const ModelParams& p, std::uint64_t seed) {
    return GenSpec{p, seed, default_method(p.n)};
  }
};

using Edge = std::pair<std::int64_t, std::int64_t>;

/// Multigraph as an edge multiset (u <= v, 1-based) plus a CSR adjacency
/// index. A self-loop appears twice in its node's adjacency row, so degree
/// sums equal 2 |edges|.
struct MultiGraph {
  std::int64_t n = 0;
  std::vector<Edge> edges;
  std::uint64_t seed = 0;
  GenMethod method = GenMethod::pairwise;
  double tau = 0.0;
  std::vector<std::int64_t> adj_index;  // node i owns adj[adj_index[i]..adj_index[i+1])
  std::vector<std::int64_t> adj;

  static MultiGraph from_edges(std::int64_t n, std::vector<Edge> edges) {
    MultiGraph g;
    g.n = n;
    g.edges = std::move(edges);
    g.build_adjacency();
    return g;
  }

  void build_adjacency() {
    adj_index.assign(static_cast<std::size_t>(n) + 2, 0);
    for (const Edge& e : edges) {
      if (e.first < 1 || e.second < e.first || e.second > n)
        throw std::invalid_argument("edge endpoint out of range");
      ++adj_index[static_cast<std::size_t>(e.first) + 1];
      ++adj_index[static_cast<std::size_t>(e.second) + 1];
    }
    for (std::size_t i = 1; i < adj_index.size(); ++i)
      adj_index[i] += adj_index[i - 1];
    adj.resize(static_cast<std::size_t>(adj_index.back()));
    std::vector<std::int64_t> cursor(adj_index.begin(), adj_index.end() - 1);
    for (const Edge& e : edges) {
      adj[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.first)]++)] =
          e.second;
      adj[static_cast<std::size_t>(cursor[static_cast<std::size_t>(e.second)]++)] =
          e.first;
    }
  }

  std::int64_t degree(std::int64_t i) const {
    return adj_index[static_cast<std::size_t>(i) + 1] -
           adj_index[static_cast<std::size_t>(i)];
  }

  const std::int64_t* neighbors_begin(std::int64_t i) const {
    return adj.data() + adj_index[static_cast<std::size_t>(i)];
  }
  const std::int64_t* neighbors_end(std::int64_t i) const {
    return adj.data() + adj_index[static_cast<std::size_t>(i) + 1];
  }
};

namespace detail {

/// One row of the pairwise sampler: Poisson draws for every pair (i, j),
/// j >= i, each from its own (seed, i, j) stream.
inline void sample_row(const ModelParams& p, std::uint64_t seed,
                       std::int64_t i, double total, std::vector<Edge>& out) {
  double lam_i = capacity(p, i);
  for (std::int64_t j = i; j <= p.n; ++j) {
    double mean = lam_i * capacity(p, j) / total;
    SplitMix64 stream(derive_stream(seed, static_cast<std::uint64_t>(i),
                                    static_cast<std::uint64_t>(j)));
    std::int64_t count = poisson(stream, mean);
    for (std::int64_t c = 0; c < count; ++c) out.emplace_back(i, j);
  }
}

}  // namespace detail

/// Samples the multigraph. Pairwise: independent Poisson(lambda_i lambda_j
/// / L_N) per unordered pair, parallel across rows. Endpoint sampling:
/// T ~ Poisson(L_N / 2) edges, each endpoint drawn with probability
/// lambda_i / L_N; off-diagonal counts follow the same law, self-loop means
/// are half the pairwise value. Both deterministic in (seed, method, params).
inline MultiGraph sample_graph(const GenSpec& spec) {
  const ModelParams& p = spec.params;
  p.validate();
  double total = total_capacity(p);

  MultiGraph g;
  g.n = p.n;
  g.seed = spec.seed;
  g.method = spec.method;
  g.tau = p.tau;

  if (spec.method == GenMethod::pairwise) {
    std::vector<std::vector<Edge>> rows(static_cast<std::size_t>(p.n));
    parallel_for(static_cast<std::size_t>(p.n), [&](std::size_t r) {
      detail::sample_row(p, spec.seed, static_cast<std::int64_t>(r) + 1, total,
                         rows[r]);
    });
    std::size_t m = 0;
    for (const auto& row : rows) m += row.size();
    g.edges.reserve(m);
    for (const auto& row : rows)
      g.edges.insert(g.edges.end(), row.begin(), row.end());
  } else {
    std::vector<double> cum(static_cast<std::size_t>(p.n) + 1, 0.0);
    for (std::int64_t i = 1; i <= p.n; ++i)
      cum[static_cast<std::size_t>(i)] =
          cum[static_cast<std::size_t>(i) - 1] + capacity(p, i);
    double l_n = cum.back();
    SplitMix64 count_stream(derive_stream(spec.seed, 0, 0));
    std::int64_t t = poisson(count_stream, l_n / 2.0);
    g.edges.resize(static_cast<std::size_t>(t));
    parallel_for(static_cast<std::size_t>(t), [&](std::size_t e) {
      SplitMix64 stream(
          derive_stream(spec.seed, 0, static_cast<std::uint64_t>(e) + 1));
      auto draw = [&] {
        double target = stream.uniform() * l_n;
        auto it = std::upper_bound(cum.begin() + 1, cum.end(), target);
        return static_cast<std::int64_t>(it - cum.begin());
      };
      std::int64_t u = draw(), v = draw();
      g.edges[e] = {std::min(u, v), std::max(u, v)};
    });
  }
  g.build_adjacency();
  return g;
}

/// Header `N <n> SEED <seed> METHOD <name> TAU <tau>`, then one `u v` line
/// per edge, 1-based, u <= v, LF endings.
inline void write_graph(std::ostream& os, const MultiGraph& g) {
  char header[160];
  std::snprintf(header, sizeof header, "N %lld SEED %llu METHOD %s TAU %.17g\n",
                static_cast<long long>(g.n),
                static_cast<unsigned long long>(g.seed), to_string(g.method),
                g.tau);
  os << header;
  for (const Edge& e : g.edges)
    os << e.first << ' ' << e.second << '\n';
}

inline MultiGraph read_graph(std::istream& is) {
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("empty graph file");
  std::istringstream hs(line);
  std::string kn, ks, km, kt, method;
  MultiGraph g;
  if (!(hs >> kn >> g.n >> ks >> g.seed >> km >> method >> kt >> g.tau) ||
      kn != "N" || ks != "SEED" || km != "METHOD" || kt != "TAU")
    throw std::runtime_error("bad graph header: " + line);
  g.method = gen_method_from_string(method);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream es(line);
    Edge e;
    if (!(es >> e.first >> e.second))
      throw std::runtime_error("bad edge line: " + line);
    g.edges.push_back(e);
  }
  g.build_adjacency();
  return g;
}

struct DegreeCheck {
  double mean = 0.0;
  double stderr_ = 0.0;
  double variance = 0.0;
  int trials = 0;
};

/// Mean degree of one node over independent samples (trial t uses seed
/// spec.seed + t). Only the node's own pair streams are consumed, which is
/// draw-for-draw identical to its row in a full pairwise sample. A self-loop
/// adds 1 here: sum_j lambda_i lambda_j / L_N over all j, the identity under
/// test, counts the diagonal once.
inline DegreeCheck empirical_degree_check(const GenSpec& spec,
                                          std::int64_t node, int trials) {
  if (trials < 100) throw std::domain_error("trials must be >= 100");
  if (spec.method != GenMethod::pairwise)
    throw std::invalid_argument("degree check runs on the pairwise method");
  const ModelParams& p = spec.params;
  if (node < 1 || node > p.n) throw std::out_of_range("node out of range");
  double total = total_capacity(p);
  double lam = capacity(p, node);

  std::vector<double> degrees(static_cast<std::size_t>(trials), 0.0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(t);
    std::int64_t deg = 0;
    for (std::int64_t j = 1; j <= p.n; ++j) {
      std::int64_t a = std::min(node, j), b = std::max(node, j);
      SplitMix64 stream(derive_stream(seed, static_cast<std::uint64_t>(a),
                                      static_cast<std::uint64_t>(b)));
      deg += poisson(stream, lam * capacity(p, j) / total);
    }
    degrees[t] = static_cast<double>(deg);
  });

  DegreeCheck out;
  out.trials = trials;
  double sum = 0.0;
  for (double d : degrees) sum += d;
  out.mean = sum / trials;
  double ss = 0.0;
  for (double d : degrees) ss += (d - out.mean) * (d - out.mean);
  out.variance = ss / (trials - 1);
  out.stderr_ = std::sqrt(out.variance / trials);
  return out;
}

}  // namespace powerlaw
