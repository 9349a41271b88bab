#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "powerlaw/powerlaw.hpp"

namespace {

using namespace powerlaw;

struct CommonOpts {
  std::int64_t n = 100000;
  double tau = 2.5;
  std::optional<double> l;
  std::optional<std::string> l_family;
  std::string grid_l;
  std::string out;
};

void add_model_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--n", o.n, "node count")->check(CLI::PositiveNumber);
  cmd->add_option("--tau", o.tau, "degree exponent, in (2, 3)")
      ->check(CLI::Range(2.0, 3.0));
  auto* l = cmd->add_option("--l", o.l, "slack value l > 0");
  cmd->add_option("--l-family", o.l_family,
                  "canonical slack: lll = ln ln ln N, llll = ln ln ln ln N")
      ->check(CLI::IsMember({"lll", "llll"}))
      ->excludes(l);
}

LFamily family_of(const std::string& s) {
  return s == "lll" ? LFamily::lll : LFamily::llll;
}

/// --l wins, then --l-family, then the given fallback.
ModelParams resolve_params(const CommonOpts& o, double fallback_l = 0.0) {
  if (o.l) return ModelParams::from_tau(o.n, o.tau, *o.l);
  if (o.l_family)
    return ModelParams::from_family(o.n, o.tau, family_of(*o.l_family));
  if (fallback_l > 0.0) return ModelParams::from_tau(o.n, o.tau, fallback_l);
  return ModelParams::from_family(o.n, o.tau, LFamily::lll);
}

GridSpec resolve_grid(const std::string& s) {
  GridSpec g;
  if (s.empty()) return g;
  int points = 0;
  if (std::sscanf(s.c_str(), "%lf:%lf:%d", &g.l_min, &g.l_max, &points) != 3 ||
      !(g.l_min > 0.0) || g.l_max < g.l_min || points < 1)
    throw CLI::ValidationError("--grid-l", "expected min:max:points with 0 < min <= max, points >= 1");
  g.l_points = points;
  return g;
}

/// "1,4,7..9" -> {1, 4, 7, 8, 9}
std::vector<std::uint64_t> parse_seeds(const std::string& s) {
  std::vector<std::uint64_t> seeds;
  std::istringstream is(s);
  std::string piece;
  while (std::getline(is, piece, ',')) {
    if (piece.empty()) continue;
    std::size_t dots = piece.find("..");
    if (dots == std::string::npos) {
      seeds.push_back(std::stoull(piece));
      continue;
    }
    std::uint64_t lo = std::stoull(piece.substr(0, dots));
    std::uint64_t hi = std::stoull(piece.substr(dots + 2));
    if (hi < lo) throw CLI::ValidationError("--seeds", "range high < low");
    for (std::uint64_t v = lo; v <= hi; ++v) seeds.push_back(v);
  }
  if (seeds.empty()) throw CLI::ValidationError("--seeds", "no seeds given");
  return seeds;
}

void print_config(const std::string& command, const ModelParams& p,
                  const std::string& extra) {
  std::printf("config command=%s n=%" PRId64 " tau=%.12g alpha=%.12g l=%.12g%s%s rng=%s threads=%d\n",
              command.c_str(), p.n, p.tau, p.alpha, p.l_value,
              extra.empty() ? "" : " ", extra.c_str(), kRngAlgorithm,
              thread_budget());
}

struct CheckSet {
  bool ok = true;

  void require(bool pass, const std::string& inequality) {
    std::printf("%s %s\n", pass ? "PASS" : "FAIL", inequality.c_str());
    if (!pass) ok = false;
  }
};

int cmd_generate(const CommonOpts& o, std::uint64_t seed,
                 const std::string& method_name) {
  ModelParams p = resolve_params(o, 1.0);
  GenSpec spec{p, seed,
               method_name.empty() ? default_method(p.n)
                                   : gen_method_from_string(method_name)};
  std::ostringstream extra;
  extra << "seed=" << seed << " method=" << to_string(spec.method);
  print_config("generate", p, extra.str());

  MultiGraph g = sample_graph(spec);
  std::string path = o.out.empty() ? "graph.txt" : o.out;
  std::ostringstream body;
  write_graph(body, g);
  atomic_write(path, body.str());
  std::printf("generated n=%" PRId64 " edges=%zu seed=%" PRIu64 " file=%s\n",
              g.n, g.edges.size(), seed, path.c_str());
  return 0;
}

int cmd_bounds(const CommonOpts& o, int x_flag) {
  ModelParams p = resolve_params(o);
  GridSpec grid = resolve_grid(o.grid_l);
  std::ostringstream extra;
  extra << "x=" << x_flag << " grid_l=" << grid.l_min << ':' << grid.l_max
        << ':' << grid.l_points;
  print_config("bounds", p, extra.str());

  BoundReport r = make_bound_report(p, {}, grid, x_flag);
  std::printf("k_star=%d p0=%.12g x_star=%d l_star=%.12g s_max=%.12g density=%.12g asymptotic_density=%.12g\n",
              r.layers.k_star, r.p0, r.optimum.x_star, r.optimum.l_star,
              r.s_max, r.density, r.asymptotic_density);
  for (std::size_t i = 0; i < r.p_layer.size(); ++i)
    std::printf("p_layer[%zu] exact=%.12g simplified=%.12g%s\n", i + 1,
                r.p_layer[i].exact, r.p_layer[i].simplified,
                r.p_layer[i].empty_previous ? " (empty previous layer)" : "");
  if (!r.core.half_linearization_valid)
    std::printf("note: volume ratio %.6g exceeds %.6g; the exact-volume neighborhood bound's half-linearization hypothesis fails here\n",
                r.core.volume_ratio, kHalfLinearizationLimit);
  if (r.layers.any_count_mismatch)
    std::printf("note: closed-form and direct layer cardinalities differ somewhere (threshold tie)\n");

  CheckSet checks;
  checks.require(r.density >= 0.0 && r.density <= 1.0,
                 "density " + format_sig(r.density) + " in [0, 1]");
  bool dominates = true;
  for (const SurfacePoint& sp : r.s_surface) dominates = dominates && r.s_max >= sp.s;
  checks.require(dominates, "s_max >= every sampled s(x, l)");
  bool probs_ok = r.p0 >= 0.0 && r.p0 <= 1.0;
  for (const LayerLinkBound& b : r.p_layer)
    probs_ok = probs_ok && b.exact >= 0.0 && b.exact <= 1.0 &&
               b.simplified >= 0.0 && b.simplified <= 1.0;
  checks.require(probs_ok, "all probabilities in [0, 1]");

  if (!o.out.empty()) {
    atomic_write(o.out, to_json(r).dump(2) + "\n");
    std::printf("report written to %s\n", o.out.c_str());
  }
  return checks.ok ? 0 : 1;
}

int cmd_fig1(const CommonOpts& o) {
  GridSpec grid = resolve_grid(o.grid_l);
  std::printf("config command=fig1 tau=%.12g n_list=1e2..1e10 grid_l=%g:%g:%d rng=%s threads=%d\n",
              o.tau, grid.l_min, grid.l_max, grid.l_points, kRngAlgorithm,
              thread_budget());

  std::vector<std::int64_t> ns;
  for (std::int64_t n = 100; n <= 10000000000LL; n *= 10) ns.push_back(n);
  std::vector<ScalingRow> rows = scaling_series(o.tau, ns, grid);

  std::string path = o.out.empty() ? "fig1.csv" : o.out;
  atomic_write(path, fig1_csv(rows));
  std::printf("series written to %s\n", path.c_str());

  CheckSet checks;
  for (const ScalingRow& r : rows) {
    std::printf("n=%" PRId64 " x_star=%d loglog_ratio=%.6f l_star=%.6f lll=%.6f llll=%.6f%s\n",
                r.n, r.x_star, r.loglog_ratio, r.l_star, r.lll, r.llll,
                r.ordering_ok ? "" : " (ordering violated)");
    if (r.n >= 1000)
      checks.require(r.ordering_ok,
                     "n=" + std::to_string(r.n) +
                         ": x_star >= loglog_ratio >= l_star >= lll >= llll");
    else if (!r.ordering_ok)
      std::printf("note: ordering not enforced at n=%" PRId64 "\n", r.n);
  }
  return checks.ok ? 0 : 1;
}

int cmd_fig2(const CommonOpts& o, int x_flag) {
  GridSpec grid = resolve_grid(o.grid_l);
  Optimum opt = optimize(o.n, o.tau, grid);
  int x = x_flag > 0 ? x_flag : opt.x_star;
  std::printf("config command=fig2 n=%" PRId64 " tau=%.12g x=%d grid_l=%g:%g:%d rng=%s threads=%d\n",
              o.n, o.tau, x, grid.l_min, grid.l_max, grid.l_points,
              kRngAlgorithm, thread_budget());

  std::vector<CurvePoint> curve = objective_curve(o.n, o.tau, x, grid);
  std::string path = o.out.empty() ? "fig2.csv" : o.out;
  atomic_write(path, fig2_csv(curve));
  std::printf("curve written to %s\n", path.c_str());

  std::size_t argmax = 0;
  for (std::size_t i = 1; i < curve.size(); ++i)
    if (curve[i].s > curve[argmax].s) argmax = i;
  std::printf("argmax l=%.12g s=%.12g (optimizer l_star=%.12g)\n",
              curve[argmax].l, curve[argmax].s, opt.l_star);

  CheckSet checks;
  checks.require(argmax > 0 && argmax + 1 < curve.size(),
                 "argmax of s(x_star, l) interior to the l grid");
  bool positive = true;
  for (const CurvePoint& cp : curve) positive = positive && cp.s > 0.0;
  checks.require(positive, "s(x_star, l) > 0 on the grid");
  return checks.ok ? 0 : 1;
}

int cmd_simulate(const CommonOpts& o, const std::string& seeds_text, int pairs,
                 int x_flag, const std::string& method_name) {
  ModelParams p = resolve_params(o);
  std::vector<std::uint64_t> seeds = parse_seeds(seeds_text);
  SimConfig cfg;
  cfg.pairs = pairs;
  cfg.x = x_flag > 0 ? x_flag : optimize(p.n, p.tau).x_star;
  if (!method_name.empty()) cfg.method = gen_method_from_string(method_name);

  std::ostringstream extra;
  extra << "seeds=" << seeds_text << " pairs=" << pairs << " x=" << cfg.x
        << " method="
        << to_string(cfg.method ? *cfg.method : default_method(p.n));
  print_config("simulate", p, extra.str());

  std::filesystem::path dir = o.out.empty() ? "simulate_out" : o.out;
  std::filesystem::create_directories(dir);

  std::vector<SimReport> reports(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t i) {
    reports[i] = run_simulation(p, seeds[i], cfg);
    atomic_write(dir / ("seed_" + std::to_string(seeds[i]) + ".json"),
                 to_json(reports[i]).dump(2) + "\n");
  });
  std::sort(reports.begin(), reports.end(),
            [](const SimReport& a, const SimReport& b) { return a.seed < b.seed; });
  atomic_write(dir / "aggregate.csv", simulate_aggregate_csv(reports));
  std::printf("%zu reports + aggregate.csv written to %s\n", reports.size(),
              dir.string().c_str());

  const SimReport& first = reports.front();
  CheckSet checks;
  auto collect = [&](auto get) {
    std::vector<double> xs;
    for (const SimReport& r : reports) xs.push_back(get(r));
    return mean_stderr(xs);
  };
  for (std::size_t j = 1; j < first.uplink.ring_fraction.size(); ++j) {
    if (first.uplink.ring_size[j] == 0) {
      std::printf("SKIP uplink layer %zu: empty ring\n", j);
      continue;
    }
    if (first.uplink_bound[j] == 0.0) {
      std::printf("SKIP uplink layer %zu: empty previous layer, bound 0\n", j);
      continue;
    }
    MeanErr m = collect(
        [&](const SimReport& r) { return r.uplink.ring_fraction[j]; });
    std::ostringstream line;
    line << "uplink layer " << j << ": mean " << format_sig(m.mean)
         << " >= bound " << format_sig(first.uplink_bound[j]) << " - 3*"
         << format_sig(m.stderr_);
    checks.require(m.mean >= first.uplink_bound[j] - 3.0 * m.stderr_,
                   line.str());
  }
  {
    MeanErr m = collect([](const SimReport& r) {
      return static_cast<double>(r.u_prime_size);
    });
    std::ostringstream line;
    line << "|U'_x|: mean " << format_sig(m.mean) << " >= bound "
         << format_sig(first.bounds.u_prime_size) << " - 3*"
         << format_sig(m.stderr_);
    checks.require(m.mean >= first.bounds.u_prime_size - 3.0 * m.stderr_,
                   line.str());
  }
  {
    MeanErr m = collect([](const SimReport& r) {
      return static_cast<double>(r.n_x_size);
    });
    std::ostringstream line;
    line << "|N_x|: mean " << format_sig(m.mean) << " >= bound "
         << format_sig(first.bounds.neighborhood_size) << " - 3*"
         << format_sig(m.stderr_);
    checks.require(m.mean >= first.bounds.neighborhood_size - 3.0 * m.stderr_,
                   line.str());
  }
  for (const SimReport& r : reports) {
    std::ostringstream line;
    line << "seed " << r.seed << " distance median " << format_sig(r.distances.median)
         << " <= " << r.distances.distance_limit;
    checks.require(r.distances.median <=
                       static_cast<double>(r.distances.distance_limit),
                   line.str());
  }
  return checks.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"power-law random graph toolkit: sampling, layer hierarchy, analytic bounds, seed sweeps"};
  app.require_subcommand(1);

  CommonOpts gen_o, bounds_o, fig1_o, fig2_o, sim_o;
  std::uint64_t seed = 0;
  std::string gen_method, sim_method, seeds_text = "1..30";
  int bounds_x = 0, fig2_x = 0, sim_x = 0, pairs = 1000;

  CLI::App* gen = app.add_subcommand("generate", "sample one graph and write it to a file");
  add_model_flags(gen, gen_o);
  gen->add_option("--seed", seed, "RNG seed");
  gen->add_option("--method", gen_method, "pairwise | endpoint-sampling")
      ->check(CLI::IsMember({"pairwise", "endpoint-sampling"}));
  gen->add_option("--out", gen_o.out, "output file (default graph.txt)");

  CLI::App* bounds = app.add_subcommand("bounds", "layer hierarchy, link bounds, and the optimized objective");
  add_model_flags(bounds, bounds_o);
  bounds->add_option("--x", bounds_x, "core depth for the count bounds (default: x*)")
      ->check(CLI::PositiveNumber);
  bounds->add_option("--grid-l", bounds_o.grid_l, "l grid as min:max:points");
  bounds->add_option("--out", bounds_o.out, "write the full JSON report here");

  CLI::App* fig1 = app.add_subcommand("fig1", "optimizer pair vs iterated-log curves across N = 10^2..10^10");
  fig1->add_option("--tau", fig1_o.tau, "degree exponent")->check(CLI::Range(2.0, 3.0));
  fig1->add_option("--grid-l", fig1_o.grid_l, "l grid as min:max:points");
  fig1->add_option("--out", fig1_o.out, "output CSV (default fig1.csv)");

  CLI::App* fig2 = app.add_subcommand("fig2", "s(x*, l) over the l grid at fixed N");
  fig2->add_option("--n", fig2_o.n, "node count")->check(CLI::PositiveNumber);
  fig2->add_option("--tau", fig2_o.tau, "degree exponent")->check(CLI::Range(2.0, 3.0));
  fig2->add_option("--x", fig2_x, "fix x (default: optimizer's x*)")
      ->check(CLI::PositiveNumber);
  fig2->add_option("--grid-l", fig2_o.grid_l, "l grid as min:max:points");
  fig2->add_option("--out", fig2_o.out, "output CSV (default fig2.csv)");

  CLI::App* sim = app.add_subcommand("simulate", "seed sweep: sample, measure, compare against the bounds");
  add_model_flags(sim, sim_o);
  sim->add_option("--seeds", seeds_text, "seed list, e.g. 1..30 or 1,2,9..12");
  sim->add_option("--pairs", pairs, "distance sample pairs per seed")
      ->check(CLI::PositiveNumber);
  sim->add_option("--x", sim_x, "core depth x (default: optimizer's x*)")
      ->check(CLI::PositiveNumber);
  sim->add_option("--method", sim_method, "pairwise | endpoint-sampling")
      ->check(CLI::IsMember({"pairwise", "endpoint-sampling"}));
  sim->add_option("--out", sim_o.out, "output directory (default simulate_out)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(gen_o, seed, gen_method);
    if (bounds->parsed()) return cmd_bounds(bounds_o, bounds_x);
    if (fig1->parsed()) return cmd_fig1(fig1_o);
    if (fig2->parsed()) return cmd_fig2(fig2_o, fig2_x);
    if (sim->parsed()) return cmd_simulate(sim_o, seeds_text, pairs, sim_x, sim_method);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
