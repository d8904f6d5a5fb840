#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "llab/driving_spec.hpp"
#include "llab/experiments.hpp"
#include "llab/rate.hpp"
#include "llab/selftest.hpp"
#include "llab/serialize.hpp"

namespace fs = std::filesystem;
using namespace llab;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  std::string out = ".";
  unsigned workers = 1;
  bool verbose = false;
};

void announce(const fs::path& p) { std::cout << "wrote " << p.string() << '\n'; }

fs::path output_path(const Globals& g, const std::string& name) { return fs::path(g.out) / name; }

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
  double kappa = 1.0;
  double t = 1.0;
  Index steps = 0;
  Index bins = 256;
  std::string name = "simulate";
};

int run_simulate(const Globals& g, const SimulateArgs& a) {
  const Index needed = min_steps_for(a.kappa, a.t);
  const Index steps = a.steps == 0 ? std::max<Index>(needed, 1) : a.steps;
  require(steps >= needed, "--steps must be >= ceil(64 * kappa * t) = " + std::to_string(needed));
  const auto path = sample_circle_bm(a.kappa, steps, a.t, g.seed);

  std::ostringstream p;
  p << "t,angle,re,im\n";
  for (Index k = 0; k <= path.steps(); ++k) {
    const auto z = path.position(k);
    p << format_double(path.times[k]) << ',' << format_double(path.angles[k]) << ',' << format_double(z.real()) << ','
      << format_double(z.imag()) << '\n';
  }
  const auto path_file = output_path(g, a.name + "_path.csv");
  write_text_file(path_file, p.str());

  const auto occ = occupation_measure(path, a.t, a.bins);
  const auto field = local_time_field(path, a.t, a.bins);
  std::vector<std::vector<double>> rows;
  for (Index k = 0; k < a.bins; ++k)
    rows.push_back({static_cast<double>(k), bin_center(k, a.bins), occ.bins[k], field[k]});
  std::ostringstream o;
  write_table_csv(o, {"bin", "center", "mass", "local_time"}, rows);
  const auto occ_file = output_path(g, a.name + "_occupation.csv");
  write_text_file(occ_file, o.str());

  std::cout << "W1(average occupation, uniform) = "
            << format_double(w1_circle(average_occupation(occ), MeasureS1::uniform(a.bins))) << '\n';
  announce(path_file);
  announce(occ_file);
  return 0;
}

// ------------------------------------------------------------------- chain

struct ChainArgs {
  std::string driving = "uniform";
  double t = 1.0;
  int probe = 64;
  Index bins = 256;
  int trace_points = 0;
  double rtol = 1e-10;
  double atol = 1e-14;
  bool interpolate = false;
  std::string name = "chain";
};

int run_chain(const Globals& g, const ChainArgs& a) {
  const auto rho = parse_driving_spec(a.driving, SpecContext{a.bins, g.seed});
  SolverSettings settings;
  settings.rtol = a.rtol;
  settings.atol = a.atol;
  settings.interpolate_angle = a.interpolate;
  const SubordinationChain chain(rho, 1.0, settings);
  require(a.t >= 0.0 && a.t <= chain.t_max(), "--t must lie in [0, 1]");

  const auto grid = hull_grid(chain, a.t, a.probe, g.workers);
  std::ostringstream h;
  write_hull_csv(h, grid);
  const auto hull_file = output_path(g, a.name + "_hull.csv");
  write_text_file(hull_file, h.str());
  std::cout << "t = " << format_double(a.t) << ": swallowed " << grid.swallowed << ", alive " << grid.alive
            << ", undetermined " << grid.undetermined << '\n';
  announce(hull_file);

  if (a.trace_points > 0) {
    require(chain.schedule().point_driven(), "--trace needs point driving (dirac:<angle> or bm:<kappa>)");
    std::vector<TraceSample> samples(static_cast<std::size_t>(a.trace_points) + 1);
    parallel_for(samples.size(), g.workers, [&](std::size_t j) {
      const double t = a.t * static_cast<double>(j) / a.trace_points;
      samples[j] = {t, trace_point(chain, t, 0.999, true)};
    });
    std::ostringstream tr;
    write_trace_csv(tr, samples);
    const auto trace_file = output_path(g, a.name + "_trace.csv");
    write_text_file(trace_file, tr.str());
    announce(trace_file);
  }
  return 0;
}

// -------------------------------------------------------------------- rate

struct RateArgs {
  std::string measure;
  std::string driving;
  Index bins = 256;
  int degree = 16;
  int level = -1;
  bool regularize = false;
  std::string name = "rate";
};

std::string show(const RateReport& r) {
  return r.value.is_infinite() ? std::string("inf") : format_double(r.value.value());
}

int run_rate(const Globals& g, const RateArgs& a) {
  require(a.measure.empty() != a.driving.empty(), "give exactly one of --measure or --driving");
  const SpecContext ctx{a.bins, g.seed};
  DirichletOptions dopt;
  dopt.regularize = a.regularize;
  Json out = Json::object();
  if (!a.measure.empty()) {
    const auto mu = parse_measure_spec(a.measure, ctx);
    const auto dirichlet = dirichlet_rate(mu, dopt);
    VariationalOptions vopt;
    vopt.degree = a.degree;
    const auto variational = variational_rate(mu, vopt);
    std::cout << "I=" << show(dirichlet) << '\n' << "I_variational=" << show(variational) << '\n';
    if (!dirichlet.diagnostics.note.empty()) std::cout << "note: " << dirichlet.diagnostics.note << '\n';
    if (!variational.diagnostics.converged) std::cout << "note: " << variational.diagnostics.note << '\n';
    out["measure"] = a.measure;
    out["dirichlet"] = to_json(dirichlet);
    out["variational"] = to_json(variational);
  } else {
    const auto rho = parse_driving_spec(a.driving, ctx);
    const auto e = energy(rho, dopt);
    std::cout << "E=" << show(e) << '\n';
    out["driving"] = a.driving;
    out["energy"] = to_json(e);
    if (a.level >= 0) {
      const auto tuple = project(rho, a.level, {.refine_nondyadic = true});
      const auto in = tuple_rate(tuple, dopt);
      std::cout << "I_" << a.level << "=" << show(in) << '\n';
      out["level_n"] = to_json(in);
    }
  }
  const auto file = output_path(g, a.name + ".json");
  write_text_file(file, out.dump(2) + "\n");
  announce(file);
  return 0;
}

// ----------------------------------------------------------------- project

struct ProjectArgs {
  std::string driving;
  int level = 3;
  int depth = 8;
  Index bins = 256;
  bool refine = false;
  std::string name = "project";
};

int run_project(const Globals& g, const ProjectArgs& a) {
  const auto rho = parse_driving_spec(a.driving, SpecContext{a.bins, g.seed});
  const ProjectionOptions options{a.refine};
  const auto tuple = project(rho, a.level, options);
  const auto round_trip = project(embed(tuple), a.level);
  bool exact = true;
  for (std::size_t i = 0; i < tuple.entries.size(); ++i) {
    const auto& x = tuple.entries[i];
    const auto& y = round_trip.entries[i];
    exact = exact && (x.is_atomic() ? render_bins(x, a.bins) == render_bins(y, a.bins) : x.bins() == y.bins());
  }
  std::cout << "P_n(F_n(P_n rho)) == P_n rho: " << (exact ? "exact" : "MISMATCH") << '\n';

  std::vector<std::vector<double>> rows;
  for (int n = 0; n <= a.level; ++n) {
    const auto approx = embed(project(rho, n, options));
    rows.push_back({static_cast<double>(n), dn_distance(approx, rho, a.depth)});
  }
  std::ostringstream decay;
  write_table_csv(decay, {"level", "dn_distance"}, rows);
  for (const auto& r : rows) std::cout << "level " << r[0] << ": dn = " << format_double(r[1]) << '\n';

  const auto tuple_file = output_path(g, a.name + "_level" + std::to_string(a.level) + ".json");
  const auto decay_file = output_path(g, a.name + "_decay.csv");
  write_text_file(tuple_file, to_json(tuple).dump(2) + "\n");
  write_text_file(decay_file, decay.str());
  announce(tuple_file);
  announce(decay_file);
  return exact ? 0 : 2;
}

// ------------------------------------------------------------- experiments

int run_and_persist(const Globals& g, ExperimentSpec spec, const std::string& name) {
  spec.base_seed = g.seed;
  spec.workers = g.workers;
  const auto result = run_experiment(spec);
  for (const auto& row : result.summary) {
    if (!g.verbose && row.metric.rfind('x', 0) == 0) continue;
    std::cout << row.config << "  " << row.metric << "  mean " << format_double(row.mean) << "  se "
              << format_double(row.standard_error) << "  n " << row.count << '\n';
  }
  std::cout << result.extra.dump(g.verbose ? 2 : -1).substr(0, g.verbose ? std::string::npos : 2000) << '\n';
  for (const auto& p : persist(result, output_path(g, name))) announce(p);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial Loewner chains, Brownian occupation measures and rate functions"};
  app.set_version_flag("--version", std::string(LLAB_VERSION));
  app.set_config("--config", "", "TOML config file; [subcommand] sections set subcommand flags");
  app.require_subcommand(1);

  Globals g;
  app.add_option("--seed", g.seed, "Base seed of every random stream")->capture_default_str();
  app.add_option("--out", g.out, "Output directory")->envname("LLAB_OUT_DIR")->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads for replicas and probe grids")
      ->check(CLI::Range(1u, 256u))
      ->capture_default_str();
  app.add_flag("--verbose,-v", g.verbose, "Print full summaries");

  const auto positive = CLI::PositiveNumber;
  const auto nonnegative = CLI::NonNegativeNumber;

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Sample circular Brownian motion; write path and occupation CSV");
  simulate->add_option("--kappa", sim.kappa, "Variance parameter")->check(nonnegative)->capture_default_str();
  simulate->add_option("--t", sim.t, "Final time")->check(positive)->capture_default_str();
  simulate->add_option("--steps", sim.steps, "Time steps (0: ceil(64 kappa t))")
      ->check(CLI::Range(Index{0}, Index{1} << 28))
      ->capture_default_str();
  simulate->add_option("--bins", sim.bins, "Histogram cells")->check(CLI::Range(Index{1}, Index{1} << 16))->capture_default_str();
  simulate->add_option("--name", sim.name, "Output file prefix")->capture_default_str();

  ChainArgs ch;
  auto* chain = app.add_subcommand("chain", "Hull classification and trace CSV for a driving spec");
  chain->add_option("--driving", ch.driving, "uniform | dirac:<angle> | cosine:<a> | slabs:[...] | bm:<kappa>")
      ->capture_default_str();
  chain->add_option("--t", ch.t, "Capacity time in [0, 1]")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  chain->add_option("--probe", ch.probe, "Polar probe resolution")->check(CLI::Range(1, 1024))->capture_default_str();
  chain->add_option("--bins", ch.bins, "Density grid for spec measures")->check(CLI::Range(Index{1}, Index{1} << 14))->capture_default_str();
  chain->add_option("--trace", ch.trace_points, "Trace samples on [0, t] (0: no trace; point driving only)")
      ->check(CLI::Range(0, 100000))
      ->capture_default_str();
  chain->add_option("--rtol", ch.rtol, "Relative tolerance")->check(CLI::Range(1e-14, 1e-2))->capture_default_str();
  chain->add_option("--atol", ch.atol, "Absolute tolerance")->check(CLI::Range(1e-16, 1e-2))->capture_default_str();
  chain->add_flag("--interpolate", ch.interpolate, "Interpolate driving angles within sample intervals");
  chain->add_option("--name", ch.name, "Output file prefix")->capture_default_str();

  RateArgs ra;
  auto* rate = app.add_subcommand("rate", "Rate function values of a measure or energy of a driving measure");
  rate->add_option("--measure", ra.measure, "uniform | dirac:<angle> | cosine:<a> | bm:<kappa>");
  rate->add_option("--driving", ra.driving, "Driving spec; reports the energy");
  rate->add_option("--bins", ra.bins, "Density grid")->check(CLI::Range(Index{4}, Index{1} << 16))->capture_default_str();
  rate->add_option("--degree", ra.degree, "Trigonometric degree of the variational witness")
      ->check(CLI::Range(1, 64))
      ->capture_default_str();
  rate->add_option("--level", ra.level, "Also report the level-n rate (driving only)")
      ->check(CLI::Range(-1, kMaxLevel))
      ->capture_default_str();
  rate->add_flag("--regularize", ra.regularize, "Evaluate on density + 1e-8 (not certified)");
  rate->add_option("--name", ra.name, "Output file prefix")->capture_default_str();

  ProjectArgs pr;
  auto* projectc = app.add_subcommand("project", "Dyadic projection / embedding round trip and decay table");
  projectc->add_option("--driving", pr.driving, "Driving spec")->required();
  projectc->add_option("--level", pr.level, "Projection level")->check(CLI::Range(0, kMaxLevel))->capture_default_str();
  projectc->add_option("--depth", pr.depth, "dn_distance depth")->check(CLI::Range(0, kMaxLevel))->capture_default_str();
  projectc->add_option("--bins", pr.bins, "Density grid")->check(CLI::Range(Index{1}, Index{1} << 14))->capture_default_str();
  projectc->add_flag("--refine", pr.refine, "Allow slab layouts that are not dyadic at the level");
  projectc->add_option("--name", pr.name, "Output file prefix")->capture_default_str();

  auto add_common = [&](CLI::App* sub, ExperimentSpec& spec, std::string& name) {
    sub->add_option("--kappas", spec.kappas, "Comma-separated kappa list")->delimiter(',')->capture_default_str();
    sub->add_option("--replicas", spec.replicas, "Replicas per kappa")->check(CLI::Range(1, 100000000))->capture_default_str();
    sub->add_option("--bins", spec.bins, "Histogram cells")->check(CLI::Range(Index{4}, Index{1} << 16))->capture_default_str();
    sub->add_option("--min-steps", spec.min_steps, "Lower bound on path steps")
        ->check(CLI::Range(Index{1}, Index{1} << 28))
        ->capture_default_str();
    sub->add_option("--name", name, "Output file prefix")->capture_default_str();
  };

  ExperimentSpec lln_spec;
  std::string lln_name = "lln";
  auto* lln = app.add_subcommand("lln", "Average occupation versus uniform across kappa");
  add_common(lln, lln_spec, lln_name);
  lln->add_option("--depth", lln_spec.depth, "dn_distance depth")->check(CLI::Range(0, kMaxLevel))->capture_default_str();

  ExperimentSpec cc_spec;
  cc_spec.kind = ExperimentKind::chain_convergence;
  cc_spec.kappas = {16, 64, 256, 1024};
  cc_spec.replicas = 30;
  std::string cc_name = "chain_conv";
  auto* cc = app.add_subcommand("chain-conv", "Caratheodory distance of SLE chains to exp(-t) z");
  add_common(cc, cc_spec, cc_name);
  cc->add_option("--r-compact", cc_spec.r_compact, "Compact radius")->check(CLI::Range(1e-6, 0.999999))->capture_default_str();
  cc->add_option("--time-grid", cc_spec.time_grid, "Time grid intervals on [0, 1]")->check(CLI::Range(1, 4096))->capture_default_str();
  cc->add_option("--radial", cc_spec.probe_grid.radial, "Radial probe count")->check(CLI::Range(1, 1024))->capture_default_str();
  cc->add_option("--angular", cc_spec.probe_grid.angular, "Angular probe count")->check(CLI::Range(1, 4096))->capture_default_str();

  ExperimentSpec ldp_spec;
  ldp_spec.kind = ExperimentKind::ldp_slope;
  ldp_spec.kappas = {4, 8, 16, 32};
  ldp_spec.replicas = 100000;
  std::string ldp_name = "ldp";
  auto* ldp = app.add_subcommand("ldp", "Ball probabilities of the average occupation and their slope in kappa");
  add_common(ldp, ldp_spec, ldp_name);
  ldp->add_option("--target", ldp_spec.target, "Target measure spec")->capture_default_str();
  ldp->add_option("--eps", ldp_spec.epsilons, "Comma-separated W1 ball radii (>= 4 pi / bins)")
      ->delimiter(',')
      ->capture_default_str();

  ExperimentSpec fl_spec;
  fl_spec.kind = ExperimentKind::fluctuations;
  fl_spec.kappas = {1.0};
  fl_spec.replicas = 10000;
  fl_spec.bins = 64;
  std::string fl_name = "fluct";
  auto* fl = app.add_subcommand("fluct", "Covariance of the local-time fluctuation field");
  add_common(fl, fl_spec, fl_name);
  fl->add_option("--t", fl_spec.t_long, "Path length")->check(positive)->capture_default_str();
  fl->add_option("--theta-points", fl_spec.theta_points, "Grid points (must divide bins)")
      ->check(CLI::Range(1, 4096))
      ->capture_default_str();
  fl->add_option("--bridge-samples", fl_spec.bridge_samples, "Bridge samples for the oracle check")
      ->check(CLI::Range(Index{2}, Index{1} << 30))
      ->capture_default_str();
  fl->add_option("--bridge-steps", fl_spec.bridge_steps, "Bridge grid steps (even)")
      ->check(CLI::Range(Index{2}, Index{1} << 20))
      ->capture_default_str();

  auto* selftest = app.add_subcommand("selftest", "Run the fast invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const auto started = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (*simulate) code = run_simulate(g, sim);
    else if (*chain) code = run_chain(g, ch);
    else if (*rate) code = run_rate(g, ra);
    else if (*projectc) code = run_project(g, pr);
    else if (*lln) code = run_and_persist(g, lln_spec, lln_name);
    else if (*cc) code = run_and_persist(g, cc_spec, cc_name);
    else if (*ldp) code = run_and_persist(g, ldp_spec, ldp_name);
    else if (*fl) code = run_and_persist(g, fl_spec, fl_name);
    else if (*selftest) {
      for (const auto& c : run_selftest(g.workers)) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (!c.passed) std::cout << ": " << c.detail;
        std::cout << '\n';
        if (!c.passed) code = 2;
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 2;
  }
  if (g.verbose)
    std::cerr << "elapsed " << std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count()
              << " s\n";
  return code;
}
