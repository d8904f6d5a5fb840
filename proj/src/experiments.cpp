#include "llab/experiments.hpp"

#include <chrono>
#include <ctime>
#include <iomanip>
#include <set>
#include <sstream>

#include "llab/driving_spec.hpp"
#include "llab/rng.hpp"

namespace llab {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::lln: return "lln";
    case ExperimentKind::chain_convergence: return "chain_convergence";
    case ExperimentKind::ldp_slope: return "ldp_slope";
    case ExperimentKind::fluctuations: return "fluctuations";
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (auto k : {ExperimentKind::lln, ExperimentKind::chain_convergence, ExperimentKind::ldp_slope,
                 ExperimentKind::fluctuations})
    if (name == to_string(k)) return k;
  throw ValidationError("unknown experiment kind '" + name + "'");
}

void ExperimentSpec::validate() const {
  require(replicas >= 1, "replicas must be >= 1");
  require(!kappas.empty(), "kappa list must not be empty");
  for (double k : kappas) require(std::isfinite(k) && k >= 0.0, "kappa values must be finite and >= 0");
  require(bins >= 4 && bins <= (Index{1} << 16), "bins must lie in [4, 65536]");
  require(min_steps >= 1, "min_steps must be >= 1");
  require(depth >= 0 && depth <= kMaxLevel, "depth must lie in [0, 12]");
  require(r_compact > 0.0 && r_compact < 1.0, "r_compact must lie in (0, 1)");
  require(time_grid >= 1, "time_grid must be >= 1");
  require(probe_grid.radial >= 1 && probe_grid.angular >= 1, "probe grid sizes must be >= 1");
  if (kind == ExperimentKind::ldp_slope) {
    require(!epsilons.empty(), "epsilon list must not be empty");
    const double floor = 2.0 * kTwoPi / static_cast<double>(bins);
    for (double e : epsilons)
      require(e >= floor, "epsilon must be >= 4 pi / bins = " + format_double(floor) + " (metric grid error)");
  }
  if (kind == ExperimentKind::fluctuations) {
    require(t_long > 0.0, "t_long must be > 0");
    require(theta_points >= 1 && bins % theta_points == 0, "theta_points must divide bins");
    require(bridge_samples >= 2 && bridge_steps >= 2 && bridge_steps % 2 == 0,
            "bridge_samples >= 2 and an even bridge_steps >= 2 are required");
  }
}

Json to_json(const ExperimentSpec& s) {
  return {{"kind", to_string(s.kind)},
          {"kappas", s.kappas},
          {"replicas", s.replicas},
          {"base_seed", s.base_seed},
          {"workers", s.workers},
          {"bins", s.bins},
          {"min_steps", s.min_steps},
          {"depth", s.depth},
          {"r_compact", s.r_compact},
          {"time_grid", s.time_grid},
          {"probe_radial", s.probe_grid.radial},
          {"probe_angular", s.probe_grid.angular},
          {"target", s.target},
          {"epsilons", s.epsilons},
          {"t_long", s.t_long},
          {"theta_points", s.theta_points},
          {"bridge_samples", s.bridge_samples},
          {"bridge_steps", s.bridge_steps}};
}

ExperimentSpec experiment_spec_from_json(const Json& j) {
  ExperimentSpec s;
  s.kind = experiment_kind_from_string(j.at("kind").get<std::string>());
  s.kappas = j.at("kappas").get<std::vector<double>>();
  s.replicas = j.at("replicas").get<int>();
  s.base_seed = j.at("base_seed").get<std::uint64_t>();
  s.workers = j.at("workers").get<unsigned>();
  s.bins = j.at("bins").get<Index>();
  s.min_steps = j.at("min_steps").get<Index>();
  s.depth = j.at("depth").get<int>();
  s.r_compact = j.at("r_compact").get<double>();
  s.time_grid = j.at("time_grid").get<int>();
  s.probe_grid.radial = j.at("probe_radial").get<int>();
  s.probe_grid.angular = j.at("probe_angular").get<int>();
  s.target = j.at("target").get<std::string>();
  s.epsilons = j.at("epsilons").get<std::vector<double>>();
  s.t_long = j.at("t_long").get<double>();
  s.theta_points = j.at("theta_points").get<int>();
  s.bridge_samples = j.at("bridge_samples").get<Index>();
  s.bridge_steps = j.at("bridge_steps").get<Index>();
  return s;
}

const SummaryRow* ExperimentResult::find(const std::string& config, const std::string& metric) const {
  for (const auto& row : summary)
    if (row.config == config && row.metric == metric) return &row;
  return nullptr;
}

namespace {

std::string config_label(double kappa) { return "kappa=" + format_double(kappa); }

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

Index path_steps(const ExperimentSpec& spec, double kappa, double t) {
  return std::max(spec.min_steps, min_steps_for(kappa, t));
}

/// Runs body(record) for every (kappa, replica) pair; records are laid out
/// kappa-major and filled in place, failures are captured per record.
template <typename Body>
std::vector<ReplicaRecord> run_replicas(const ExperimentSpec& spec, Body&& body) {
  const std::size_t per_config = static_cast<std::size_t>(spec.replicas);
  std::vector<ReplicaRecord> records(spec.kappas.size() * per_config);
  for (std::size_t c = 0; c < spec.kappas.size(); ++c) {
    for (std::size_t r = 0; r < per_config; ++r) {
      auto& rec = records[c * per_config + r];
      rec.config = config_label(spec.kappas[c]);
      rec.kappa = spec.kappas[c];
      rec.replica = static_cast<int>(r);
      rec.seed = stream_seed(spec.base_seed, r);
    }
  }
  parallel_for(records.size(), spec.workers, [&](std::size_t i) {
    try {
      body(records[i]);
    } catch (const std::exception& e) {
      records[i].metrics.clear();
      records[i].failure = e.what();
    }
  });
  return records;
}

std::vector<SummaryRow> summarize(const ExperimentSpec& spec, const std::vector<ReplicaRecord>& records) {
  std::vector<SummaryRow> rows;
  for (double kappa : spec.kappas) {
    const std::string label = config_label(kappa);
    std::set<std::string> names;
    for (const auto& rec : records)
      if (rec.config == label)
        for (const auto& [name, v] : rec.metrics) names.insert(name);
    for (const auto& name : names) {
      std::vector<double> values;
      for (const auto& rec : records) {
        if (rec.config != label || !rec.failure.empty()) continue;
        auto it = rec.metrics.find(name);
        if (it != rec.metrics.end() && std::isfinite(it->second)) values.push_back(it->second);
      }
      SummaryRow row{label, kappa, name, 0.0, 0.0, static_cast<int>(values.size())};
      if (!values.empty()) {
        const Eigen::Map<const Eigen::VectorXd> v(values.data(), static_cast<Index>(values.size()));
        row.mean = v.mean();
        if (values.size() > 1) {
          const double var = (v.array() - row.mean).square().sum() / static_cast<double>(values.size() - 1);
          row.standard_error = std::sqrt(var / static_cast<double>(values.size()));
        }
      }
      rows.push_back(row);
    }
  }
  return rows;
}

ExperimentResult finish(const ExperimentSpec& spec, std::vector<ReplicaRecord> records, Json extra,
                        const std::string& started, std::chrono::steady_clock::time_point t0) {
  ExperimentResult result;
  result.spec = spec;
  result.summary = summarize(spec, records);
  result.records = std::move(records);
  result.extra = std::move(extra);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Index failures = 0;
  for (const auto& rec : result.records) failures += rec.failure.empty() ? 0 : 1;
  result.extra["failed_records"] = failures;
  result.provenance = {{"code_version", LLAB_VERSION}, {"started_utc", started}, {"finished_utc", utc_now()},
                       {"wall_seconds", wall}};
  return result;
}

void check_kind(const ExperimentSpec& spec, ExperimentKind kind) {
  require(spec.kind == kind, std::string("experiment kind mismatch: expected ") + to_string(kind));
  spec.validate();
}

}  // namespace

ExperimentResult run_lln(const ExperimentSpec& spec) {
  check_kind(spec, ExperimentKind::lln);
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const auto uniform_measure = MeasureS1::uniform(spec.bins);
  const auto uniform_driving = DrivingMeasure::uniform(spec.bins);
  auto records = run_replicas(spec, [&](ReplicaRecord& rec) {
    const auto path = sample_circle_bm(rec.kappa, path_steps(spec, rec.kappa, 1.0), 1.0, rec.seed);
    const auto average = average_occupation(occupation_measure(path, 1.0, spec.bins));
    rec.metrics["w1_to_uniform"] = w1_circle(average, uniform_measure);
    rec.metrics["dn_to_uniform"] = dn_distance(dirac_path_measure(path, spec.bins), uniform_driving, spec.depth);
  });
  return finish(spec, std::move(records), Json::object(), started, t0);
}

ExperimentResult run_chain_convergence(const ExperimentSpec& spec) {
  check_kind(spec, ExperimentKind::chain_convergence);
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  auto records = run_replicas(spec, [&](ReplicaRecord& rec) {
    const auto path = sample_circle_bm(rec.kappa, path_steps(spec, rec.kappa, 1.0), 1.0, rec.seed);
    const SubordinationChain chain(path);
    rec.metrics["distance_to_decay"] =
        caratheodory_distance(chain, DecayChain{}, spec.r_compact, spec.time_grid, spec.probe_grid);
  });
  const SubordinationChain control(DrivingMeasure::uniform(spec.bins));
  Json extra;
  extra["uniform_control_distance"] =
      caratheodory_distance(control, DecayChain{}, spec.r_compact, spec.time_grid, spec.probe_grid, spec.workers);
  return finish(spec, std::move(records), std::move(extra), started, t0);
}

std::optional<SlopeFit> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size(), "fit_line: size mismatch");
  if (x.size() < 2) return std::nullopt;
  const Eigen::Map<const Eigen::VectorXd> xs(x.data(), static_cast<Index>(x.size()));
  const Eigen::Map<const Eigen::VectorXd> ys(y.data(), static_cast<Index>(y.size()));
  const double mx = xs.mean();
  const double my = ys.mean();
  const double sxx = (xs.array() - mx).square().sum();
  if (sxx <= 0.0) return std::nullopt;
  const double sxy = ((xs.array() - mx) * (ys.array() - my)).sum();
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.points = static_cast<int>(x.size());
  return fit;
}

namespace {

std::string hit_metric(double epsilon) { return "hit[eps=" + format_double(epsilon) + "]"; }

}  // namespace

ExperimentResult run_ldp_slope(const ExperimentSpec& spec) {
  check_kind(spec, ExperimentKind::ldp_slope);
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();
  const auto target = parse_measure_spec(spec.target, SpecContext{spec.bins, spec.base_seed, spec.min_steps});
  require(target.is_binned(), "ldp target must be a density");
  const auto target_rate = dirichlet_rate(target);
  require(target_rate.value.is_finite(), "ldp target must have a finite rate");

  auto records = run_replicas(spec, [&](ReplicaRecord& rec) {
    const auto path = sample_circle_bm(rec.kappa, path_steps(spec, rec.kappa, 1.0), 1.0, rec.seed);
    const auto average = average_occupation(occupation_measure(path, 1.0, spec.bins));
    const double distance = w1_circle(average, target);
    rec.metrics["w1_to_target"] = distance;
    for (double eps : spec.epsilons) rec.metrics[hit_metric(eps)] = distance < eps ? 1.0 : 0.0;
  });

  Json extra;
  extra["target_rate"] = target_rate.value.value();
  extra["target_rate_note"] = "the infimum of the rate over the ball is bounded above by the target rate";
  Json fits = Json::array();
  for (double eps : spec.epsilons) {
    Json table = Json::array();
    std::vector<double> xs, ys;
    for (std::size_t c = 0; c < spec.kappas.size(); ++c) {
      const double kappa = spec.kappas[c];
      Index hits = 0, valid = 0;
      for (const auto& rec : records) {
        if (rec.kappa != kappa || !rec.failure.empty()) continue;
        ++valid;
        hits += rec.metrics.at(hit_metric(eps)) > 0.5 ? 1 : 0;
      }
      Json row{{"kappa", kappa}, {"hits", hits}, {"replicas", valid}};
      if (hits == 0 || valid == 0) {
        row["censored"] = true;
        row["p_upper_bound"] = valid > 0 ? 1.0 / static_cast<double>(valid) : 1.0;
      } else {
        const double p = static_cast<double>(hits) / static_cast<double>(valid);
        row["censored"] = false;
        row["p"] = p;
        row["neg_log_p"] = -std::log(p);
        row["neg_log_p_over_kappa"] = kappa > 0.0 ? -std::log(p) / kappa : 0.0;
        xs.push_back(kappa);
        ys.push_back(-std::log(p));
      }
      table.push_back(row);
    }
    Json fit{{"epsilon", eps}, {"table", table}};
    if (const auto line = fit_line(xs, ys)) {
      fit["slope"] = line->slope;
      fit["intercept"] = line->intercept;
      fit["fit_points"] = line->points;
      fit["slope_over_rate"] = line->slope / target_rate.value.value();
    } else {
      fit["slope"] = nullptr;
      fit["fit_points"] = static_cast<int>(xs.size());
    }
    fits.push_back(fit);
  }
  extra["fits"] = fits;
  return finish(spec, std::move(records), std::move(extra), started, t0);
}

double bridge_field_covariance(double theta, double phi) {
  constexpr double pi = std::numbers::pi;
  // K(s,u) = min(s,u) - s u / 2pi, G(s) = int_0^{2pi} K(s,tau) dtau, H = int int K.
  const auto K = [](double s, double u) { return std::min(s, u) - s * u / kTwoPi; };
  const auto G = [](double s) { return pi * s - 0.5 * s * s; };
  const double H = 2.0 * pi * pi * pi / 3.0;
  return 4.0 * K(theta, phi) - (2.0 / pi) * (G(theta) + G(phi)) + H / (pi * pi);
}

double bridge_field_cell_covariance(Index i, Index j, Index m) {
  constexpr int sub = 64;
  const double width = kTwoPi / static_cast<double>(m);
  double sum = 0.0;
  for (int a = 0; a < sub; ++a) {
    const double theta = (static_cast<double>(i) + (a + 0.5) / sub) * width;
    for (int b = 0; b < sub; ++b) {
      const double phi = (static_cast<double>(j) + (b + 0.5) / sub) * width;
      sum += bridge_field_covariance(theta, phi);
    }
  }
  return sum / (sub * sub);
}

double simulate_bridge_variance(Index samples, Index steps, std::uint64_t seed, unsigned workers) {
  require(samples >= 2 && steps >= 2 && steps % 2 == 0, "simulate_bridge_variance: bad sizes");
  constexpr std::size_t chunks = 64;
  std::vector<double> sums(chunks, 0.0), squares(chunks, 0.0);
  const double h = kTwoPi / static_cast<double>(steps);
  const double sd = std::sqrt(h);
  parallel_for(chunks, workers, [&](std::size_t c) {
    Rng rng(stream_seed(seed, c));
    const Index begin = samples * static_cast<Index>(c) / static_cast<Index>(chunks);
    const Index end = samples * static_cast<Index>(c + 1) / static_cast<Index>(chunks);
    Eigen::VectorXd walk(steps + 1);
    for (Index s = begin; s < end; ++s) {
      walk[0] = 0.0;
      for (Index k = 1; k <= steps; ++k) walk[k] = walk[k - 1] + sd * rng.normal();
      const double last = walk[steps];
      double integral = 0.0;
      for (Index k = 0; k <= steps; ++k) {
        const double b = walk[k] - last * static_cast<double>(k) / static_cast<double>(steps);
        integral += (k == 0 || k == steps ? 0.5 : 1.0) * b;
      }
      integral *= h;
      const double mid = walk[steps / 2] - 0.5 * last;
      const double y = 2.0 * mid - integral / std::numbers::pi;
      sums[c] += y;
      squares[c] += y * y;
    }
  });
  double sum = 0.0, square = 0.0;
  for (std::size_t c = 0; c < chunks; ++c) {
    sum += sums[c];
    square += squares[c];
  }
  const double n = static_cast<double>(samples);
  return (square - sum * sum / n) / (n - 1.0);
}

ExperimentResult run_fluctuations(const ExperimentSpec& spec) {
  check_kind(spec, ExperimentKind::fluctuations);
  const auto started = utc_now();
  const auto t0 = std::chrono::steady_clock::now();

  const double analytic_var = bridge_field_covariance(std::numbers::pi, std::numbers::pi);
  const double simulated_var = simulate_bridge_variance(spec.bridge_samples, spec.bridge_steps,
                                                        stream_seed(spec.base_seed, 0xb1d9e), spec.workers);
  const double oracle_gap = std::abs(simulated_var - analytic_var) / analytic_var;
  Json extra;
  extra["oracle"] = {{"analytic_var_y_pi", analytic_var},
                     {"simulated_var_y_pi", simulated_var},
                     {"relative_gap", oracle_gap},
                     {"tolerance", 0.005}};
  if (oracle_gap > 0.005)
    throw SolverError("bridge oracle disagreement " + format_double(oracle_gap) + " exceeds 0.5%");

  const Index m = spec.bins;
  const Index stride = m / spec.theta_points;
  const int g = spec.theta_points;
  auto metric_name = [](int j) {
    std::ostringstream os;
    os << 'x' << std::setw(3) << std::setfill('0') << j;
    return os.str();
  };
  auto records = run_replicas(spec, [&](ReplicaRecord& rec) {
    const auto path = sample_circle_bm(rec.kappa, path_steps(spec, rec.kappa, spec.t_long), spec.t_long, rec.seed);
    const auto field = local_time_field(path, spec.t_long, m);
    const double root_t = std::sqrt(spec.t_long);
    for (int j = 0; j < g; ++j)
      rec.metrics[metric_name(j)] = root_t * (field[j * stride] / spec.t_long - 1.0 / kTwoPi);
  });

  Json per_kappa = Json::array();
  for (double kappa : spec.kappas) {
    std::vector<const ReplicaRecord*> ok;
    for (const auto& rec : records)
      if (rec.kappa == kappa && rec.failure.empty()) ok.push_back(&rec);
    Json entry{{"kappa", kappa}, {"samples", ok.size()}};
    if (ok.size() >= 2) {
      Eigen::MatrixXd x(static_cast<Index>(ok.size()), g);
      for (std::size_t r = 0; r < ok.size(); ++r)
        for (int j = 0; j < g; ++j) x(static_cast<Index>(r), j) = ok[r]->metrics.at(metric_name(j));
      const Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
      const Eigen::MatrixXd empirical = centered.transpose() * centered / static_cast<double>(ok.size() - 1);
      Eigen::MatrixXd analytic(g, g);
      for (int a = 0; a < g; ++a)
        for (int b = 0; b < g; ++b) analytic(a, b) = bridge_field_cell_covariance(a * stride, b * stride, m);
      // The local-time field of a variance-1 path carries an extra 1/2pi against Y.
      const Eigen::MatrixXd rescaled = analytic / kTwoPi;
      const auto rel = [&](const Eigen::MatrixXd& ref) {
        return (empirical - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff();
      };
      auto rows = [](const Eigen::MatrixXd& mat) {
        Json out = Json::array();
        for (Index r = 0; r < mat.rows(); ++r) {
          std::vector<double> row(mat.cols());
          for (Index c = 0; c < mat.cols(); ++c) row[c] = mat(r, c);
          out.push_back(row);
        }
        return out;
      };
      entry["empirical_covariance"] = rows(empirical);
      entry["analytic_covariance"] = rows(analytic);
      entry["max_relative_error"] = rel(analytic);
      entry["max_relative_error_rescaled"] = rel(rescaled);
    }
    per_kappa.push_back(entry);
  }
  std::vector<double> thetas;
  for (int j = 0; j < g; ++j) thetas.push_back(bin_center(j * stride, m));
  extra["theta_grid"] = thetas;
  extra["covariance"] = per_kappa;
  extra["relative_error_definition"] = "max |empirical - analytic| / max |analytic| over the grid";
  return finish(spec, std::move(records), std::move(extra), started, t0);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::lln: return run_lln(spec);
    case ExperimentKind::chain_convergence: return run_chain_convergence(spec);
    case ExperimentKind::ldp_slope: return run_ldp_slope(spec);
    case ExperimentKind::fluctuations: return run_fluctuations(spec);
  }
  throw ValidationError("unknown experiment kind");
}

Json deterministic_json(const ExperimentResult& result) {
  Json summary = Json::array();
  for (const auto& row : result.summary)
    summary.push_back({{"config", row.config},
                       {"kappa", row.kappa},
                       {"metric", row.metric},
                       {"mean", row.mean},
                       {"standard_error", row.standard_error},
                       {"count", row.count}});
  return {{"kind", "ExperimentResult"}, {"schema_version", kSchemaVersion}, {"spec", to_json(result.spec)},
          {"summary", summary},         {"extra", result.extra}};
}

namespace {

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> csv_split(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

}  // namespace

std::vector<std::filesystem::path> persist(const ExperimentResult& result, const std::filesystem::path& prefix) {
  Json j = deterministic_json(result);
  j["provenance"] = result.provenance;
  std::filesystem::path json_path = prefix;
  json_path += ".json";
  std::filesystem::path csv_path = prefix;
  csv_path += ".csv";
  write_text_file(json_path, j.dump(2) + "\n");

  std::set<std::string> names;
  for (const auto& rec : result.records)
    for (const auto& [name, v] : rec.metrics) names.insert(name);
  std::ostringstream csv;
  csv << "config,kappa,replica,seed";
  for (const auto& n : names) csv << ',' << csv_quote(n);
  csv << ",failure\n";
  for (const auto& rec : result.records) {
    csv << csv_quote(rec.config) << ',' << format_double(rec.kappa) << ',' << rec.replica << ',' << rec.seed;
    for (const auto& n : names) {
      csv << ',';
      if (auto it = rec.metrics.find(n); it != rec.metrics.end()) csv << format_double(it->second);
    }
    csv << ',' << csv_quote(rec.failure) << '\n';
  }
  write_text_file(csv_path, csv.str());
  return {json_path, csv_path};
}

ExperimentResult load_result(const std::filesystem::path& prefix) {
  std::filesystem::path json_path = prefix;
  json_path += ".json";
  std::filesystem::path csv_path = prefix;
  csv_path += ".csv";
  const Json j = Json::parse(read_text_file(json_path));
  require(j.value("kind", std::string()) == "ExperimentResult" && j.value("schema_version", 0) == kSchemaVersion,
          "not an ExperimentResult (schema " + std::to_string(kSchemaVersion) + "): " + json_path.string());
  ExperimentResult result;
  result.spec = experiment_spec_from_json(j.at("spec"));
  for (const auto& row : j.at("summary"))
    result.summary.push_back({row.at("config").get<std::string>(), row.at("kappa").get<double>(),
                              row.at("metric").get<std::string>(), row.at("mean").get<double>(),
                              row.at("standard_error").get<double>(), row.at("count").get<int>()});
  result.extra = j.at("extra");
  result.provenance = j.value("provenance", Json::object());

  std::istringstream csv(read_text_file(csv_path));
  std::string line;
  require(static_cast<bool>(std::getline(csv, line)), "empty CSV: " + csv_path.string());
  const auto header = csv_split(line);
  require(header.size() >= 5 && header.back() == "failure", "malformed CSV header: " + csv_path.string());
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto cells = csv_split(line);
    require(cells.size() == header.size(), "malformed CSV row in " + csv_path.string());
    ReplicaRecord rec;
    rec.config = cells[0];
    rec.kappa = parse_double(cells[1]);
    rec.replica = std::stoi(cells[2]);
    rec.seed = std::stoull(cells[3]);
    for (std::size_t c = 4; c + 1 < cells.size(); ++c)
      if (!cells[c].empty()) rec.metrics[header[c]] = parse_double(cells[c]);
    rec.failure = cells.back();
    result.records.push_back(std::move(rec));
  }
  return result;
}

}  // namespace llab
