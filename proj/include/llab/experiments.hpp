#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "llab/loewner.hpp"
#include "llab/serialize.hpp"

namespace llab {

enum class ExperimentKind { lln, chain_convergence, ldp_slope, fluctuations };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_kind_from_string(const std::string& name);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::lln;
  std::vector<double> kappas{10.0, 100.0, 1000.0, 10000.0};
  int replicas = 100;
  std::uint64_t base_seed = 0;
  unsigned workers = 1;

  /// Histogram cells for occupation measures.
  Index bins = 256;
  /// Paths use max(min_steps, ceil(64 kappa t)) steps.
  Index min_steps = 1024;

  // lln
  int depth = 6;

  // chain_convergence
  double r_compact = 0.5;
  int time_grid = 8;
  CaratheodoryGrid probe_grid{};

  // ldp_slope
  std::string target = "cosine:0.5";
  std::vector<double> epsilons{0.08};

  // fluctuations (variance-1 paths run to t_long)
  double t_long = 200.0;
  int theta_points = 16;
  Index bridge_samples = 1000000;
  Index bridge_steps = 512;

  void validate() const;
};

Json to_json(const ExperimentSpec& spec);
ExperimentSpec experiment_spec_from_json(const Json& j);

struct ReplicaRecord {
  std::string config;
  double kappa = 0.0;
  int replica = 0;
  std::uint64_t seed = 0;
  std::map<std::string, double> metrics;
  /// Empty on success.
  std::string failure;

  friend bool operator==(const ReplicaRecord&, const ReplicaRecord&) = default;
};

struct SummaryRow {
  std::string config;
  double kappa = 0.0;
  std::string metric;
  double mean = 0.0;
  double standard_error = 0.0;
  int count = 0;

  friend bool operator==(const SummaryRow&, const SummaryRow&) = default;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<SummaryRow> summary;
  std::vector<ReplicaRecord> records;
  /// Kind-specific outputs (fits, covariance matrices, controls).
  Json extra = Json::object();
  /// Code version, timestamps, wall time.
  Json provenance = Json::object();

  const SummaryRow* find(const std::string& config, const std::string& metric) const;
};

/// Everything except provenance; equal for reruns of the same spec.
Json deterministic_json(const ExperimentResult& result);

ExperimentResult run_lln(const ExperimentSpec& spec);
ExperimentResult run_chain_convergence(const ExperimentSpec& spec);
ExperimentResult run_ldp_slope(const ExperimentSpec& spec);
ExperimentResult run_fluctuations(const ExperimentSpec& spec);
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Writes <prefix>.json (spec, summary, extra, provenance) and <prefix>.csv
/// (one row per replica record). Returns the two paths.
std::vector<std::filesystem::path> persist(const ExperimentResult& result, const std::filesystem::path& prefix);
ExperimentResult load_result(const std::filesystem::path& prefix);

/// Covariance of Y(theta) = 2 b(theta) - (1/pi) int_0^{2pi} b, b a Brownian
/// bridge on [0, 2pi], from the bridge covariance integrated in closed form.
double bridge_field_covariance(double theta, double phi);
/// Average of bridge_field_covariance over cell i x cell j of an m-cell grid.
double bridge_field_cell_covariance(Index i, Index j, Index m);
/// Monte Carlo variance of Y(pi) from discretized bridges.
double simulate_bridge_variance(Index samples, Index steps, std::uint64_t seed, unsigned workers = 1);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};
/// Least squares y = slope * x + intercept; needs two distinct x values.
std::optional<SlopeFit> fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace llab
