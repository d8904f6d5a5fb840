#pragma once

#include <complex>
#include <concepts>
#include <optional>
#include <span>
#include <vector>

#include "llab/driving.hpp"
#include "llab/parallel.hpp"

namespace llab {

using Complex = std::complex<double>;

struct SolverSettings {
  double rtol = 1e-10;
  double atol = 1e-14;
  double initial_step = 1e-3;
  double max_step = 0.05;
  double min_step = 1e-15;
  /// Blow-up triggers: |g - zeta_t| below tol_singularity (point driving) or
  /// |g| above 1 - tol_boundary.
  double tol_singularity = 1e-5;
  double tol_boundary = 1e-6;
  /// Point driving caps the step at step_cap_factor * |g - zeta|^2: the
  /// field grows like 2/|g - zeta| near the driving point.
  double step_cap_factor = 0.25;
  /// Crossing times are bisected down to this step length.
  double event_resolution = 1e-11;
  /// Linearly interpolate driving angles inside a sample interval instead of
  /// holding the left value.
  bool interpolate_angle = false;
};

/// Driving measure as a sequence of time pieces, each a finite set of
/// weighted nodes on the unit circle. Density slabs contribute one arc per
/// cell (node = left endpoint) whose kernel is averaged exactly over the arc;
/// atoms and paths contribute point nodes.
class DrivingSchedule {
 public:
  static DrivingSchedule from_measure(const DrivingMeasure& rho);
  static DrivingSchedule from_path(const CirclePath& path);

  Index pieces() const { return static_cast<Index>(breaks_.size()) - 1; }
  double end_time() const { return breaks_.back(); }
  double piece_start(Index k) const { return breaks_[k]; }
  double piece_end(Index k) const { return breaks_[k + 1]; }
  /// Every piece is a single unit-weight node.
  bool point_driven() const { return point_driven_; }

  /// Piece containing t, with pieces half-open on the right.
  Index piece_at(double t) const;
  /// Piece active just before t (piece 0 for t = 0).
  Index piece_before(double t) const;

  std::span<const Complex> nodes(Index k) const {
    return {nodes_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
  }
  std::span<const double> weights(Index k) const {
    return {weights_.data() + offsets_[k], offsets_[k + 1] - offsets_[k]};
  }

  /// Arc length of each cell of piece k, or 0 when its nodes are points.
  double cell_width(Index k) const { return widths_[k]; }

  /// Driving point at time t inside piece k (point-driven schedules only).
  Complex point(Index k, double t, bool interpolate) const;

 private:
  std::vector<double> breaks_;
  std::vector<std::size_t> offsets_;
  std::vector<Complex> nodes_;
  std::vector<double> weights_;
  std::vector<double> angles_;
  std::vector<double> widths_;
  bool point_driven_ = false;
};

/// Normalized chain of subordinations f(z, t) = f_t(z) generated by a driving
/// measure or path. Evaluation integrates the reverse flow per query.
class SubordinationChain {
 public:
  explicit SubordinationChain(const DrivingMeasure& rho, double t_max = 1.0, SolverSettings settings = {});
  explicit SubordinationChain(const CirclePath& path, SolverSettings settings = {});

  double t_max() const { return t_max_; }
  const SolverSettings& settings() const { return settings_; }
  const DrivingSchedule& schedule() const { return schedule_; }

  /// f_t(z).
  Complex operator()(Complex z, double t) const;

 private:
  DrivingSchedule schedule_;
  double t_max_;
  SolverSettings settings_;
};

/// The flat-driving limit chain f(z, t) = e^{-t} z.
struct DecayChain {
  Complex operator()(Complex z, double t) const { return std::exp(-t) * z; }
};

template <typename C>
concept LoewnerChain = requires(const C& chain, Complex z, double t) {
  { chain(z, t) } -> std::convertible_to<Complex>;
};

enum class FlowStatus { survived, blown_up, step_underflow };

struct FlowResult {
  FlowStatus status = FlowStatus::survived;
  /// T_z; empty when z survives past the integration horizon.
  std::optional<double> survival_time;
  /// g_t(z) at the requested output times reached before blow-up.
  std::vector<double> times;
  std::vector<Complex> values;
  double final_time = 0.0;
  Complex final_value{};
  long steps = 0;

  bool blowup() const { return status == FlowStatus::blown_up; }
};

/// Integrates dg/dt = -g * sum_j w_j (g + zeta_j)/(g - zeta_j) from g_0 = z.
/// `output_times` must be sorted; integration stops at `t_end` (default t_max).
FlowResult forward_flow(const SubordinationChain& chain, Complex z, std::span<const double> output_times = {},
                        std::optional<double> t_end = std::nullopt);

/// f_t(z) by the reverse flow dh/ds = +h * sum_j w_j (h + zeta_j)/(h - zeta_j)
/// driven by zeta_{t-s}, s in [0, t], h_0 = z.
Complex inverse_map(const SubordinationChain& chain, Complex z, double t);

/// g_t'(0) from forward flows of the four points +-h, +-ih.
Complex flow_derivative_at_origin(const SubordinationChain& chain, double t, double h = 1e-3);
/// f_t'(0) by the same stencil on the inverse map.
Complex map_derivative_at_origin(const SubordinationChain& chain, double t, double h = 1e-3);

enum class ProbeStatus { alive, swallowed, undetermined };

struct HullProbe {
  Complex z;
  std::optional<double> survival_time;
  ProbeStatus status;
};

struct HullGrid {
  double t = 0.0;
  std::vector<HullProbe> probes;
  Index swallowed = 0;
  Index alive = 0;
  Index undetermined = 0;
};

/// Polar probe grid: radii (i + 1/2)/probe, angles 2 pi j/probe.
HullGrid hull_grid(const SubordinationChain& chain, double t, int probe, unsigned workers = 1);

struct TracePoint {
  Complex point;
  /// Richardson-style extrapolation from r = 0.99 and r = 0.999 (refined calls only).
  std::optional<Complex> estimate;
  /// |f_t(0.999 zeta_t) - f_t(0.99 zeta_t)| (refined calls only).
  std::optional<double> error_gauge;
};

/// f_t(r zeta_t) for point-driven chains.
TracePoint trace_point(const SubordinationChain& chain, double t, double r, bool refine = false);

struct CaratheodoryGrid {
  int radial = 4;
  int angular = 16;
};

/// Probe set of the compact {|z| <= r_compact}: the origin plus a polar grid.
std::vector<Complex> compact_probes(double r_compact, const CaratheodoryGrid& grid);

/// max over z in the compact probe set and t in {j / time_grid} of |f_a(z,t) - f_b(z,t)|.
template <LoewnerChain A, LoewnerChain B>
double caratheodory_distance(const A& a, const B& b, double r_compact, int time_grid, CaratheodoryGrid grid = {},
                             unsigned workers = 1) {
  require(r_compact > 0.0 && r_compact < 1.0, "caratheodory_distance: r_compact must lie in (0, 1)");
  require(time_grid >= 1, "caratheodory_distance: time_grid must be >= 1");
  const auto probes = compact_probes(r_compact, grid);
  const std::size_t per_time = probes.size();
  const std::size_t tasks = per_time * static_cast<std::size_t>(time_grid + 1);
  std::vector<double> gaps(tasks, 0.0);
  parallel_for(tasks, workers, [&](std::size_t task) {
    const double t = static_cast<double>(task / per_time) / static_cast<double>(time_grid);
    const Complex z = probes[task % per_time];
    gaps[task] = std::abs(a(z, t) - b(z, t));
  });
  double worst = 0.0;
  for (double gap : gaps) worst = std::max(worst, gap);
  return worst;
}

}  // namespace llab
