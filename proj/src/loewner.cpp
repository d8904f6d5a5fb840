#include "llab/loewner.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "llab/dormand_prince.hpp"

namespace llab {

DrivingSchedule DrivingSchedule::from_path(const CirclePath& path) {
  require(path.steps() >= 1, "DrivingSchedule: path has no steps");
  DrivingSchedule schedule;
  const Index n = path.steps();
  schedule.breaks_.assign(path.times.data(), path.times.data() + n + 1);
  schedule.angles_.assign(path.angles.data(), path.angles.data() + n + 1);
  schedule.offsets_.resize(n + 1);
  schedule.nodes_.resize(n);
  schedule.weights_.assign(n, 1.0);
  for (Index k = 0; k < n; ++k) {
    schedule.offsets_[k] = static_cast<std::size_t>(k);
    schedule.nodes_[k] = path.position(k);
  }
  schedule.offsets_[n] = static_cast<std::size_t>(n);
  schedule.widths_.assign(n, 0.0);
  schedule.point_driven_ = true;
  return schedule;
}

DrivingSchedule DrivingSchedule::from_measure(const DrivingMeasure& rho) {
  if (rho.is_path_backed()) return from_path(rho.path());
  const auto& slabs = rho.slabs();
  const Index count = rho.slab_count();
  DrivingSchedule schedule;
  schedule.point_driven_ = true;
  schedule.breaks_.resize(count + 1);
  schedule.widths_.assign(count, 0.0);
  schedule.offsets_.push_back(0);
  for (Index s = 0; s < count; ++s) {
    schedule.breaks_[s] = static_cast<double>(s) / static_cast<double>(count);
    const auto& slab = slabs[s];
    if (slab.is_atomic()) {
      for (const auto& atom : slab.atoms()) {
        schedule.nodes_.push_back(std::polar(1.0, atom.angle));
        schedule.weights_.push_back(atom.weight);
      }
      const bool single = slab.atoms().size() == 1;
      schedule.point_driven_ = schedule.point_driven_ && single;
      schedule.angles_.push_back(slab.atoms().front().angle);
    } else {
      const auto& masses = slab.bins();
      const Index m = masses.size();
      schedule.widths_[s] = kTwoPi / static_cast<double>(m);
      for (Index k = 0; k < m; ++k) {
        if (masses[k] == 0.0) continue;
        schedule.nodes_.push_back(std::polar(1.0, kTwoPi * static_cast<double>(k) / static_cast<double>(m)));
        schedule.weights_.push_back(masses[k]);
      }
      schedule.point_driven_ = false;
      schedule.angles_.push_back(0.0);
    }
    schedule.offsets_.push_back(schedule.nodes_.size());
  }
  schedule.breaks_[count] = 1.0;
  schedule.angles_.push_back(schedule.angles_.back());
  return schedule;
}

Index DrivingSchedule::piece_at(double t) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  const auto k = static_cast<Index>(it - breaks_.begin()) - 1;
  return std::clamp<Index>(k, 0, pieces() - 1);
}

Index DrivingSchedule::piece_before(double t) const {
  if (t <= 0.0) return 0;
  const auto it = std::lower_bound(breaks_.begin(), breaks_.end(), t);
  const auto k = static_cast<Index>(it - breaks_.begin()) - 1;
  return std::clamp<Index>(k, 0, pieces() - 1);
}

Complex DrivingSchedule::point(Index k, double t, bool interpolate) const {
  if (!interpolate) return nodes_[offsets_[k]];
  const double a = breaks_[k];
  const double b = breaks_[k + 1];
  const double lambda = b > a ? std::clamp((t - a) / (b - a), 0.0, 1.0) : 0.0;
  return std::polar(1.0, angles_[k] + lambda * (angles_[k + 1] - angles_[k]));
}

SubordinationChain::SubordinationChain(const DrivingMeasure& rho, double t_max, SolverSettings settings)
    : schedule_(DrivingSchedule::from_measure(rho)), t_max_(t_max), settings_(settings) {
  require(t_max > 0.0 && t_max <= schedule_.end_time() * (1.0 + 1e-12), "SubordinationChain: t_max beyond the driving");
}

SubordinationChain::SubordinationChain(const CirclePath& path, SolverSettings settings)
    : schedule_(DrivingSchedule::from_path(path)), t_max_(path.t_max()), settings_(settings) {}

Complex SubordinationChain::operator()(Complex z, double t) const { return inverse_map(*this, z, t); }

namespace {

/// sum_j w_j (zeta_j + y) / (zeta_j - y), with the kernel averaged over the
/// arc [zeta_j, zeta_j e^{i width}] when width > 0.
Complex herglotz_sum(Complex y, std::span<const Complex> nodes, std::span<const double> weights, double width) {
  Complex sum{};
  if (width == 0.0) {
    for (std::size_t j = 0; j < nodes.size(); ++j) sum += weights[j] * (nodes[j] + y) / (nodes[j] - y);
    return sum;
  }
  // Average over the arc: -1 + (2 / width) (darg - i log(|b - y| / |a - y|)),
  // where arg(zeta - y) increases by darg in (0, 2 pi) along the arc.
  const Complex turn = std::polar(1.0, width);
  double total = 0.0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const Complex a = nodes[j] - y;
    const Complex b = nodes[j] * turn - y;
    const Complex log_ratio = std::log(b / a);
    const double darg = log_ratio.imag() <= 0.0 ? log_ratio.imag() + kTwoPi : log_ratio.imag();
    sum += weights[j] * Complex{darg, -log_ratio.real()};
    total += weights[j];
  }
  return -total + (2.0 / width) * sum;
}

enum class PieceOutcome { reached_end, event, underflow };

/// Adaptive integration of y' = field(t, y) on [t, end] within one driving
/// piece. `stop_at` lists interior times that must be hit exactly; `on_stop`
/// is called at each. `event(t, y)` reports a blow-up.
template <typename Field, typename Point, typename Event, typename OnStop>
PieceOutcome integrate_piece(Field&& field, Point&& driving_point, Event&& event, OnStop&& on_stop,
                             std::span<const double> stop_at, std::size_t& next_stop, double& t, Complex& y,
                             double end, double& h, const SolverSettings& settings, bool point_driven, long& steps,
                             double& event_time) {
  Complex k1 = field(t, y);
  while (t < end) {
    double target = end;
    if (next_stop < stop_at.size() && stop_at[next_stop] < end) target = stop_at[next_stop];
    const double remaining = target - t;
    if (remaining <= 4 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
      t = target;
      if (target < end) on_stop(t, y), ++next_stop;
      continue;
    }
    double step = std::min({h, remaining, settings.max_step});
    if (point_driven) {
      const double gap = std::abs(y - driving_point(t));
      step = std::min(step, settings.step_cap_factor * gap * gap);
    }
    if (step < settings.min_step) return PieceOutcome::underflow;

    Complex k_next = k1;
    double error = 0.0;
    const Complex trial = dormand_prince_step(field, t, y, step, k_next, error);
    const double scale = settings.atol + settings.rtol * std::max(std::abs(y), std::abs(trial));
    const double scaled_error = std::isfinite(error) ? error / scale : 1e10;
    if (scaled_error > 1.0 || !std::isfinite(trial.real()) || !std::isfinite(trial.imag())) {
      h = next_step_size(step, std::min(scaled_error, 1e10));
      if (h < settings.min_step) return PieceOutcome::underflow;
      continue;
    }
    const bool hit_target = step == remaining;
    const double t_new = hit_target ? target : t + step;
    if (event(t_new, trial)) {
      if (step > settings.event_resolution) {
        h = step / 2;
        continue;
      }
      event_time = t_new;
      t = t_new;
      y = trial;
      ++steps;
      return PieceOutcome::event;
    }
    t = t_new;
    y = trial;
    k1 = k_next;
    ++steps;
    h = next_step_size(step, scaled_error);
    if (hit_target && target < end) {
      on_stop(t, y);
      ++next_stop;
    }
  }
  return PieceOutcome::reached_end;
}

}  // namespace

FlowResult forward_flow(const SubordinationChain& chain, Complex z, std::span<const double> output_times,
                        std::optional<double> t_end) {
  require(std::abs(z) < 1.0, "forward_flow: |z| must be < 1");
  const double horizon = t_end.value_or(chain.t_max());
  require(horizon >= 0.0 && horizon <= chain.t_max() * (1.0 + 1e-12), "forward_flow: t_end outside [0, t_max]");
  require(std::is_sorted(output_times.begin(), output_times.end()), "forward_flow: output times must be sorted");

  const auto& schedule = chain.schedule();
  const auto& settings = chain.settings();
  const bool point_driven = schedule.point_driven();

  FlowResult result;
  double t = 0.0;
  Complex g = z;
  double h = settings.initial_step;
  std::size_t next_out = 0;
  auto record = [&](double time, Complex value) {
    result.times.push_back(time);
    result.values.push_back(value);
  };
  while (next_out < output_times.size() && output_times[next_out] <= 0.0) record(0.0, g), ++next_out;

  for (Index k = schedule.piece_at(0.0); t < horizon && k < schedule.pieces(); ++k) {
    const double end = std::min(schedule.piece_end(k), horizon);
    if (end <= t) continue;
    const auto nodes = schedule.nodes(k);
    const auto weights = schedule.weights(k);
    const double width = schedule.cell_width(k);
    auto driving_point = [&](double time) { return schedule.point(k, time, settings.interpolate_angle); };
    auto field = [&](double time, Complex y) -> Complex {
      if (point_driven) {
        const Complex zeta = driving_point(time);
        return -y * (y + zeta) / (y - zeta);
      }
      return y * herglotz_sum(y, nodes, weights, width);
    };
    auto event = [&](double time, Complex y) {
      if (std::abs(y) > 1.0 - settings.tol_boundary) return true;
      return point_driven && std::abs(y - driving_point(time)) < settings.tol_singularity;
    };
    double event_time = 0.0;
    const auto outcome = integrate_piece(field, driving_point, event, record, output_times, next_out, t, g, end, h,
                                         settings, point_driven, result.steps, event_time);
    if (outcome == PieceOutcome::event) {
      result.status = FlowStatus::blown_up;
      result.survival_time = event_time;
      break;
    }
    if (outcome == PieceOutcome::underflow) {
      result.status = FlowStatus::step_underflow;
      break;
    }
  }
  if (result.status == FlowStatus::survived)
    while (next_out < output_times.size() && output_times[next_out] <= horizon) record(output_times[next_out++], g);
  result.final_time = t;
  result.final_value = g;
  return result;
}

Complex inverse_map(const SubordinationChain& chain, Complex z, double t) {
  require(std::abs(z) < 1.0, "inverse_map: |z| must be < 1");
  require(t >= 0.0 && t <= chain.t_max() * (1.0 + 1e-12), "inverse_map: t outside [0, t_max]");
  if (t == 0.0) return z;

  const auto& schedule = chain.schedule();
  const auto& settings = chain.settings();
  const bool point_driven = schedule.point_driven();

  double s = 0.0;
  Complex y = z;
  double h = settings.initial_step;
  long steps = 0;
  std::size_t no_stop = 0;
  auto ignore_stop = [](double, Complex) {};
  auto never = [](double, Complex) { return false; };

  for (Index k = schedule.piece_before(t); k >= 0; --k) {
    // Driving time tau = t - s; piece k spans s in [t - min(end_k, t), t - start_k].
    const double s_end = k == 0 ? t : std::min(t, t - schedule.piece_start(k));
    if (s_end <= s) continue;
    const auto nodes = schedule.nodes(k);
    const auto weights = schedule.weights(k);
    const double width = schedule.cell_width(k);
    auto driving_point = [&](double sigma) { return schedule.point(k, t - sigma, settings.interpolate_angle); };
    auto field = [&](double sigma, Complex w) -> Complex {
      if (point_driven) {
        const Complex zeta = driving_point(sigma);
        return w * (w + zeta) / (w - zeta);
      }
      return -w * herglotz_sum(w, nodes, weights, width);
    };
    double unused = 0.0;
    const auto outcome = integrate_piece(field, driving_point, never, ignore_stop, std::span<const double>{}, no_stop,
                                         s, y, s_end, h, settings, point_driven, steps, unused);
    if (outcome == PieceOutcome::underflow)
      throw SolverError("inverse_map: step size underflow at s = " + std::to_string(s) + " (t = " + std::to_string(t) +
                        ")");
  }
  return y;
}

HullGrid hull_grid(const SubordinationChain& chain, double t, int probe, unsigned workers) {
  require(probe >= 1, "hull_grid: probe resolution must be >= 1");
  require(t >= 0.0 && t <= chain.t_max() * (1.0 + 1e-12), "hull_grid: t outside [0, t_max]");
  HullGrid grid;
  grid.t = t;
  const auto n = static_cast<std::size_t>(probe);
  grid.probes.resize(n * n);
  parallel_for(n * n, workers, [&](std::size_t index) {
    const double radius = (static_cast<double>(index / n) + 0.5) / static_cast<double>(probe);
    const double angle = kTwoPi * static_cast<double>(index % n) / static_cast<double>(probe);
    const Complex z = std::polar(radius, angle);
    const auto flow = forward_flow(chain, z, {}, t);
    HullProbe& out = grid.probes[index];
    out.z = z;
    out.survival_time = flow.survival_time;
    switch (flow.status) {
      case FlowStatus::blown_up: out.status = ProbeStatus::swallowed; break;
      case FlowStatus::survived: out.status = ProbeStatus::alive; break;
      case FlowStatus::step_underflow: out.status = ProbeStatus::undetermined; break;
    }
  });
  for (const auto& p : grid.probes) {
    if (p.status == ProbeStatus::swallowed) ++grid.swallowed;
    else if (p.status == ProbeStatus::alive) ++grid.alive;
    else ++grid.undetermined;
  }
  return grid;
}

TracePoint trace_point(const SubordinationChain& chain, double t, double r, bool refine) {
  const auto& schedule = chain.schedule();
  require(schedule.point_driven(), "trace_point: chain is measure-driven; traces exist only for point driving");
  require(r >= 0.9 && r < 1.0, "trace_point: r must lie in [0.9, 1)");
  const Index k = schedule.piece_before(t);
  const Complex zeta = schedule.point(k, t, chain.settings().interpolate_angle);
  TracePoint out;
  out.point = inverse_map(chain, r * zeta, t);
  if (refine) {
    const Complex near = inverse_map(chain, 0.99 * zeta, t);
    const Complex nearer = inverse_map(chain, 0.999 * zeta, t);
    out.estimate = (10.0 * nearer - near) / 9.0;
    out.error_gauge = std::abs(nearer - near);
  }
  return out;
}

std::vector<Complex> compact_probes(double r_compact, const CaratheodoryGrid& grid) {
  require(grid.radial >= 1 && grid.angular >= 1, "compact_probes: grid resolution must be >= 1");
  std::vector<Complex> probes{Complex{0.0, 0.0}};
  for (int i = 1; i <= grid.radial; ++i)
    for (int j = 0; j < grid.angular; ++j)
      probes.push_back(std::polar(r_compact * i / grid.radial, kTwoPi * j / grid.angular));
  return probes;
}

namespace {

/// (F(h) - F(-h) - i (F(ih) - F(-ih))) / 4h; the cubic Taylor term cancels.
template <typename Map>
Complex cross_stencil(Map&& map, double h) {
  const Complex i{0.0, 1.0};
  return (map(Complex{h, 0.0}) - map(Complex{-h, 0.0}) - i * (map(i * h) - map(-i * h))) / (4.0 * h);
}

}  // namespace

Complex flow_derivative_at_origin(const SubordinationChain& chain, double t, double h) {
  require(h > 0.0 && h < 0.5, "flow_derivative_at_origin: h must lie in (0, 0.5)");
  return cross_stencil(
      [&](Complex z) {
        const auto flow = forward_flow(chain, z, {}, t);
        if (flow.status != FlowStatus::survived)
          throw SolverError("flow_derivative_at_origin: probe did not survive to t = " + std::to_string(t));
        return flow.final_value;
      },
      h);
}

Complex map_derivative_at_origin(const SubordinationChain& chain, double t, double h) {
  require(h > 0.0 && h < 0.5, "map_derivative_at_origin: h must lie in (0, 0.5)");
  return cross_stencil([&](Complex z) { return inverse_map(chain, z, t); }, h);
}

}  // namespace llab
