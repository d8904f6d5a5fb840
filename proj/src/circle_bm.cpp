#include "llab/circle_bm.hpp"

#include <string>

#include "llab/rng.hpp"

namespace llab {

Index min_steps_for(double kappa, double t_max) {
  return std::max<Index>(1, static_cast<Index>(std::ceil(64.0 * kappa * t_max)));
}

CirclePath sample_circle_bm(double kappa, Index n_steps, double t_max, std::uint64_t seed) {
  require(n_steps >= 1, "sample_circle_bm: n_steps must be >= 1");
  require(std::isfinite(kappa) && kappa >= 0.0, "sample_circle_bm: kappa must be finite and >= 0");
  require(std::isfinite(t_max) && t_max > 0.0, "sample_circle_bm: t_max must be positive");

  CirclePath path;
  path.kappa = kappa;
  path.seed = seed;
  path.times.resize(n_steps + 1);
  path.angles.resize(n_steps + 1);
  const double dt = t_max / static_cast<double>(n_steps);
  const double sd = std::sqrt(kappa * dt);
  Rng rng(seed);
  path.times[0] = 0.0;
  path.angles[0] = 0.0;
  for (Index k = 1; k <= n_steps; ++k) {
    path.times[k] = static_cast<double>(k) * dt;
    path.angles[k] = path.angles[k - 1] + sd * rng.normal();
  }
  path.times[n_steps] = t_max;
  return path;
}

OccupationMeasure occupation_between(const CirclePath& path, double from, double to, Index m_bins) {
  require(m_bins >= 1, "occupation: m_bins must be >= 1");
  const double t_max = path.t_max();
  const double slack = 1e-12 * t_max;
  require(from >= -slack && from <= to && to <= t_max + slack,
          "occupation: window [" + std::to_string(from) + ", " + std::to_string(to) + "] outside [0, " +
              std::to_string(t_max) + "]");
  from = std::clamp(from, 0.0, t_max);
  to = std::clamp(to, 0.0, t_max);

  const Index n = path.steps();
  const double dt = path.dt();
  OccupationMeasure occ;
  occ.total_mass = to - from;
  occ.bins = Eigen::VectorXd::Zero(m_bins);
  if (to <= from) return occ;

  const Index first = std::min<Index>(static_cast<Index>(from / dt), n - 1);
  const Index last = std::min<Index>(static_cast<Index>(to / dt), n - 1);
  if (first == last) {
    occ.bins[bin_of(path.angles[first], m_bins)] += to - from;
    return occ;
  }
  // Whole steps are counted as integers and scaled once, so the total mass
  // carries O(1) rounding instead of O(steps).
  Eigen::Matrix<long long, Eigen::Dynamic, 1> counts = Eigen::Matrix<long long, Eigen::Dynamic, 1>::Zero(m_bins);
  for (Index k = first + 1; k < last; ++k) ++counts[bin_of(path.angles[k], m_bins)];
  occ.bins = counts.cast<double>() * dt;
  occ.bins[bin_of(path.angles[first], m_bins)] += std::max(0.0, static_cast<double>(first + 1) * dt - from);
  occ.bins[bin_of(path.angles[last], m_bins)] += std::max(0.0, to - static_cast<double>(last) * dt);
  return occ;
}

OccupationMeasure occupation_measure(const CirclePath& path, double t, Index m_bins) {
  return occupation_between(path, 0.0, t, m_bins);
}

MeasureS1 average_occupation(const OccupationMeasure& occ) {
  require(occ.total_mass > 0.0, "average_occupation: total mass must be positive");
  return MeasureS1::from_bins(occ.bins / occ.total_mass);
}

Eigen::VectorXd local_time_field(const CirclePath& path, double t, Index m_bins) {
  const auto occ = occupation_measure(path, t, m_bins);
  return occ.bins * (static_cast<double>(m_bins) / kTwoPi);
}

}  // namespace llab
