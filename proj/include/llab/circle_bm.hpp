#pragma once

#include <complex>
#include <cstdint>

#include "llab/measure_s1.hpp"

namespace llab {

/// Sampled circular Brownian motion zeta_t = exp(i W_{kappa t}) on a uniform
/// grid. Angles are stored unwrapped; angles[0] = 0.
struct CirclePath {
  double kappa = 0.0;
  Eigen::VectorXd times;
  Eigen::VectorXd angles;
  std::uint64_t seed = 0;

  Index steps() const { return times.size() - 1; }
  double t_max() const { return times[times.size() - 1]; }
  double dt() const { return t_max() / static_cast<double>(steps()); }
  std::complex<double> position(Index k) const { return std::polar(1.0, angles[k]); }
};

/// Time steps needed so that kappa * dt <= (pi/8)^2, i.e. ceil(64 kappa t_max).
Index min_steps_for(double kappa, double t_max);

CirclePath sample_circle_bm(double kappa, Index n_steps, double t_max, std::uint64_t seed);

/// Time spent in each cell. Step k contributes the part of [t_k, t_{k+1}]
/// inside the window to the cell of angles[k].
struct OccupationMeasure {
  double total_mass = 0.0;
  Eigen::VectorXd bins;
};

OccupationMeasure occupation_between(const CirclePath& path, double from, double to, Index m_bins);
OccupationMeasure occupation_measure(const CirclePath& path, double t, Index m_bins);

/// t^{-1} times the occupation measure.
MeasureS1 average_occupation(const OccupationMeasure& occ);

/// Occupation mass per unit arc length; integrates to t over the circle.
Eigen::VectorXd local_time_field(const CirclePath& path, double t, Index m_bins);

}  // namespace llab
