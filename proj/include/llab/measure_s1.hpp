#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <variant>
#include <vector>

#include "llab/errors.hpp"

namespace llab {

using Index = Eigen::Index;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Grid used when two purely atomic measures are compared.
inline constexpr Index kDefaultAtomGrid = 1024;

/// Tolerance on |total - 1| for a measure to count as a probability measure.
inline constexpr double kProbabilityTolerance = 1e-9;

/// Maps an angle to [0, 2pi).
inline double wrap_angle(double angle) {
  double a = std::fmod(angle, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  return a >= kTwoPi ? 0.0 : a;
}

/// Bin holding `angle` on an m-cell equal-width grid; cell k is [2pi k/m, 2pi (k+1)/m).
inline Index bin_of(double angle, Index m) {
  const auto k = static_cast<Index>(std::floor(wrap_angle(angle) * static_cast<double>(m) / kTwoPi));
  return std::clamp<Index>(k, 0, m - 1);
}

inline double bin_center(Index k, Index m) {
  return (static_cast<double>(k) + 0.5) * kTwoPi / static_cast<double>(m);
}

struct Atom {
  double angle;
  double weight;
};

/// A finite positive measure on the circle, held either as atoms or as the
/// masses of m equal-width cells. Binned measures store cell masses, not
/// density values; density() converts.
class MeasureS1 {
 public:
  static MeasureS1 from_atoms(std::vector<Atom> atoms);
  static MeasureS1 from_bins(Eigen::VectorXd masses);

  static MeasureS1 uniform(Index bins);
  static MeasureS1 dirac(double angle);
  /// Density (1 + a cos(theta)) / 2pi sampled at cell centers.
  static MeasureS1 cosine(double a, Index bins);

  /// Samples a nonnegative density at cell centers (periodic trapezoid) and
  /// normalizes to a probability measure.
  template <typename Density>
  static MeasureS1 from_density(Density&& density, Index bins) {
    require(bins >= 1, "from_density: bins must be >= 1");
    Eigen::VectorXd masses(bins);
    for (Index k = 0; k < bins; ++k) masses[k] = density(bin_center(k, bins));
    require(masses.allFinite() && (masses.array() >= 0.0).all(),
            "from_density: density must be finite and nonnegative");
    const double total = masses.sum();
    require(total > 0.0, "from_density: density integrates to zero");
    return from_bins(masses / total);
  }

  bool is_atomic() const { return std::holds_alternative<std::vector<Atom>>(rep_); }
  bool is_binned() const { return !is_atomic(); }

  const std::vector<Atom>& atoms() const;
  const Eigen::VectorXd& bins() const;
  Index bin_count() const { return is_binned() ? bins().size() : 0; }

  double total() const { return total_; }
  bool is_probability() const { return std::abs(total_ - 1.0) <= kProbabilityTolerance; }

  /// Cell masses divided by cell arc length.
  Eigen::VectorXd density() const;

  MeasureS1 normalized() const;
  MeasureS1 scaled(double factor) const;

  /// Rotation by alpha. Binned measures need alpha to be a multiple of the
  /// cell width (checked to 1e-9 cells).
  MeasureS1 rotated(double alpha) const;

 private:
  MeasureS1(std::variant<std::vector<Atom>, Eigen::VectorXd> rep, double total)
      : rep_(std::move(rep)), total_(total) {}

  std::variant<std::vector<Atom>, Eigen::VectorXd> rep_;
  double total_;
};

/// Cell masses of `mu` on an m-cell grid. Atoms fall into the cell containing
/// them; binned input is rebinned conservatively (mass split by overlap).
Eigen::VectorXd render_bins(const MeasureS1& mu, Index m);

/// Grid on which two measures are compared: the finer of the two binned
/// grids, or kDefaultAtomGrid when both are atomic.
Index common_grid(const MeasureS1& a, const MeasureS1& b);

/// Weighted sum of measures. All-atomic input stays atomic (coincident
/// angles merged); otherwise everything is rendered on the finest grid.
MeasureS1 weighted_sum(const std::vector<const MeasureS1*>& measures, const std::vector<double>& weights);

/// 0.5 * (a + b). Used by both coarsening and projection so the two agree bit for bit.
MeasureS1 midpoint(const MeasureS1& a, const MeasureS1& b);

/// Exact circular 1-Wasserstein distance between two mass vectors on the
/// same m-cell grid, masses sitting at cell centers and cost = arc length.
/// W1 = (2pi/m) min_c sum_k |F_k - c| with F the cumulative mass difference;
/// the minimizing shift c is a median of F.
template <typename DerivedP, typename DerivedQ>
typename DerivedP::Scalar w1_circle_bins(const Eigen::MatrixBase<DerivedP>& p,
                                         const Eigen::MatrixBase<DerivedQ>& q) {
  using Scalar = typename DerivedP::Scalar;
  require(p.size() == q.size() && p.size() > 0, "w1_circle_bins: grids differ");
  const Index m = p.size();
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> cdf(m);
  Scalar running = 0;
  for (Index k = 0; k < m; ++k) {
    running += p[k] - q[k];
    cdf[k] = running;
  }
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> sorted = cdf;
  auto mid = sorted.begin() + m / 2;
  std::nth_element(sorted.begin(), mid, sorted.end());
  const Scalar shift = *mid;
  return (cdf.array() - shift).abs().sum() * static_cast<Scalar>(kTwoPi) / static_cast<Scalar>(m);
}

/// Circular W1 between two probability measures on their common grid.
double w1_circle(const MeasureS1& mu, const MeasureS1& nu);

}  // namespace llab
