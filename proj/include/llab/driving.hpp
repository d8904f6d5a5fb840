#pragma once

#include <vector>

#include "llab/circle_bm.hpp"

namespace llab {

/// Deepest dyadic level supported by projections and dn_distance (4096 windows).
inline constexpr int kMaxLevel = 12;

/// Element of the space of measures on S^1 x [0,1] with uniform time
/// marginal, held through its disintegration: either equal-width time slabs
/// each carrying a probability measure, or a sampled path (Dirac at the
/// current position).
class DrivingMeasure {
 public:
  static DrivingMeasure from_slabs(std::vector<MeasureS1> slabs);
  static DrivingMeasure uniform(Index bins = 256);
  /// Path-backed measure; projections bin occupation on `grid_bins` cells.
  static DrivingMeasure from_path(CirclePath path, Index grid_bins = 256);

  bool is_path_backed() const { return path_backed_; }
  const std::vector<MeasureS1>& slabs() const;
  const CirclePath& path() const;
  Index slab_count() const { return static_cast<Index>(slabs_.size()); }
  Index grid_bins() const { return grid_bins_; }

 private:
  DrivingMeasure() = default;

  bool path_backed_ = false;
  std::vector<MeasureS1> slabs_;
  CirclePath path_;
  Index grid_bins_ = 0;
};

/// Dirac driving {delta_{zeta_t}} of a path covering [0, 1].
DrivingMeasure dirac_path_measure(const CirclePath& path, Index grid_bins = 256);

/// 2^level circle probability measures, entry i for time window [i/2^n, (i+1)/2^n].
struct LevelTuple {
  int level = 0;
  std::vector<MeasureS1> entries;
};

struct ProjectionOptions {
  /// Allow slab layouts that are not dyadically compatible with the level;
  /// windows then average slabs by overlap length.
  bool refine_nondyadic = false;
};

/// Time averages of rho over the 2^n dyadic windows.
LevelTuple project(const DrivingMeasure& rho, int level, ProjectionOptions options = {});

/// Piecewise-constant driving measure whose slab i is entry i.
DrivingMeasure embed(const LevelTuple& tuple);

/// Level n+1 -> level n by averaging consecutive pairs.
LevelTuple coarsen(const LevelTuple& tuple);

/// sum_{n=0}^{depth} 2^{-n} max_i W1(P_n^i rho, P_n^i sigma).
double dn_distance(const DrivingMeasure& rho, const DrivingMeasure& sigma, int depth);

}  // namespace llab
