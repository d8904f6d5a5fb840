#include "llab/driving.hpp"

#include <string>

namespace llab {

namespace {

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(Index n) {
  int level = 0;
  while ((Index{1} << level) < n) ++level;
  return level;
}

}  // namespace

DrivingMeasure DrivingMeasure::from_slabs(std::vector<MeasureS1> slabs) {
  require(!slabs.empty(), "DrivingMeasure: need at least one slab");
  for (std::size_t k = 0; k < slabs.size(); ++k)
    require(slabs[k].is_probability(), "DrivingMeasure: slab " + std::to_string(k) + " is not a probability measure");
  DrivingMeasure rho;
  rho.slabs_ = std::move(slabs);
  return rho;
}

DrivingMeasure DrivingMeasure::uniform(Index bins) { return from_slabs({MeasureS1::uniform(bins)}); }

DrivingMeasure DrivingMeasure::from_path(CirclePath path, Index grid_bins) {
  require(grid_bins >= 1, "DrivingMeasure: grid_bins must be >= 1");
  require(path.steps() >= 1 && path.t_max() >= 1.0 - 1e-12, "DrivingMeasure: path must cover [0, 1]");
  DrivingMeasure rho;
  rho.path_backed_ = true;
  rho.path_ = std::move(path);
  rho.grid_bins_ = grid_bins;
  return rho;
}

const std::vector<MeasureS1>& DrivingMeasure::slabs() const {
  require(!path_backed_, "DrivingMeasure: path-backed measure has no slabs");
  return slabs_;
}

const CirclePath& DrivingMeasure::path() const {
  require(path_backed_, "DrivingMeasure: slab-backed measure has no path");
  return path_;
}

DrivingMeasure dirac_path_measure(const CirclePath& path, Index grid_bins) {
  return DrivingMeasure::from_path(path, grid_bins);
}

LevelTuple coarsen(const LevelTuple& tuple) {
  require(tuple.level >= 1, "coarsen: level must be >= 1");
  require(tuple.entries.size() == (std::size_t{1} << tuple.level), "coarsen: entry count does not match level");
  LevelTuple out;
  out.level = tuple.level - 1;
  out.entries.reserve(tuple.entries.size() / 2);
  for (std::size_t i = 0; i < tuple.entries.size(); i += 2)
    out.entries.push_back(midpoint(tuple.entries[i], tuple.entries[i + 1]));
  return out;
}

namespace {

LevelTuple project_path(const CirclePath& path, int level, Index grid_bins) {
  const Index windows = Index{1} << level;
  LevelTuple out;
  out.level = level;
  out.entries.reserve(windows);
  for (Index i = 0; i < windows; ++i) {
    const double from = static_cast<double>(i) / static_cast<double>(windows);
    const double to = static_cast<double>(i + 1) / static_cast<double>(windows);
    out.entries.push_back(average_occupation(occupation_between(path, from, to, grid_bins)));
  }
  return out;
}

LevelTuple project_by_overlap(const std::vector<MeasureS1>& slabs, int level) {
  const Index windows = Index{1} << level;
  const Index count = static_cast<Index>(slabs.size());
  LevelTuple out;
  out.level = level;
  for (Index i = 0; i < windows; ++i) {
    const double from = static_cast<double>(i) / static_cast<double>(windows);
    const double to = static_cast<double>(i + 1) / static_cast<double>(windows);
    std::vector<const MeasureS1*> parts;
    std::vector<double> weights;
    for (Index s = 0; s < count; ++s) {
      const double a = static_cast<double>(s) / static_cast<double>(count);
      const double b = static_cast<double>(s + 1) / static_cast<double>(count);
      const double overlap = std::min(b, to) - std::max(a, from);
      if (overlap <= 0.0) continue;
      parts.push_back(&slabs[s]);
      weights.push_back(overlap * static_cast<double>(windows));
    }
    out.entries.push_back(weighted_sum(parts, weights));
  }
  return out;
}

}  // namespace

LevelTuple project(const DrivingMeasure& rho, int level, ProjectionOptions options) {
  require(level >= 0 && level <= kMaxLevel, "project: level must lie in [0, " + std::to_string(kMaxLevel) + "]");
  if (rho.is_path_backed()) return project_path(rho.path(), level, rho.grid_bins());

  const auto& slabs = rho.slabs();
  const Index count = rho.slab_count();
  const Index windows = Index{1} << level;

  if (is_power_of_two(count)) {
    const int slab_level = log2_exact(count);
    if (level >= slab_level) {
      LevelTuple out;
      out.level = level;
      const int repeat = level - slab_level;
      out.entries.reserve(windows);
      for (Index i = 0; i < windows; ++i) out.entries.push_back(slabs[i >> repeat]);
      return out;
    }
    // Coarser than the slabs: pairwise averaging, the same arithmetic as
    // coarsen(), so P_n = P_{n,n+1} o P_{n+1} holds bit for bit.
    LevelTuple out{slab_level, slabs};
    while (out.level > level) out = coarsen(out);
    return out;
  }
  if (count % windows == 0) {
    const Index per_window = count / windows;
    LevelTuple out;
    out.level = level;
    const std::vector<double> weights(per_window, 1.0 / static_cast<double>(per_window));
    for (Index i = 0; i < windows; ++i) {
      std::vector<const MeasureS1*> parts;
      for (Index s = 0; s < per_window; ++s) parts.push_back(&slabs[i * per_window + s]);
      out.entries.push_back(weighted_sum(parts, weights));
    }
    return out;
  }
  require(options.refine_nondyadic, "project: " + std::to_string(count) + " slabs are not compatible with level " +
                                        std::to_string(level) + " (enable refine_nondyadic)");
  return project_by_overlap(slabs, level);
}

DrivingMeasure embed(const LevelTuple& tuple) {
  require(tuple.level >= 0 && tuple.level <= kMaxLevel, "embed: level out of range");
  require(tuple.entries.size() == (std::size_t{1} << tuple.level), "embed: entry count does not match level");
  return DrivingMeasure::from_slabs(tuple.entries);
}

double dn_distance(const DrivingMeasure& rho, const DrivingMeasure& sigma, int depth) {
  require(depth >= 0 && depth <= kMaxLevel, "dn_distance: depth must lie in [0, " + std::to_string(kMaxLevel) + "]");
  const ProjectionOptions refine{true};
  double total = 0.0;
  for (int n = 0; n <= depth; ++n) {
    const auto a = project(rho, n, refine);
    const auto b = project(sigma, n, refine);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.entries.size(); ++i) worst = std::max(worst, w1_circle(a.entries[i], b.entries[i]));
    total += std::ldexp(worst, -n);
  }
  return total;
}

}  // namespace llab
