#include "llab/measure_s1.hpp"

#include <map>
#include <string>

namespace llab {

MeasureS1 MeasureS1::from_atoms(std::vector<Atom> atoms) {
  require(!atoms.empty(), "MeasureS1: atom list is empty");
  double total = 0.0;
  for (auto& atom : atoms) {
    require(std::isfinite(atom.angle), "MeasureS1: atom angle must be finite");
    require(std::isfinite(atom.weight) && atom.weight > 0.0, "MeasureS1: atom weights must be positive");
    atom.angle = wrap_angle(atom.angle);
    total += atom.weight;
  }
  return MeasureS1(std::move(atoms), total);
}

MeasureS1 MeasureS1::from_bins(Eigen::VectorXd masses) {
  require(masses.size() >= 1, "MeasureS1: need at least one bin");
  require(masses.allFinite() && (masses.array() >= 0.0).all(), "MeasureS1: bin masses must be finite and nonnegative");
  const double total = masses.sum();
  require(total > 0.0, "MeasureS1: total mass must be positive");
  return MeasureS1(std::move(masses), total);
}

MeasureS1 MeasureS1::uniform(Index bins) {
  require(bins >= 1, "uniform: bins must be >= 1");
  return from_bins(Eigen::VectorXd::Constant(bins, 1.0 / static_cast<double>(bins)));
}

MeasureS1 MeasureS1::dirac(double angle) { return from_atoms({{angle, 1.0}}); }

MeasureS1 MeasureS1::cosine(double a, Index bins) {
  require(std::isfinite(a) && std::abs(a) <= 1.0, "cosine: amplitude must lie in [-1, 1]");
  return from_density([a](double theta) { return (1.0 + a * std::cos(theta)) / kTwoPi; }, bins);
}

const std::vector<Atom>& MeasureS1::atoms() const {
  require(is_atomic(), "MeasureS1: not an atomic measure");
  return std::get<std::vector<Atom>>(rep_);
}

const Eigen::VectorXd& MeasureS1::bins() const {
  require(is_binned(), "MeasureS1: not a binned measure");
  return std::get<Eigen::VectorXd>(rep_);
}

Eigen::VectorXd MeasureS1::density() const {
  const auto& masses = bins();
  return masses * (static_cast<double>(masses.size()) / kTwoPi);
}

MeasureS1 MeasureS1::normalized() const { return scaled(1.0 / total_); }

MeasureS1 MeasureS1::scaled(double factor) const {
  require(std::isfinite(factor) && factor > 0.0, "MeasureS1: scale factor must be positive");
  if (is_atomic()) {
    auto atoms_copy = atoms();
    for (auto& atom : atoms_copy) atom.weight *= factor;
    return from_atoms(std::move(atoms_copy));
  }
  return from_bins(bins() * factor);
}

MeasureS1 MeasureS1::rotated(double alpha) const {
  if (is_atomic()) {
    auto atoms_copy = atoms();
    for (auto& atom : atoms_copy) atom.angle += alpha;
    return from_atoms(std::move(atoms_copy));
  }
  const auto& masses = bins();
  const Index m = masses.size();
  const double cells = alpha * static_cast<double>(m) / kTwoPi;
  const double nearest = std::round(cells);
  require(std::abs(cells - nearest) <= 1e-9, "rotated: angle is not a multiple of the cell width");
  const Index shift = ((static_cast<Index>(nearest) % m) + m) % m;
  Eigen::VectorXd out(m);
  for (Index k = 0; k < m; ++k) out[(k + shift) % m] = masses[k];
  return from_bins(std::move(out));
}

namespace {

Eigen::VectorXd rebin(const Eigen::VectorXd& masses, Index m) {
  const Index n = masses.size();
  if (n == m) return masses;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  if (m % n == 0) {
    const Index r = m / n;
    const double share = 1.0 / static_cast<double>(r);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < r; ++j) out[i * r + j] = masses[i] * share;
    return out;
  }
  if (n % m == 0) {
    const Index r = n / m;
    for (Index i = 0; i < n; ++i) out[i / r] += masses[i];
    return out;
  }
  // Cell boundaries i/n and j/m as fractions of the circle; merge-walk the two partitions.
  const double wn = 1.0 / static_cast<double>(n);
  Index i = 0;
  Index j = 0;
  double position = 0.0;
  while (i < n && j < m) {
    const double end_i = static_cast<double>(i + 1) / static_cast<double>(n);
    const double end_j = static_cast<double>(j + 1) / static_cast<double>(m);
    const double end = std::min(end_i, end_j);
    out[j] += masses[i] * (end - position) / wn;
    position = end;
    if (end_i <= end) ++i;
    if (end_j <= end) ++j;
  }
  return out;
}

std::vector<Atom> merge_atoms(std::vector<Atom> atoms) {
  std::map<double, double> merged;
  for (const auto& atom : atoms) merged[atom.angle] += atom.weight;
  std::vector<Atom> out;
  out.reserve(merged.size());
  for (const auto& [angle, weight] : merged) out.push_back({angle, weight});
  return out;
}

}  // namespace

Eigen::VectorXd render_bins(const MeasureS1& mu, Index m) {
  require(m >= 1, "render_bins: m must be >= 1");
  if (mu.is_binned()) return rebin(mu.bins(), m);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  for (const auto& atom : mu.atoms()) out[bin_of(atom.angle, m)] += atom.weight;
  return out;
}

Index common_grid(const MeasureS1& a, const MeasureS1& b) {
  const Index m = std::max(a.bin_count(), b.bin_count());
  return m > 0 ? m : kDefaultAtomGrid;
}

MeasureS1 weighted_sum(const std::vector<const MeasureS1*>& measures, const std::vector<double>& weights) {
  require(!measures.empty() && measures.size() == weights.size(), "weighted_sum: size mismatch");
  const bool all_atomic = std::all_of(measures.begin(), measures.end(), [](const MeasureS1* mu) { return mu->is_atomic(); });
  if (all_atomic) {
    std::vector<Atom> atoms;
    for (std::size_t k = 0; k < measures.size(); ++k) {
      if (weights[k] == 0.0) continue;
      for (const auto& atom : measures[k]->atoms()) atoms.push_back({atom.angle, atom.weight * weights[k]});
    }
    return MeasureS1::from_atoms(merge_atoms(std::move(atoms)));
  }
  Index m = 0;
  for (const auto* mu : measures) m = std::max(m, mu->bin_count());
  Eigen::VectorXd out = Eigen::VectorXd::Zero(m);
  for (std::size_t k = 0; k < measures.size(); ++k) out += weights[k] * render_bins(*measures[k], m);
  return MeasureS1::from_bins(std::move(out));
}

MeasureS1 midpoint(const MeasureS1& a, const MeasureS1& b) {
  if (a.is_atomic() && b.is_atomic()) {
    std::vector<Atom> atoms;
    for (const auto& atom : a.atoms()) atoms.push_back({atom.angle, atom.weight * 0.5});
    for (const auto& atom : b.atoms()) atoms.push_back({atom.angle, atom.weight * 0.5});
    return MeasureS1::from_atoms(merge_atoms(std::move(atoms)));
  }
  const Index m = common_grid(a, b);
  return MeasureS1::from_bins((render_bins(a, m) + render_bins(b, m)) * 0.5);
}

double w1_circle(const MeasureS1& mu, const MeasureS1& nu) {
  require(mu.is_probability() && nu.is_probability(), "w1_circle: both arguments must be probability measures");
  const Index m = common_grid(mu, nu);
  return w1_circle_bins(render_bins(mu, m), render_bins(nu, m));
}

}  // namespace llab
