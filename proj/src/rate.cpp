#include "llab/rate.hpp"

#include <unsupported/Eigen/FFT>

#include <limits>
#include <vector>

namespace llab {

RateValue RateValue::finite(double value) {
  require(std::isfinite(value), "RateValue: finite value expected");
  RateValue out;
  out.infinite_ = false;
  out.value_ = value;
  return out;
}

double RateValue::value() const {
  require(!infinite_, "RateValue: value is +infinity");
  return value_;
}

const char* to_string(RateMethod method) {
  switch (method) {
    case RateMethod::dirichlet: return "dirichlet";
    case RateMethod::variational: return "variational";
    case RateMethod::level_n: return "level_n";
    case RateMethod::energy: return "energy";
  }
  return "unknown";
}

double VariationalWitness::h(double theta) const {
  double sum = 0.0;
  for (int k = 1; k <= degree(); ++k) sum += cos_coeffs[k - 1] * std::cos(k * theta) + sin_coeffs[k - 1] * std::sin(k * theta);
  return sum;
}

Eigen::VectorXd VariationalWitness::packed() const {
  Eigen::VectorXd out(2 * degree());
  out << cos_coeffs, sin_coeffs;
  return out;
}

VariationalWitness VariationalWitness::unpack(const Eigen::VectorXd& coeffs) {
  require(coeffs.size() % 2 == 0, "VariationalWitness: packed coefficients must have even length");
  const Index d = coeffs.size() / 2;
  return {coeffs.head(d), coeffs.tail(d)};
}

double pairwise_sum(std::span<const double> values) {
  if (values.empty()) return 0.0;
  if (values.size() == 1) return values[0];
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

namespace {

/// pi * sum_k k^2 |c_k|^2 for the trigonometric interpolant of the samples;
/// the Nyquist mode of an even grid is dropped.
double spectral_dirichlet(const Eigen::VectorXd& root) {
  const Index m = root.size();
  Eigen::FFT<double> fft;
  std::vector<double> samples(root.data(), root.data() + m);
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, samples);
  double sum = 0.0;
  for (Index k = 1; k < m; ++k) {
    if (2 * k == m) continue;
    const double wave = static_cast<double>(2 * k < m ? k : m - k);
    sum += wave * wave * std::norm(spectrum[k]);
  }
  return std::numbers::pi * sum / static_cast<double>(m * m);
}

Eigen::VectorXd half_resolution(const Eigen::VectorXd& masses) {
  Eigen::VectorXd out(masses.size() / 2);
  for (Index k = 0; k < out.size(); ++k) out[k] = masses[2 * k] + masses[2 * k + 1];
  return out;
}

double dirichlet_value(const Eigen::VectorXd& masses) {
  const Eigen::VectorXd density = masses * (static_cast<double>(masses.size()) / kTwoPi);
  return spectral_dirichlet(density.array().sqrt().matrix());
}

}  // namespace

RateReport dirichlet_rate(const MeasureS1& mu, DirichletOptions options) {
  require(mu.is_probability(), "dirichlet_rate: input must be a probability measure");
  RateReport report;
  report.method = RateMethod::dirichlet;
  if (mu.is_atomic()) {
    report.diagnostics.note = "atomic measure has no density";
    return report;
  }
  Eigen::VectorXd masses = mu.bins();
  const Index m = masses.size();
  report.diagnostics.quadrature_nodes = m;
  if (options.regularize) {
    masses.array() += options.regularization * kTwoPi / static_cast<double>(m);
    masses /= masses.sum();
    report.diagnostics.certified = false;
    report.diagnostics.note = "regularized density";
  } else {
    const double floor_mass = options.positivity_floor * kTwoPi / static_cast<double>(m);
    if ((masses.array() < floor_mass).any()) {
      report.diagnostics.note = "density below positivity floor";
      return report;
    }
  }
  const double value = dirichlet_value(masses);
  report.value = RateValue::finite(value);
  if (m % 2 == 0 && m >= 8) report.diagnostics.quadrature_error = std::abs(value - dirichlet_value(half_resolution(masses)));
  return report;
}

namespace {

struct Quadrature {
  Eigen::VectorXd angles;
  Eigen::VectorXd weights;
};

Quadrature quadrature_of(const MeasureS1& mu) {
  Quadrature q;
  if (mu.is_atomic()) {
    const auto& atoms = mu.atoms();
    q.angles.resize(static_cast<Index>(atoms.size()));
    q.weights.resize(static_cast<Index>(atoms.size()));
    for (std::size_t j = 0; j < atoms.size(); ++j) {
      q.angles[static_cast<Index>(j)] = atoms[j].angle;
      q.weights[static_cast<Index>(j)] = atoms[j].weight;
    }
  } else {
    const Index m = mu.bin_count();
    q.angles.resize(m);
    for (Index k = 0; k < m; ++k) q.angles[k] = bin_center(k, m);
    q.weights = mu.bins();
  }
  return q;
}

/// Columns are d/dc of h' and h'' at the quadrature nodes.
struct Basis {
  Eigen::MatrixXd first;
  Eigen::MatrixXd second;
};

Basis basis_at(const Eigen::VectorXd& angles, Index degree) {
  Basis b{Eigen::MatrixXd(angles.size(), 2 * degree), Eigen::MatrixXd(angles.size(), 2 * degree)};
  for (Index j = 0; j < angles.size(); ++j) {
    for (Index k = 1; k <= degree; ++k) {
      const double kk = static_cast<double>(k);
      const double c = std::cos(kk * angles[j]);
      const double s = std::sin(kk * angles[j]);
      b.first(j, k - 1) = -kk * s;
      b.first(j, degree + k - 1) = kk * c;
      b.second(j, k - 1) = -kk * kk * c;
      b.second(j, degree + k - 1) = -kk * kk * s;
    }
  }
  return b;
}

ObjectiveValue objective(const Basis& basis, const Eigen::VectorXd& weights, const Eigen::VectorXd& coeffs) {
  const Eigen::VectorXd slope = basis.first * coeffs;
  const Eigen::VectorXd curvature = basis.second * coeffs;
  ObjectiveValue out;
  out.value = -0.5 * weights.dot(curvature) - 0.5 * weights.dot(slope.cwiseAbs2());
  out.gradient = -0.5 * basis.second.transpose() * weights - basis.first.transpose() * weights.cwiseProduct(slope);
  return out;
}

}  // namespace

ObjectiveValue variational_objective(const MeasureS1& mu, const Eigen::VectorXd& coeffs) {
  require(coeffs.size() >= 2 && coeffs.size() % 2 == 0, "variational_objective: need [a_1..a_d, b_1..b_d]");
  const auto q = quadrature_of(mu);
  return objective(basis_at(q.angles, coeffs.size() / 2), q.weights, coeffs);
}

RateReport variational_rate(const MeasureS1& mu, VariationalOptions options) {
  require(mu.is_probability(), "variational_rate: input must be a probability measure");
  require(options.degree >= 1 && options.degree <= 64, "variational_rate: degree must lie in [1, 64]");
  const Index d = options.degree;
  const auto q = quadrature_of(mu);
  const Basis basis = basis_at(q.angles, d);

  // Optimize in x = k * c so that all coordinates move h' on the same scale.
  Eigen::VectorXd scale(2 * d);
  for (Index k = 1; k <= d; ++k) scale[k - 1] = scale[d + k - 1] = static_cast<double>(k);
  auto evaluate = [&](const Eigen::VectorXd& x) {
    ObjectiveValue v = objective(basis, q.weights, x.cwiseQuotient(scale));
    return v;
  };
  // Minimize f(x) = -J; grad_x f = -grad_c J / k.
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * d);
  ObjectiveValue current = evaluate(x);
  Eigen::VectorXd grad = -current.gradient.cwiseQuotient(scale);
  Eigen::MatrixXd inverse_hessian = Eigen::MatrixXd::Identity(2 * d, 2 * d);

  double best = current.value;
  Eigen::VectorXd best_x = x;
  RateReport report;
  report.method = RateMethod::variational;
  report.diagnostics.quadrature_nodes = q.angles.size();
  report.diagnostics.converged = false;

  int iteration = 0;
  for (; iteration < options.max_iterations; ++iteration) {
    if (current.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      report.diagnostics.converged = true;
      break;
    }
    Eigen::VectorXd direction = -inverse_hessian * grad;
    double slope = grad.dot(direction);
    if (slope >= 0.0) {
      inverse_hessian.setIdentity();
      direction = -grad;
      slope = -grad.squaredNorm();
    }
    double alpha = 1.0;
    ObjectiveValue trial;
    Eigen::VectorXd x_new;
    bool accepted = false;
    while (alpha > 1e-20) {
      x_new = x + alpha * direction;
      trial = evaluate(x_new);
      if (-trial.value <= -current.value + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      report.diagnostics.note = "line search failed";
      break;
    }
    const Eigen::VectorXd grad_new = -trial.gradient.cwiseQuotient(scale);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = grad_new - grad;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = Eigen::MatrixXd::Identity(2 * d, 2 * d) - rho * s * y.transpose();
      inverse_hessian = left * inverse_hessian * left.transpose() + rho * s * s.transpose();
    }
    x = x_new;
    current = trial;
    grad = grad_new;
    if (current.value > best) {
      best = current.value;
      best_x = x;
    }
  }
  if (!report.diagnostics.converged && report.diagnostics.note.empty())
    report.diagnostics.note = "iteration cap reached before gradient tolerance";

  report.diagnostics.iterations = iteration;
  report.diagnostics.gradient_norm = current.gradient.lpNorm<Eigen::Infinity>();
  const Eigen::VectorXd coeffs = best_x.cwiseQuotient(scale);
  report.witness = VariationalWitness::unpack(coeffs);
  report.value = RateValue::finite(std::max(best, 0.0));
  if (mu.is_binned() && mu.bin_count() % 2 == 0 && mu.bin_count() >= 8) {
    const auto coarse = MeasureS1::from_bins(half_resolution(mu.bins()));
    report.diagnostics.quadrature_error = std::abs(best - variational_objective(coarse, coeffs).value);
  }
  return report;
}

RateReport tuple_rate(const LevelTuple& tuple, DirichletOptions options) {
  require(tuple.entries.size() == (std::size_t{1} << tuple.level), "tuple_rate: entry count does not match level");
  RateReport report;
  report.method = RateMethod::level_n;
  std::vector<double> values;
  values.reserve(tuple.entries.size());
  for (std::size_t i = 0; i < tuple.entries.size(); ++i) {
    const auto entry = dirichlet_rate(tuple.entries[i], options);
    report.diagnostics.certified = report.diagnostics.certified && entry.diagnostics.certified;
    report.diagnostics.quadrature_error = std::max(report.diagnostics.quadrature_error, entry.diagnostics.quadrature_error);
    if (entry.value.is_infinite()) {
      report.diagnostics.note = "entry " + std::to_string(i) + ": " + entry.diagnostics.note;
      return report;
    }
    values.push_back(entry.value.value());
  }
  report.value = RateValue::finite(std::ldexp(pairwise_sum(values), -tuple.level));
  return report;
}

RateReport energy(const DrivingMeasure& rho, DirichletOptions options) {
  RateReport report;
  report.method = RateMethod::energy;
  if (rho.is_path_backed()) {
    report.diagnostics.note = "path-backed driving has Dirac slabs";
    return report;
  }
  std::vector<double> values;
  for (std::size_t s = 0; s < rho.slabs().size(); ++s) {
    const auto slab = dirichlet_rate(rho.slabs()[s], options);
    report.diagnostics.certified = report.diagnostics.certified && slab.diagnostics.certified;
    report.diagnostics.quadrature_error = std::max(report.diagnostics.quadrature_error, slab.diagnostics.quadrature_error);
    if (slab.value.is_infinite()) {
      report.diagnostics.note = "slab " + std::to_string(s) + ": " + slab.diagnostics.note;
      return report;
    }
    values.push_back(slab.value.value());
  }
  report.value = RateValue::finite(pairwise_sum(values) / static_cast<double>(values.size()));
  return report;
}

}  // namespace llab
