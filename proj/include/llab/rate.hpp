#pragma once

#include <optional>
#include <span>
#include <string>

#include "llab/driving.hpp"

namespace llab {

/// Nonnegative extended real: a finite value or an explicit +infinity tag.
class RateValue {
 public:
  static RateValue finite(double value);
  static RateValue infinite() { return RateValue(); }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }
  /// Throws for the infinite tag.
  double value() const;

  friend bool operator==(const RateValue&, const RateValue&) = default;

 private:
  RateValue() = default;
  bool infinite_ = true;
  double value_ = 0.0;
};

enum class RateMethod { dirichlet, variational, level_n, energy };

const char* to_string(RateMethod method);

struct RateDiagnostics {
  Index quadrature_nodes = 0;
  int iterations = 0;
  double gradient_norm = 0.0;
  /// |value - value on the half-resolution grid|.
  double quadrature_error = 0.0;
  bool converged = true;
  /// False when a regularized (density + eps) evaluation was used.
  bool certified = true;
  std::string note;
};

/// h(theta) = sum_k a_k cos(k theta) + b_k sin(k theta), k = 1..degree;
/// test function u = exp(h) > 0.
struct VariationalWitness {
  Eigen::VectorXd cos_coeffs;
  Eigen::VectorXd sin_coeffs;

  int degree() const { return static_cast<int>(cos_coeffs.size()); }
  double h(double theta) const;
  double u(double theta) const { return std::exp(h(theta)); }
  /// Packed as [a_1..a_d, b_1..b_d].
  Eigen::VectorXd packed() const;
  static VariationalWitness unpack(const Eigen::VectorXd& coeffs);
};

struct RateReport {
  RateValue value = RateValue::infinite();
  RateMethod method = RateMethod::dirichlet;
  RateDiagnostics diagnostics;
  std::optional<VariationalWitness> witness;
};

struct DirichletOptions {
  /// Density values below this floor make the measure count as singular.
  double positivity_floor = 1e-10;
  /// Evaluate on (density + regularization), renormalized; marks the report
  /// as not certified.
  bool regularize = false;
  double regularization = 1e-8;
};

/// I(mu) = 1/2 int |phi'|^2 for mu = phi^2 dtheta, with phi' from the
/// spectral derivative of sqrt(density) at cell centers. Atomic measures and
/// densities touching zero give the infinite tag.
RateReport dirichlet_rate(const MeasureS1& mu, DirichletOptions options = {});

struct VariationalOptions {
  int degree = 16;
  int max_iterations = 500;
  double gradient_tolerance = 1e-8;
};

struct ObjectiveValue {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

/// J(h) = -int (h'' + h'^2)/2 dmu = -int u''/(2u) dmu for u = e^h, with its
/// gradient in the packed coefficients. Quadrature uses the measure's own
/// nodes (atoms, or cell centers weighted by cell mass).
ObjectiveValue variational_objective(const MeasureS1& mu, const Eigen::VectorXd& coeffs);

/// Maximizes J over trigonometric h of the given degree (BFGS with
/// backtracking). Every evaluated J is a lower bound of the variational rate,
/// so the reported value is the best J seen.
RateReport variational_rate(const MeasureS1& mu, VariationalOptions options = {});

/// I_n = 2^{-n} sum_i I(entry_i).
RateReport tuple_rate(const LevelTuple& tuple, DirichletOptions options = {});

/// E(rho) = sum over slabs of width * I(slab); path-backed input is infinite.
RateReport energy(const DrivingMeasure& rho, DirichletOptions options = {});

/// Pairwise (tree) summation; the split at the midpoint is fixed, so the
/// result depends only on the input order.
double pairwise_sum(std::span<const double> values);

}  // namespace llab
