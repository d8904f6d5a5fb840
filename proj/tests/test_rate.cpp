#include <doctest.h>

#include "llab/rate.hpp"
#include "llab/rng.hpp"
#include "oracles.hpp"

using namespace llab;

namespace {

MeasureS1 random_trig_density(Rng& rng, int degree, Index m) {
  std::vector<double> a(degree), b(degree);
  double norm = 0.0;
  for (int k = 0; k < degree; ++k) {
    a[k] = rng.uniform() - 0.5;
    b[k] = rng.uniform() - 0.5;
    norm += std::abs(a[k]) + std::abs(b[k]);
  }
  const double scale = 0.8 / norm;
  return MeasureS1::from_density(
      [&](double th) {
        double v = 1.0;
        for (int k = 0; k < degree; ++k) v += scale * (a[k] * std::cos((k + 1) * th) + b[k] * std::sin((k + 1) * th));
        return v;
      },
      m);
}

}  // namespace

TEST_CASE("cosine closed form is confirmed by quadrature") {
  for (double a : {0.1, 0.5, 0.9}) {
    const double quad = oracle::cosine_rate_quadrature(a, 1 << 14);
    CHECK(quad == doctest::Approx(oracle::cosine_rate_closed_form(a)).epsilon(1e-12));
  }
  // (1 - sqrt(3)/2) / 8.
  CHECK(oracle::cosine_rate_closed_form(0.5) == doctest::Approx(0.0167468245269451).epsilon(1e-12));
}

TEST_CASE("Dirichlet rate worked values") {
  CHECK(std::abs(dirichlet_rate(MeasureS1::uniform(256)).value.value()) <= 1e-12);
  for (double a : {0.1, 0.5, 0.9}) {
    const double expected = oracle::cosine_rate_closed_form(a);
    const auto report = dirichlet_rate(MeasureS1::cosine(a, 512));
    CAPTURE(a);
    CHECK(report.value.value() == doctest::Approx(expected).epsilon(1e-6));
    CHECK(report.method == RateMethod::dirichlet);
    CHECK(report.diagnostics.quadrature_nodes == 512);
    CHECK(report.diagnostics.quadrature_error < 1e-3 * expected);
  }
  CHECK(dirichlet_rate(MeasureS1::dirac(0.0)).value.is_infinite());
  CHECK_THROWS_AS(dirichlet_rate(MeasureS1::uniform(8).scaled(3.0)), ValidationError);
  CHECK_THROWS(dirichlet_rate(MeasureS1::dirac(0.0)).value.value());
}

TEST_CASE("densities touching zero are refused unless regularized") {
  Eigen::VectorXd bins = Eigen::VectorXd::Constant(64, 1.0);
  bins[5] = 0.0;
  const auto mu = MeasureS1::from_bins(bins / bins.sum());
  const auto strict = dirichlet_rate(mu);
  CHECK(strict.value.is_infinite());
  CHECK_FALSE(strict.diagnostics.note.empty());
  const auto soft = dirichlet_rate(mu, {.regularize = true});
  CHECK(soft.value.is_finite());
  CHECK_FALSE(soft.diagnostics.certified);
}

TEST_CASE("rate is rotation invariant at grid angles") {
  Rng rng(8);
  const auto mu = random_trig_density(rng, 5, 128);
  const double base = dirichlet_rate(mu).value.value();
  for (int shift : {1, 17, 64}) {
    const auto turned = mu.rotated(kTwoPi * shift / 128);
    CHECK(dirichlet_rate(turned).value.value() == doctest::Approx(base).epsilon(1e-13));
  }
  const double v = variational_rate(mu).value.value();
  CHECK(variational_rate(mu.rotated(kTwoPi * 17 / 128)).value.value() == doctest::Approx(v).epsilon(1e-6));
}

TEST_CASE("rate is convex and vanishes only at uniform") {
  Rng rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const auto mu = random_trig_density(rng, 4, 128);
    const auto nu = random_trig_density(rng, 4, 128);
    const double mid = dirichlet_rate(midpoint(mu, nu)).value.value();
    const double avg = 0.5 * (dirichlet_rate(mu).value.value() + dirichlet_rate(nu).value.value());
    CHECK(mid <= avg + 1e-15);
    CHECK(dirichlet_rate(mu).value.value() > 0.0);
  }
}

TEST_CASE("analytic gradient matches finite differences") {
  Rng rng(55);
  for (int trial = 0; trial < 10; ++trial) {
    const int degree = 1 + static_cast<int>(rng() % 8);
    const auto mu = random_trig_density(rng, 3, 256);
    Eigen::VectorXd c(2 * degree);
    for (Index i = 0; i < c.size(); ++i) c[i] = 0.4 * (rng.uniform() - 0.5);
    const auto at = variational_objective(mu, c);
    for (Index i = 0; i < c.size(); ++i) {
      const double h = 1e-5;
      Eigen::VectorXd up = c, down = c;
      up[i] += h;
      down[i] -= h;
      const double fd = (variational_objective(mu, up).value - variational_objective(mu, down).value) / (2 * h);
      CHECK(std::abs(fd - at.gradient[i]) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("variational rate of the uniform measure") {
  const auto report = variational_rate(MeasureS1::uniform(128));
  CHECK(report.value.value() == doctest::Approx(0.0).epsilon(1e-14));
  REQUIRE(report.witness.has_value());
  CHECK(report.witness->packed().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(report.diagnostics.converged);
}

TEST_CASE("variational and Dirichlet rates agree") {
  Rng rng(71);
  std::vector<MeasureS1> cases{MeasureS1::cosine(0.1, 256), MeasureS1::cosine(0.5, 256), MeasureS1::cosine(0.9, 256),
                               random_trig_density(rng, 3, 256), random_trig_density(rng, 6, 256)};
  for (const auto& mu : cases) {
    const double exact = dirichlet_rate(mu).value.value();
    const auto report = variational_rate(mu);
    CHECK(std::abs(report.value.value() - exact) / std::max(exact, 1e-6) < 0.01);
    // Every J is a lower bound for the reported value.
    CHECK(variational_objective(mu, report.witness->packed()).value <= report.value.value() + 1e-12);
    Eigen::VectorXd other = report.witness->packed() * 0.7;
    CHECK(variational_objective(mu, other).value <= report.value.value() + 1e-12);
    CHECK(report.witness->u(1.0) > 0.0);
  }
}

TEST_CASE("variational rate on atoms does not converge") {
  const auto report = variational_rate(MeasureS1::dirac(0.3), {.degree = 4, .max_iterations = 50});
  CHECK_FALSE(report.diagnostics.converged);
  CHECK(report.value.value() > 1.0);
  CHECK_THROWS_AS(variational_rate(MeasureS1::uniform(16), {.degree = 65}), ValidationError);
}

TEST_CASE("level-n rates and energy") {
  const auto cosine = MeasureS1::cosine(0.5, 256);
  const double ic = dirichlet_rate(cosine).value.value();
  CHECK(tuple_rate(LevelTuple{2, std::vector<MeasureS1>(4, MeasureS1::uniform(64))}).value.value() == 0.0);
  const auto level1 = tuple_rate(LevelTuple{1, {MeasureS1::uniform(256), cosine}});
  CHECK(level1.value.value() == doctest::Approx(0.5 * oracle::cosine_rate_closed_form(0.5)).epsilon(1e-6));
  CHECK(tuple_rate(LevelTuple{1, {MeasureS1::uniform(16), MeasureS1::dirac(0.0)}}).value.is_infinite());

  CHECK(energy(DrivingMeasure::uniform(64)).value.value() == 0.0);
  const auto two = DrivingMeasure::from_slabs({MeasureS1::uniform(256), cosine});
  CHECK(energy(two).value.value() == doctest::Approx(0.5 * ic).epsilon(1e-15));
  CHECK(energy(dirac_path_measure(sample_circle_bm(1.0, 64, 1.0, 0))).value.is_infinite());
}

TEST_CASE("level-n rates increase to the energy") {
  Rng rng(13);
  std::vector<MeasureS1> slabs;
  for (int s = 0; s < 32; ++s) slabs.push_back(random_trig_density(rng, 3, 128));
  const auto rho = DrivingMeasure::from_slabs(std::move(slabs));
  const double e = energy(rho).value.value();
  double previous = 0.0;
  for (int n = 0; n <= 7; ++n) {
    const double in = tuple_rate(project(rho, n)).value.value();
    CHECK(previous <= in + 1e-12);
    previous = in;
    if (n >= 5) CHECK(std::abs(in - e) < 1e-9);
  }
}

TEST_CASE("pairwise sum has a fixed topology") {
  std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  CHECK(pairwise_sum(v) == (1e16 + 1.0) + (-1e16 + 1.0));
  CHECK(pairwise_sum(std::vector<double>{}) == 0.0);
}
