#include "llab/selftest.hpp"

#include <functional>
#include <sstream>

#include "llab/loewner.hpp"
#include "llab/rate.hpp"
#include "llab/rng.hpp"
#include "llab/serialize.hpp"

namespace llab {

namespace {

CheckResult check(std::string name, const std::function<std::string()>& body) {
  CheckResult out{std::move(name), false, {}};
  try {
    out.detail = body();
    out.passed = out.detail.empty();
  } catch (const std::exception& e) {
    out.detail = std::string("exception: ") + e.what();
  }
  return out;
}

std::string expect_near(double got, double want, double tol, const char* what) {
  if (std::abs(got - want) <= tol) return {};
  return std::string(what) + ": got " + format_double(got) + ", want " + format_double(want) + " +- " +
         format_double(tol);
}

}  // namespace

std::vector<CheckResult> run_selftest(unsigned workers) {
  std::vector<CheckResult> out;
  constexpr double pi = std::numbers::pi;

  out.push_back(check("sampler is deterministic", [] {
    const auto a = sample_circle_bm(4.0, 512, 1.0, 42);
    const auto b = sample_circle_bm(4.0, 512, 1.0, 42);
    return a.angles == b.angles ? std::string() : std::string("angles differ between identical seeds");
  }));
  out.push_back(check("occupation mass equals elapsed time", [] {
    const auto path = sample_circle_bm(50.0, 4096, 1.0, 3);
    const auto occ = occupation_measure(path, 0.731, 64);
    return expect_near(occ.bins.sum(), 0.731, 1e-12, "mass");
  }));
  out.push_back(check("W1(uniform, dirac) = pi/2", [] {
    return expect_near(w1_circle(MeasureS1::uniform(360), MeasureS1::dirac(0.0)), pi / 2, 1e-12, "W1");
  }));
  out.push_back(check("projection coherence", [] {
    Rng rng(11);
    std::vector<MeasureS1> slabs;
    for (int s = 0; s < 64; ++s) {
      Eigen::VectorXd bins(32);
      for (Index k = 0; k < 32; ++k) bins[k] = rng.uniform() + 0.01;
      slabs.push_back(MeasureS1::from_bins(bins / bins.sum()));
    }
    const auto rho = DrivingMeasure::from_slabs(std::move(slabs));
    for (int n = 0; n < 6; ++n) {
      const auto direct = project(rho, n);
      const auto via = coarsen(project(rho, n + 1));
      for (std::size_t i = 0; i < direct.entries.size(); ++i)
        if (direct.entries[i].bins() != via.entries[i].bins()) return "level " + std::to_string(n) + " differs";
    }
    return std::string();
  }));
  out.push_back(check("Dirichlet rate of uniform and cosine densities", [] {
    const auto u = dirichlet_rate(MeasureS1::uniform(256)).value.value();
    const auto c = dirichlet_rate(MeasureS1::cosine(0.5, 256)).value.value();
    const double closed = (1.0 - std::sqrt(0.75)) / 8.0;
    auto msg = expect_near(u, 0.0, 1e-12, "I(uniform)");
    return msg.empty() ? expect_near(c, closed, 1e-6 * closed, "I(cosine 0.5)") : msg;
  }));
  out.push_back(check("Dirac has infinite rate", [] {
    return dirichlet_rate(MeasureS1::dirac(1.0)).value.is_infinite() ? std::string() : std::string("finite");
  }));
  out.push_back(check("variational rate matches Dirichlet rate", [] {
    const auto mu = MeasureS1::cosine(0.5, 256);
    const double i = dirichlet_rate(mu).value.value();
    return expect_near(variational_rate(mu).value.value(), i, 0.01 * i, "variational");
  }));
  out.push_back(check("uniform driving gives exp(-t) z", [workers] {
    const SubordinationChain chain(DrivingMeasure::uniform(64));
    const double d = caratheodory_distance(chain, DecayChain{}, 0.5, 4, {2, 8}, workers);
    return expect_near(d, 0.0, 1e-8, "distance");
  }));
  out.push_back(check("conformal radius of a Brownian chain", [] {
    const auto path = sample_circle_bm(16.0, 1024, 1.0, 5);
    const SubordinationChain chain(path);
    const Complex d = flow_derivative_at_origin(chain, 0.5);
    return expect_near(std::abs(d - std::exp(0.5)) / std::exp(0.5), 0.0, 1e-6, "relative error of g'(0)");
  }));
  return out;
}

}  // namespace llab
