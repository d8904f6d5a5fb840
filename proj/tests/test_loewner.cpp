#include <doctest.h>

#include "llab/loewner.hpp"
#include "llab/rng.hpp"
#include "oracles.hpp"

using namespace llab;

namespace {

DrivingMeasure bumpy_slabs(Rng& rng, int slabs, Index m) {
  std::vector<MeasureS1> out;
  for (int s = 0; s < slabs; ++s) {
    const double a = 0.9 * rng.uniform(), phase = kTwoPi * rng.uniform();
    out.push_back(MeasureS1::from_density([=](double th) { return 1.0 + a * std::cos(th - phase); }, m));
  }
  return DrivingMeasure::from_slabs(std::move(out));
}

CirclePath rotated_path(CirclePath path, double alpha) {
  path.angles.array() += alpha;
  return path;
}

}  // namespace

TEST_CASE("origin is a fixed point of the flow") {
  const SubordinationChain chain(sample_circle_bm(8.0, 512, 1.0, 1));
  const std::vector<double> times{0.25, 0.5, 1.0};
  const auto flow = forward_flow(chain, Complex{0.0, 0.0}, times);
  CHECK(flow.status == FlowStatus::survived);
  CHECK_FALSE(flow.survival_time.has_value());
  for (const auto& v : flow.values) CHECK(std::abs(v) == 0.0);
  CHECK(chain(Complex{0.0, 0.0}, 0.7) == Complex{0.0, 0.0});
}

TEST_CASE("uniform driving flows radially outward") {
  const SubordinationChain chain(DrivingMeasure::uniform(128));
  const Complex z{0.5, 0.0};
  std::vector<double> times;
  for (int k = 0; k <= 10; ++k) times.push_back(0.1 * k);
  const auto flow = forward_flow(chain, z, times);
  REQUIRE(flow.blowup());
  const double expected_t = std::log((1.0 - 1e-6) / 0.5);
  CHECK(*flow.survival_time == doctest::Approx(expected_t).epsilon(1e-9));
  CHECK(*flow.survival_time == doctest::Approx(std::log(2.0)).epsilon(1e-5));
  for (std::size_t i = 0; i < flow.times.size(); ++i) {
    CHECK(std::abs(flow.values[i] - std::exp(flow.times[i]) * z) < 1e-8);
    CHECK(std::abs(flow.values[i]) < 1.0);
  }
  CHECK(flow.times.back() < expected_t);
  CHECK_THROWS_AS(forward_flow(chain, Complex{1.0, 0.0}), ValidationError);
}

TEST_CASE("uniform driving inverse map is exp(-t) z") {
  const SubordinationChain chain(DrivingMeasure::uniform(64));
  for (double t : {0.0, 0.3, 1.0})
    for (Complex z : {Complex{0.5, 0.0}, Complex{-0.2, 0.4}, Complex{0.0, -0.9}})
      CHECK(std::abs(chain(z, t) - std::exp(-t) * z) < 1e-8);
}

TEST_CASE("conformal radius identities") {
  Rng rng(100);
  std::vector<SubordinationChain> chains;
  chains.emplace_back(DrivingMeasure::uniform(64));
  chains.emplace_back(bumpy_slabs(rng, 4, 64));
  chains.emplace_back(sample_circle_bm(0.0, 64, 1.0, 0));
  chains.emplace_back(sample_circle_bm(64.0, 4096, 1.0, 8));
  for (const auto& chain : chains) {
    for (double t : {0.25, 0.5, 1.0}) {
      const Complex g = flow_derivative_at_origin(chain, t);
      const Complex f = map_derivative_at_origin(chain, t);
      CHECK(std::abs(g - std::exp(t)) / std::exp(t) < 1e-6);
      CHECK(std::abs(f - std::exp(-t)) / std::exp(-t) < 1e-6);
      CHECK(chain(Complex{0.0, 0.0}, t) == Complex{0.0, 0.0});
    }
  }
}

TEST_CASE("log g_t'(0) grows at unit speed") {
  Rng rng(3);
  const SubordinationChain chain(bumpy_slabs(rng, 8, 64));
  const double dt = 1e-2;
  for (double t : {0.2, 0.55, 0.9}) {
    const double up = std::log(std::abs(flow_derivative_at_origin(chain, t + dt)));
    const double down = std::log(std::abs(flow_derivative_at_origin(chain, t - dt)));
    CHECK(std::abs((up - down) / (2 * dt) - 1.0) < 1e-4);
  }
}

TEST_CASE("inverse map undoes the forward flow") {
  Rng rng(7);
  const SubordinationChain measure_chain(bumpy_slabs(rng, 4, 64));
  const SubordinationChain point_chain(sample_circle_bm(4.0, 512, 1.0, 3));
  for (const auto* chain : {&measure_chain, &point_chain}) {
    for (Complex z : {Complex{0.1, 0.05}, Complex{-0.3, 0.2}, Complex{0.05, -0.4}}) {
      const double t = 0.6;
      const auto flow = forward_flow(*chain, z, {}, t);
      if (flow.status != FlowStatus::survived) continue;
      CHECK(std::abs((*chain)(flow.final_value, t) - z) < 1e-6);
    }
  }
}

TEST_CASE("Schwarz envelope on a probe grid") {
  const SubordinationChain chain(sample_circle_bm(16.0, 1024, 1.0, 12));
  for (double t : {0.3, 1.0}) {
    for (double r : {0.2, 0.6, 0.95}) {
      for (int j = 0; j < 12; ++j) {
        const Complex z = std::polar(r, kTwoPi * j / 12);
        const double value = std::abs(chain(z, t));
        CHECK(value <= r + 1e-12);
        CHECK(value < 1.0);
      }
    }
  }
}

TEST_CASE("hull grids") {
  const SubordinationChain uniform(DrivingMeasure::uniform(64));
  const auto empty = hull_grid(uniform, 0.0, 16);
  CHECK(empty.swallowed == 0);
  CHECK(empty.alive == 256);

  const int probe = 32;
  const double t = 1.0;
  const auto grid = hull_grid(uniform, t, probe);
  const double cutoff = std::exp(-t);
  for (const auto& p : grid.probes) {
    const double r = std::abs(p.z);
    if (r > cutoff + 1.0 / probe) CHECK(p.status == ProbeStatus::swallowed);
    if (r < cutoff - 1.0 / probe) CHECK(p.status == ProbeStatus::alive);
  }

  const SubordinationChain bm(sample_circle_bm(4.0, 256, 1.0, 2));
  const auto early = hull_grid(bm, 0.4, 12);
  const auto late = hull_grid(bm, 0.9, 12);
  for (std::size_t i = 0; i < early.probes.size(); ++i) {
    if (early.probes[i].status == ProbeStatus::swallowed) {
      CHECK(late.probes[i].status == ProbeStatus::swallowed);
      CHECK(*late.probes[i].survival_time == *early.probes[i].survival_time);
    }
  }
}

TEST_CASE("trace of constant driving is the radial slit") {
  const SubordinationChain chain(sample_circle_bm(0.0, 16, 1.0, 0));
  const auto start = trace_point(chain, 0.0, 0.95);
  CHECK(std::abs(start.point - Complex{0.95, 0.0}) < 1e-15);

  SolverSettings fine;
  fine.rtol = 1e-12;
  fine.atol = 1e-15;
  const SubordinationChain oracle_chain(sample_circle_bm(0.0, 16, 1.0, 0), fine);
  double previous = 1.0;
  for (double t : {0.05, 0.2, 0.5, 1.0}) {
    const auto tp = trace_point(chain, t, 0.999, true);
    REQUIRE(tp.estimate.has_value());
    CHECK(std::abs(tp.point.imag()) < 1e-12);
    CHECK(tp.point.real() < previous);
    previous = tp.point.real();
    const Complex reference = inverse_map(oracle_chain, Complex{0.999, 0.0}, t);
    CHECK(std::abs(tp.point - reference) < 1e-8);
    CHECK(std::abs(tp.estimate->real() - oracle::radial_slit_tip(t)) < 1e-4);
    CHECK(*tp.error_gauge > 0.0);
  }
}

TEST_CASE("trace points lie outside the surviving domain") {
  const auto path = sample_circle_bm(2.0, 256, 1.0, 21);
  const SubordinationChain chain(path);
  const double t = 0.8;
  const auto tp = trace_point(chain, t, 0.999, true);
  // A probe slightly inside the trace point along the ray must still survive,
  // while the trace point itself sits on the hull: its flow ends within the
  // blow-up tolerance of the driving point.
  const auto flow = forward_flow(chain, tp.point, {}, t);
  const bool near_boundary = flow.blowup() || std::abs(std::abs(flow.final_value) - 1.0) < 0.01;
  CHECK(near_boundary);
  CHECK_THROWS_AS(trace_point(SubordinationChain(DrivingMeasure::uniform(16)), 0.5, 0.99), ValidationError);
  CHECK_THROWS_AS(trace_point(chain, 0.5, 0.5), ValidationError);
}

TEST_CASE("rotating the driving rotates the chain") {
  const auto path = sample_circle_bm(9.0, 1024, 1.0, 44);
  const double alpha = 1.1;
  const SubordinationChain chain(path);
  const SubordinationChain turned(rotated_path(path, alpha));
  const Complex rot = std::polar(1.0, alpha);
  for (Complex z : {Complex{0.3, 0.1}, Complex{-0.5, 0.5}}) {
    CHECK(std::abs(turned(rot * z, 0.7) - rot * chain(z, 0.7)) < 1e-8);
    const auto a = forward_flow(chain, z, {}, 0.7);
    const auto b = forward_flow(turned, rot * z, {}, 0.7);
    CHECK(a.status == b.status);
    if (a.status == FlowStatus::survived) CHECK(std::abs(b.final_value - rot * a.final_value) < 1e-8);
  }
  const auto ta = trace_point(chain, 0.5, 0.99);
  const auto tb = trace_point(turned, 0.5, 0.99);
  CHECK(std::abs(tb.point - rot * ta.point) < 1e-8);
}

TEST_CASE("Caratheodory distance") {
  const SubordinationChain uniform(DrivingMeasure::uniform(64));
  CHECK(caratheodory_distance(uniform, DecayChain{}, 0.5, 10) < 1e-7);

  const SubordinationChain a(sample_circle_bm(4.0, 256, 1.0, 1));
  const SubordinationChain b(sample_circle_bm(4.0, 256, 1.0, 2));
  const SubordinationChain c(sample_circle_bm(16.0, 1024, 1.0, 3));
  CHECK(caratheodory_distance(a, a, 0.5, 4) == 0.0);
  const double ab = caratheodory_distance(a, b, 0.5, 4);
  CHECK(ab == caratheodory_distance(b, a, 0.5, 4));
  CHECK(caratheodory_distance(a, c, 0.5, 4) <= ab + caratheodory_distance(b, c, 0.5, 4) + 1e-15);
  CHECK_THROWS_AS(caratheodory_distance(a, b, 1.0, 4), ValidationError);
}

TEST_CASE("halving the tolerance moves values less than the error estimate") {
  Rng rng(5);
  const auto rho = bumpy_slabs(rng, 4, 64);
  SolverSettings loose;
  loose.rtol = 1e-8;
  loose.atol = 1e-12;
  SolverSettings tight = loose;
  tight.rtol /= 2;
  tight.atol /= 2;
  const SubordinationChain x(rho, 1.0, loose), y(rho, 1.0, tight);
  for (Complex z : {Complex{0.4, 0.0}, Complex{0.0, 0.7}})
    CHECK(std::abs(x(z, 1.0) - y(z, 1.0)) < 1e-7);
}
