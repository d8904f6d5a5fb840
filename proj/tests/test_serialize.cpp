#include <doctest.h>

#include <sstream>

#include "llab/driving_spec.hpp"
#include "llab/rng.hpp"
#include "llab/serialize.hpp"

using namespace llab;

TEST_CASE("measure JSON round trip keeps every bit") {
  Rng rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd bins(33);
    for (Index k = 0; k < bins.size(); ++k) bins[k] = rng.uniform() + 1e-3;
    const auto mu = MeasureS1::from_bins(bins / bins.sum());
    const auto back = measure_from_json(Json::parse(to_json(mu).dump()));
    CHECK(back.bins() == mu.bins());
    const auto atoms = MeasureS1::from_atoms({{rng.uniform() * 6, 0.3}, {rng.uniform() * 6 + 0.01, 0.7}});
    const auto atoms_back = measure_from_json(Json::parse(to_json(atoms).dump()));
    REQUIRE(atoms_back.atoms().size() == atoms.atoms().size());
    for (std::size_t i = 0; i < atoms.atoms().size(); ++i) {
      CHECK(atoms_back.atoms()[i].angle == atoms.atoms()[i].angle);
      CHECK(atoms_back.atoms()[i].weight == atoms.atoms()[i].weight);
    }
  }
}

TEST_CASE("driving measures, tuples and rate reports round trip") {
  const auto rho = parse_driving_spec("slabs:[uniform, cosine:0.5, dirac:1.0, cosine:-0.25]", {64, 0});
  const auto j = to_json(rho);
  CHECK(j.at("schema_version") == kSchemaVersion);
  const auto back = driving_from_json(Json::parse(j.dump()));
  REQUIRE(back.slab_count() == 4);
  CHECK(back.slabs()[1].bins() == rho.slabs()[1].bins());
  CHECK(back.slabs()[2].is_atomic());

  const auto tuple = project(rho, 1);
  const auto tuple_back = tuple_from_json(Json::parse(to_json(tuple).dump()));
  CHECK(tuple_back.level == 1);
  CHECK(tuple_back.entries[0].bins() == tuple.entries[0].bins());

  const auto report = variational_rate(MeasureS1::cosine(0.5, 64), {.degree = 6});
  const auto report_back = rate_report_from_json(Json::parse(to_json(report).dump()));
  CHECK(report_back.value == report.value);
  CHECK(report_back.witness->packed() == report.witness->packed());
  CHECK(report_back.diagnostics.iterations == report.diagnostics.iterations);
  const auto inf = rate_report_from_json(to_json(dirichlet_rate(MeasureS1::dirac(0.0))));
  CHECK(inf.value.is_infinite());

  CHECK_THROWS_AS(to_json(dirac_path_measure(sample_circle_bm(1.0, 16, 1.0, 0))), ValidationError);
  Json wrong = to_json(MeasureS1::uniform(4));
  wrong["schema_version"] = 99;
  CHECK_THROWS_AS(measure_from_json(wrong), ValidationError);
}

TEST_CASE("decimal formatting round trips at 17 digits") {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const double x = std::ldexp(rng.uniform() - 0.5, static_cast<int>(rng() % 200) - 100);
    CHECK(parse_double(format_double(x)) == x);
  }
  CHECK(format_double(INFINITY) == "inf");
  CHECK(std::isinf(parse_double("inf")));
  CHECK_THROWS_AS(parse_double("1.0x"), ValidationError);
}

TEST_CASE("CSV writers") {
  HullGrid grid;
  grid.probes.push_back({Complex{0.5, 0.25}, 0.125, ProbeStatus::swallowed});
  grid.probes.push_back({Complex{0.1, 0.0}, std::nullopt, ProbeStatus::alive});
  std::ostringstream h;
  write_hull_csv(h, grid);
  CHECK(h.str() == "re,im,survival_time,status\n0.5,0.25,0.125,swallowed\n0.10000000000000001,0,,alive\n");

  std::ostringstream t;
  write_trace_csv(t, {{0.5, TracePoint{Complex{0.25, 0.0}, std::nullopt, std::nullopt}}});
  CHECK(t.str() == "t,re,im,error_gauge\n0.5,0.25,0,\n");
}

TEST_CASE("spec mini-language") {
  const SpecContext ctx{32, 5};
  CHECK(parse_measure_spec("uniform", ctx).bins() == MeasureS1::uniform(32).bins());
  CHECK(parse_measure_spec(" dirac:3.14 ", ctx).atoms()[0].angle == 3.14);
  CHECK(parse_measure_spec("cosine:0.5", ctx).bins() == MeasureS1::cosine(0.5, 32).bins());
  CHECK(std::abs(parse_measure_spec("bm:10", ctx).total() - 1.0) < 1e-12);
  CHECK(parse_driving_spec("bm:10", ctx).is_path_backed());
  CHECK(parse_driving_spec("cosine:0.1", ctx).slab_count() == 1);
  CHECK_THROWS_AS(parse_measure_spec("cosine:2", ctx), ValidationError);
  CHECK_THROWS_AS(parse_measure_spec("gauss:1", ctx), ValidationError);
  CHECK_THROWS_AS(parse_measure_spec("dirac:abc", ctx), ValidationError);
  CHECK_THROWS_AS(parse_driving_spec("slabs:[uniform,,uniform]", ctx), ValidationError);
  CHECK_THROWS_AS(parse_driving_spec("slabs:[bm:3]", ctx), ValidationError);
  CHECK_THROWS_AS(parse_driving_spec("slabs:uniform", ctx), ValidationError);
}
