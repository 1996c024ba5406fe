#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "wiplab/maps.hpp"
#include "wiplab/observables.hpp"
#include "wiplab/rng.hpp"

using namespace wiplab;

TEST_CASE("lsv_step branch values") {
  CHECK(lsv_step(0.25, 0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(lsv_step(0.25, 0.5) == doctest::Approx(0.4267766953).epsilon(1e-9));
  CHECK(lsv_step(0.75, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("lsv_step domain errors") {
  CHECK_THROWS_AS(lsv_step(1.0, 0.25), std::domain_error);
  CHECK_THROWS_AS(lsv_step(-0.1, 0.25), std::domain_error);
  CHECK_THROWS_AS(lsv_step(0.3, 1.5), std::domain_error);
  CHECK_THROWS_AS(lsv_step(0.3, -0.1), std::domain_error);
}

TEST_CASE("gamma zero reduces to the doubling map") {
  for (std::uint32_t k = 0; k < 10000; ++k) {
    const double x = van_der_corput(k);
    CHECK(lsv_step(x, 0.0) == doctest::Approx(doubling_step(x)).epsilon(1e-14));
  }
}

TEST_CASE("lsv_step monotone on each branch, branch images fill [0,1)") {
  const double gamma = 0.25;
  double prev = lsv_step(1e-12, gamma);
  for (int i = 1; i < 2000; ++i) {
    const double x = 0.5 * i / 2000.0;
    const double y = lsv_step(x, gamma);
    CHECK(y >= prev);
    prev = y;
  }
  prev = lsv_step(0.5, gamma);
  for (int i = 1; i < 2000; ++i) {
    const double x = 0.5 + 0.5 * i / 2000.0;
    const double y = lsv_step(x, gamma);
    CHECK(y >= prev);
    prev = y;
  }
  // endpoint checks: x -> (1/2)^- and x -> 1^- both approach 1
  CHECK(lsv_step(0.5 - 1e-12, gamma) > 1.0 - 1e-8);
  CHECK(lsv_step(1.0 - 1e-12, gamma) > 1.0 - 1e-8);
  CHECK(lsv_step(0.5, gamma) < 1e-10);  // boundary goes to the second branch
}

TEST_CASE("lsv_branch0_inverse is a right inverse") {
  for (double gamma : {0.0, 0.25, 0.5, 0.75}) {
    for (std::uint32_t k = 0; k < 1000; ++k) {
      const double y = van_der_corput(k);
      const double x = lsv_branch0_inverse(y, gamma);
      CHECK(x >= 0.0);
      CHECK(x < 0.5);
      CHECK(lsv_step(x, gamma) == doctest::Approx(y).epsilon(1e-10));
    }
  }
}

TEST_CASE("baker_step hand-evaluated points") {
  MapDescriptor desc;
  desc.kind = MapKind::UniformBaker;
  const Point a = baker_step({0.25, 0.5}, desc);
  CHECK(a.base == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(a.fiber == doctest::Approx(0.25).epsilon(1e-14));
  const Point b = baker_step({0.75, 0.0}, desc);
  CHECK(b.base == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(b.fiber == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("baker roundtrips") {
  for (MapKind kind : {MapKind::UniformBaker, MapKind::IntermittentBaker}) {
    MapDescriptor desc;
    desc.kind = kind;
    desc.gamma = kind == MapKind::IntermittentBaker ? 0.25 : 0.0;
    auto g = make_stream(42, 0);
    for (int i = 0; i < 1000; ++i) {
      const Point p{uniform01(g), uniform01(g)};
      const Point fwd = baker_step(p, desc);
      const Point back = baker_inverse(fwd, desc);
      CHECK(back.base == doctest::Approx(p.base).epsilon(1e-9));
      CHECK(back.fiber == doctest::Approx(p.fiber).epsilon(1e-9));
      const Point again = baker_step(baker_inverse(p, desc), desc);
      CHECK(again.base == doctest::Approx(p.base).epsilon(1e-9));
      CHECK(again.fiber == doctest::Approx(p.fiber).epsilon(1e-9));
    }
  }
}

TEST_CASE("baker contracts fibers by exactly the configured rate") {
  MapDescriptor desc;
  desc.kind = MapKind::UniformBaker;
  desc.fiber_contraction = 0.5;
  auto g = make_stream(7, 1);
  for (int i = 0; i < 200; ++i) {
    const double x = uniform01(g);
    const double y1 = uniform01(g), y2 = uniform01(g);
    const Point a = baker_step({x, y1}, desc);
    const Point b = baker_step({x, y2}, desc);
    CHECK(std::abs(a.fiber - b.fiber) ==
          doctest::Approx(0.5 * std::abs(y1 - y2)).epsilon(1e-14));
  }
}

TEST_CASE("descriptor validation and kind parsing") {
  MapDescriptor bad;
  bad.gamma = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad.gamma = 0.0;
  bad.fiber_contraction = 0.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad.fiber_contraction = 1.0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  CHECK_THROWS_AS(parse_map_kind("nope"), std::invalid_argument);
  for (MapKind kind : {MapKind::Doubling, MapKind::LSV, MapKind::UniformBaker,
                       MapKind::IntermittentBaker})
    CHECK(parse_map_kind(map_kind_name(kind)) == kind);
}

TEST_CASE("baker step rejects non-baker kinds and invalid points") {
  MapDescriptor doubling;
  CHECK_THROWS_AS(baker_step({0.5, 0.5}, doubling), std::invalid_argument);
  MapDescriptor baker;
  baker.kind = MapKind::UniformBaker;
  CHECK_THROWS_AS(baker_step({1.5, 0.5}, baker), std::domain_error);
  CHECK_THROWS_AS(baker_inverse({0.5, -0.1}, baker), std::domain_error);
}

TEST_CASE("orbit determinism and hand-checked doubling orbit") {
  MapDescriptor desc;
  const Observable obs = make_observable("base", desc);
  const Orbit a = sample_orbit(desc, obs, std::nullopt, 100, 50, 123);
  const Orbit b = sample_orbit(desc, obs, std::nullopt, 100, 50, 123);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.points[i].base == b.points[i].base);  // bit-identical
    CHECK(a.values(i, 0) == b.values(i, 0));
  }
  const Orbit c = sample_orbit(desc, obs, Point{0.1, 0.0}, 3, 0, 0);
  CHECK(c.points[0].base == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(c.points[1].base == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(c.points[2].base == doctest::Approx(0.4).epsilon(1e-14));
}

TEST_CASE("doubling time average of x-1/2 vanishes") {
  MapDescriptor desc;
  const double mean = birkhoff_mean(
      desc, [](const Point& p) { return p.base - 0.5; }, 1'000'000, 99);
  // 3 x (sample std)/1e3 with sample std ~ 1/sqrt(12)
  CHECK(std::abs(mean) < 3.0 * 0.2887 / 1000.0);
}

TEST_CASE("lsv time averages are Cauchy across split samples") {
  MapDescriptor desc;
  desc.kind = MapKind::LSV;
  desc.gamma = 0.25;
  auto f = [](const Point& p) { return p.base; };
  const double m1 = birkhoff_mean(desc, f, 1'000'000, 5);
  const double m2 = birkhoff_mean(desc, f, 1'000'000, 6);
  CHECK(std::abs(m1 - m2) < 1e-2);
}

TEST_CASE("observable registry: centering, dimensions, errors") {
  MapDescriptor doubling;
  for (const auto& name : observable_names()) {
    if (name == "fiber" || name == "baker-pair") continue;
    const Observable obs = make_observable(name, doubling);
    CHECK(obs.sup_norm_bound > 0.0);
  }
  CHECK(make_observable("doubling-pair", doubling).dimension == 2);
  CHECK_THROWS_AS(make_observable("unknown", doubling), std::invalid_argument);
  CHECK_THROWS_AS(make_observable("fiber", doubling), std::invalid_argument);
  MapDescriptor lsv;
  lsv.kind = MapKind::LSV;
  lsv.gamma = 0.25;
  CHECK_THROWS_AS(make_observable("doubling-pair", lsv), std::invalid_argument);
  // built-ins are mean zero under the physical measure
  for (const char* name : {"base", "cos2pi", "coboundary"}) {
    const Observable obs = make_observable(name, lsv);
    const double mean = birkhoff_mean(
        lsv, [&](const Point& p) { return obs.eval(p)(0); }, 500'000, 17);
    CHECK(std::abs(mean) < 5e-3);
  }
}

TEST_CASE("wip scaling symmetry: observables bounded by their stated sup") {
  MapDescriptor baker;
  baker.kind = MapKind::UniformBaker;
  const Observable obs = make_observable("baker-pair", baker);
  auto g = make_stream(3, 3);
  for (int i = 0; i < 2000; ++i) {
    const Point p{uniform01(g), uniform01(g)};
    CHECK(obs.eval(p).norm() <= obs.sup_norm_bound + 1e-12);
  }
}
