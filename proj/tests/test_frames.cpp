#include <doctest.h>

#include <cmath>
#include <random>

#include "grbell/error.hpp"
#include "grbell/frames.hpp"
#include "grbell/geodesic.hpp"

using namespace grbell;

namespace {

SpacetimePoint schw(double r, double theta = M_PI / 2, double phi = 0.0) {
  return {{0.0, r, theta, phi}, Chart::Schwarzschild};
}

void check_orthonormal(const LocalFrame& f, double tol = 1e-9) {
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) {
      const double eta = a != b ? 0.0 : (a == 0 ? -1.0 : 1.0);
      REQUIRE(std::abs(inner(f.metric, f.legs[a], f.legs[b]) - eta) <= tol);
    }
  REQUIRE(f.legs[0][0] > 0.0);
}

Direction3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Direction3::normalized({n(rng), n(rng), n(rng)});
}

}  // namespace

TEST_CASE("Direction3 stays unit length") {
  const auto d = Direction3::normalized({3.0, 4.0, 12.0});
  CHECK(std::abs(norm(d.vec()) - 1.0) < 1e-12);
  CHECK(d[0] == doctest::Approx(3.0 / 13.0));
  const auto e = Direction3::from_degrees(90.0, 60.0);
  CHECK(e[0] == doctest::Approx(0.5));
  CHECK(e[1] == doctest::Approx(std::sqrt(3.0) / 2));
  CHECK(std::abs(e[2]) < 1e-15);
  CHECK_THROWS_AS(Direction3::normalized({0.0, 0.0, 0.0}), Error);
}

TEST_CASE("static frames") {
  SUBCASE("Minkowski gives the coordinate basis") {
    const auto f = build_static_frame(MetricSpec::minkowski(), {{1, 2, 3, 4}, Chart::Cartesian});
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t i = 0; i < 4; ++i) CHECK(f.legs[a][i] == (a == i ? 1.0 : 0.0));
  }
  SUBCASE("Schwarzschild r = 8M") {
    const auto spec = MetricSpec::schwarzschild(1.0);
    const auto f = build_static_frame(spec, schw(8.0));
    CHECK(f.legs[0][0] == doctest::Approx(1.1547005).epsilon(1e-7));
    CHECK(f.legs[0][0] == doctest::Approx(1.0 / std::sqrt(0.75)).epsilon(1e-15));
    CHECK(f.legs[1][1] == doctest::Approx(0.8660254).epsilon(1e-7));
    CHECK(f.legs[1][0] == 0.0);
    check_orthonormal(f, 1e-12);
  }
  SUBCASE("unavailable inside the guard") {
    try {
      build_static_frame(MetricSpec::schwarzschild(1.0), schw(2.0 + 1e-9));
      FAIL("expected StaticFrameUnavailable");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::StaticFrameUnavailable);
    }
  }
}

TEST_CASE("comoving frames") {
  SUBCASE("rest observer in Minkowski") {
    const SpacetimePoint o{{0, 0, 0, 0}, Chart::Cartesian};
    const auto f = build_comoving_frame(MetricSpec::minkowski(), o, {{1, 0, 0, 0}, o});
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t i = 0; i < 4; ++i) CHECK(f.legs[a][i] == (a == i ? 1.0 : 0.0));
  }
  SUBCASE("boost with rapidity 1") {
    const SpacetimePoint o{{0, 0, 0, 0}, Chart::Cartesian};
    const auto f =
        build_comoving_frame(MetricSpec::minkowski(), o, {{std::cosh(1.0), std::sinh(1.0), 0, 0}, o});
    CHECK(f.legs[1][0] == doctest::Approx(1.1752012).epsilon(1e-7));
    CHECK(f.legs[1][1] == doctest::Approx(1.5430806).epsilon(1e-7));
    check_orthonormal(f);
  }
  SUBCASE("random Schwarzschild observers are orthonormal") {
    const auto spec = MetricSpec::schwarzschild(1.0);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> r(2.2, 60.0), th(0.3, 2.8), v(-0.3, 0.3);
    for (int i = 0; i < 500; ++i) {
      const auto p = schw(r(rng), th(rng));
      const double rr = p.coords[1];
      const auto u =
          normalized_tangent(spec, p, {v(rng) * (1 - 2 / rr), v(rng) / rr, v(rng) / rr}, CurveKind::Timelike);
      check_orthonormal(build_comoving_frame(spec, p, u));
    }
  }
  SUBCASE("rejects a non-unit velocity") {
    const SpacetimePoint o{{0, 0, 0, 0}, Chart::Cartesian};
    CHECK_THROWS_AS(build_comoving_frame(MetricSpec::minkowski(), o, {{2, 0, 0, 0}, o}), Error);
  }
}

TEST_CASE("embed_direction") {
  const SpacetimePoint o{{0, 0, 0, 0}, Chart::Cartesian};
  const auto flat = build_static_frame(MetricSpec::minkowski(), o);
  const auto v = embed_direction(flat, Direction3::normalized({1, 0, 0}));
  CHECK(v.components == Vec4{0, 1, 0, 0});

  const auto spec = MetricSpec::schwarzschild(1.0);
  std::mt19937_64 rng(5);
  const auto u = normalized_tangent(spec, schw(7.0), {0.1, 0.0, 0.05}, CurveKind::Timelike);
  for (const auto& f : {build_static_frame(spec, schw(7.0)), build_comoving_frame(spec, schw(7.0), u)}) {
    for (int i = 0; i < 200; ++i) {
      const auto e = embed_direction(f, random_direction(rng));
      REQUIRE(std::abs(inner(f.metric, e.components, f.legs[0])) <= 1e-10);
      REQUIRE(std::abs(inner(f.metric, e.components, e.components) - 1.0) <= 1e-9);
    }
  }
}

TEST_CASE("project_to_frame") {
  const SpacetimePoint o{{0, 0, 0, 0}, Chart::Cartesian};
  const auto f = build_static_frame(MetricSpec::minkowski(), o);

  SUBCASE("purely spatial vector") {
    const auto p = project_to_frame(f, {{0, 0, 3, 4}, o});
    CHECK(p.w == 1.0);
    CHECK(p.direction[1] == doctest::Approx(0.6));
    CHECK(p.direction[2] == doctest::Approx(0.8));
    CHECK_FALSE(p.degenerate);
  }
  SUBCASE("equal time and space components") {
    const auto p = project_to_frame(f, {{1, 1, 0, 0}, o});
    CHECK(p.w == doctest::Approx(0.7071068).epsilon(1e-7));
    CHECK(p.direction[0] == doctest::Approx(1.0));
  }
  SUBCASE("purely timelike vector is degenerate") {
    const auto p = project_to_frame(f, {{2, 0, 0, 0}, o});
    CHECK(p.w == 0.0);
    CHECK(p.degenerate);
  }
  SUBCASE("zero vector") {
    try {
      project_to_frame(f, {{0, 0, 0, 0}, o});
      FAIL("expected ZeroVector");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ZeroVector);
    }
  }
  SUBCASE("weight bounds and round trip on random inputs") {
    const auto spec = MetricSpec::schwarzschild(1.0);
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n(0.0, 2.0);
    const auto sf = build_static_frame(spec, schw(5.0));
    for (int i = 0; i < 2000; ++i) {
      const FourVector v{{n(rng), n(rng), n(rng) / 5, n(rng) / 5}, schw(5.0)};
      const auto p = project_to_frame(sf, v);
      REQUIRE(p.w >= 0.0);
      REQUIRE(p.w <= 1.0);
      REQUIRE(std::abs(p.w * p.w + p.time_component * p.time_component - 1.0) <= 1e-10);

      const auto d = random_direction(rng);
      const auto q = project_to_frame(sf, embed_direction(sf, d));
      REQUIRE(std::abs(q.w - 1.0) <= 1e-10);
      for (std::size_t k = 0; k < 3; ++k) REQUIRE(std::abs(q.direction[k] - d[k]) <= 1e-10);
    }
  }
}

TEST_CASE("flat transport between static frames keeps full weight") {
  const auto spec = MetricSpec::minkowski();
  const SpacetimePoint o{{0, 0, 0, 0}, Chart::Cartesian};
  const double g = 1.0 / std::sqrt(1.0 - 0.25);
  const auto geo_l = integrate_geodesic(spec, o, {{g, -0.5 * g, 0, 0}, o}, StopCondition::proper_time(2.0));
  const auto geo_r = integrate_geodesic(spec, o, {{g, 0.5 * g, 0, 0}, o}, StopCondition::proper_time(2.0));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 50; ++i) {
    const auto d = random_direction(rng);
    const auto vR = embed_direction(build_static_frame(spec, geo_r.end_point()), d);
    const auto vL = transport_R_to_L(geo_l, geo_r, vR);
    const auto p = project_to_frame(build_static_frame(spec, geo_l.end_point()), vL.v);
    REQUIRE(std::abs(p.w - 1.0) <= 1e-9);
  }
}
