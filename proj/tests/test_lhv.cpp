#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "grbell/error.hpp"
#include "grbell/lhv.hpp"
#include "oracles.hpp"

using namespace grbell;

namespace {

Direction3 azimuth(double deg) { return Direction3::from_degrees(90.0, deg); }

Direction3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  return Direction3::normalized({n(rng), n(rng), n(rng)});
}

}  // namespace

TEST_CASE("random streams") {
  RandomStream a(42, 7), b(42, 7), c(42, 8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next_u64();
    REQUIRE(x == b.next_u64());
    differs |= x != c.next_u64();
  }
  CHECK(differs);
  RandomStream s(1, 0);
  for (int i = 0; i < 10000; ++i) {
    const double u = s.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(std::abs(norm(s.unit_vector()) - 1.0) <= 1e-12);
  }
}

TEST_CASE("sign model responses") {
  const auto m = make_sign_model();
  const auto b = azimuth(25.0);
  CHECK(m.respond_A(b, {b.vec()}) == 1.0);
  CHECK(m.respond_B(make_projection(1.0, b), {b.vec()}) == -1.0);
  CHECK(m.respond_B(make_projection(0.5, b), {{-b[0], -b[1], -b[2]}}) == 0.25);
  // Ties resolve to +1.
  CHECK(m.respond_A(Direction3::normalized({1, 0, 0}), {{0, 1, 0}}) == 1.0);

  SUBCASE("value sets are exact") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    RandomStream s(3, 0);
    for (int i = 0; i < 10000; ++i) {
      const auto lam = m.sample(s);
      REQUIRE(std::abs(norm(lam.lambda) - 1.0) <= 1e-12);
      const double A = m.respond_A(random_direction(rng), lam);
      REQUIRE((A == 1.0 || A == -1.0));
      const auto p = make_projection(w(rng), random_direction(rng));
      REQUIRE(std::abs(m.respond_B(p, lam)) == p.w * p.w);
    }
  }
}

TEST_CASE("anticorrelation constraint") {
  const auto m = make_sign_model();
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> w(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const auto a = random_direction(rng);
    CHECK(verify_anticorrelation(m, a, make_projection(w(rng), a), 500, i));
  }
  CHECK(verify_anticorrelation(m, azimuth(0.0), make_projection(0.0, azimuth(0.0)), 10000, 1));

  auto flipped = make_sign_model();
  flipped.respond_B = [](const ProjectionResult& p, const HiddenVariable& h) {
    return dot(p.direction.vec(), h.lambda) < 0.0 ? -p.w * p.w : p.w * p.w;
  };
  CHECK_FALSE(verify_anticorrelation(flipped, azimuth(0.0), make_projection(1.0, azimuth(0.0)), 10000, 1));
}

TEST_CASE("quadrature oracle matches the closed form") {
  for (double deg : {0.0, 30.0, 60.0, 90.0, 120.0, 180.0}) {
    const double th = deg * M_PI / 180.0;
    CHECK(oracle::sign_product_quadrature(th, 1000) == doctest::Approx(1.0 - 2.0 * th / M_PI).epsilon(2e-3));
  }
}

TEST_CASE("Monte Carlo correlation") {
  const auto m = make_sign_model();
  const auto a = azimuth(0.0);

  SUBCASE("aligned settings give exactly -1") {
    const auto e = correlation_mc(m, a, make_projection(1.0, a), 10000, 5);
    CHECK(e.mean == -1.0);
    CHECK(e.std_error == 0.0);
  }
  SUBCASE("agrees with quadrature within 4 sigma") {
    const std::uint64_t n = 1'000'000;
    for (double deg : {30.0, 60.0, 90.0, 120.0}) {
      const double w = deg == 60.0 ? 1.0 : 0.8;
      const double expected = -w * w * oracle::sign_product_quadrature(deg * M_PI / 180.0, 2000);
      const auto e = correlation_mc(m, a, make_projection(w, azimuth(deg)), n, 11);
      INFO("theta = " << deg << " mean = " << e.mean << " se = " << e.std_error);
      CHECK(std::abs(e.mean - expected) <= kSigmaThreshold * e.std_error);
    }
  }
  SUBCASE("reproducible and independent of worker count") {
    const auto p = make_projection(0.7, azimuth(75.0));
    const auto e1 = correlation_mc(m, a, p, 50'000, 99, 1);
    const auto e8 = correlation_mc(m, a, p, 50'000, 99, 8);
    const auto again = correlation_mc(m, a, p, 50'000, 99, 3);
    CHECK(e1.mean == e8.mean);
    CHECK(e1.std_error == e8.std_error);
    CHECK(e1.mean == again.mean);
    CHECK(e1.seed == 99);
    CHECK(e1.n == 50'000);
  }
  SUBCASE("quadrupling n halves the standard error") {
    const auto p = make_projection(1.0, azimuth(60.0));
    double ratio_sum = 0.0;
    const int reps = 8;
    for (int s = 0; s < reps; ++s) {
      const auto small = correlation_mc(m, a, p, 20'000, 100 + s);
      const auto big = correlation_mc(m, a, p, 80'000, 200 + s);
      ratio_sum += big.std_error / small.std_error;
    }
    CHECK(std::abs(ratio_sum / reps - 0.5) <= 0.1);
  }
  SUBCASE("too few samples") {
    try {
      correlation_mc(m, a, make_projection(1.0, a), 99, 0);
      FAIL("expected InsufficientSamples");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InsufficientSamples);
    }
  }
}

TEST_CASE("LHV inequality audit") {
  const auto m = make_sign_model();

  SUBCASE("0/60/120 sits on the boundary") {
    const SettingsTriple t{azimuth(0.0), azimuth(60.0), azimuth(120.0)};
    const AuditCase c{t, make_projection(1.0, t.b), make_projection(1.0, t.c)};
    const auto r = lhv_inequality_audit(m, std::span(&c, 1), 200'000, 3);
    REQUIRE(r.entries.size() == 1);
    const auto& e = r.entries[0];
    CHECK(e.lhs == doctest::Approx(2.0 / 3.0).epsilon(0.01));
    CHECK(e.rhs == doctest::Approx(2.0 / 3.0).epsilon(0.01));
    CHECK(e.pass);
    CHECK(r.pass);
  }
  SUBCASE("b = c") {
    const SettingsTriple t{azimuth(0.0), azimuth(45.0), azimuth(45.0)};
    const AuditCase c{t, make_projection(0.8, t.b), make_projection(0.8, t.c)};
    const auto r = lhv_inequality_audit(m, std::span(&c, 1), 10'000, 3);
    CHECK(r.entries[0].lhs == 0.0);
    CHECK(r.pass);
  }
  SUBCASE("random triples pass and are worker independent") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> w(0.0, 1.0);
    std::vector<AuditCase> cases;
    for (int i = 0; i < 40; ++i) {
      const SettingsTriple t{random_direction(rng), random_direction(rng), random_direction(rng)};
      double wb = w(rng), wc = w(rng);
      if (wb < wc) std::swap(wb, wc);
      cases.push_back({t, make_projection(wb, t.b), make_projection(wc, t.c)});
    }
    const auto r1 = lhv_inequality_audit(m, cases, 20'000, 77, 1);
    const auto r8 = lhv_inequality_audit(m, cases, 20'000, 77, 8);
    CHECK(r1.pass);
    CHECK(r1.failures == 0);
    for (std::size_t i = 0; i < cases.size(); ++i) {
      REQUIRE(r1.entries[i].margin == r8.entries[i].margin);
      REQUIRE(r1.entries[i].sigma == r8.entries[i].sigma);
    }
  }
  SUBCASE("a model without perfect anticorrelation is caught") {
    auto flipped = make_sign_model();
    flipped.respond_B = [](const ProjectionResult& p, const HiddenVariable& h) {
      return dot(p.direction.vec(), h.lambda) < 0.0 ? -p.w * p.w : p.w * p.w;
    };
    const SettingsTriple t{azimuth(0.0), azimuth(0.0), azimuth(180.0)};
    const AuditCase c{t, make_projection(1.0, t.b), make_projection(1.0, t.c)};
    const auto r = lhv_inequality_audit(flipped, std::span(&c, 1), 10'000, 5);
    CHECK(r.entries[0].lhs == 2.0);
    CHECK(r.entries[0].rhs == 0.0);
    CHECK_FALSE(r.pass);
    CHECK(r.failures == 1);
  }
  SUBCASE("too few samples") {
    const SettingsTriple t{azimuth(0.0), azimuth(60.0), azimuth(120.0)};
    const AuditCase c{t, make_projection(1.0, t.b), make_projection(1.0, t.c)};
    CHECK_THROWS_AS(lhv_inequality_audit(m, std::span(&c, 1), 10, 0), Error);
  }
}
