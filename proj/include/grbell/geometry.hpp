#pragma once

// Spacetime geometry: points, vectors, metrics and Christoffel symbols.
// Geometric units G = c = 1, signature (-,+,+,+).

#include <array>
#include <cstddef>

namespace grbell {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;

enum class Chart {
  Cartesian,      // (t, x, y, z), Minkowski only
  Schwarzschild,  // (t, r, theta, phi)
};

struct SpacetimePoint {
  Vec4 coords{};
  Chart chart = Chart::Cartesian;
};

struct FourVector {
  Vec4 components{};
  SpacetimePoint base;
};

enum class MetricKind { Minkowski, Schwarzschild };

struct MetricSpec {
  MetricKind kind = MetricKind::Minkowski;
  double mass = 0.0;
  // Relative guard above r = 2M; points with r <= 2M(1 + horizon_epsilon)
  // are rejected.
  double horizon_epsilon = 1e-6;

  static MetricSpec minkowski() { return {}; }
  static MetricSpec schwarzschild(double mass, double horizon_epsilon = 1e-6);

  Chart chart() const {
    return kind == MetricKind::Minkowski ? Chart::Cartesian : Chart::Schwarzschild;
  }
  double guard_radius() const { return 2.0 * mass * (1.0 + horizon_epsilon); }
};

struct MetricTensor {
  Mat4 g{};
  SpacetimePoint base;

  double operator()(std::size_t mu, std::size_t nu) const { return g[mu][nu]; }
};

// Gamma^mu_{alpha beta}, indexed [mu][alpha][beta].
struct ChristoffelSymbols {
  std::array<Mat4, 4> gamma{};
  SpacetimePoint base;

  double operator()(std::size_t mu, std::size_t a, std::size_t b) const {
    return gamma[mu][a][b];
  }
  // Gamma^mu_{ab} u^a v^b
  Vec4 contract(const Vec4& u, const Vec4& v) const;
};

// Throws Error{InvalidChart} or Error{HorizonDomain} when p lies outside the
// metric's chart.
void check_point(const MetricSpec& spec, const SpacetimePoint& p);

MetricTensor metric_at(const MetricSpec& spec, const SpacetimePoint& p);
ChristoffelSymbols christoffel_at(const MetricSpec& spec, const SpacetimePoint& p);

// g_{mu nu} u^mu v^nu. Throws Error{BasePointMismatch} if u or v is not based
// at g's point.
double inner(const MetricTensor& g, const FourVector& u, const FourVector& v);

// Unchecked contraction of raw components.
double inner(const MetricTensor& g, const Vec4& u, const Vec4& v);

bool same_point(const SpacetimePoint& a, const SpacetimePoint& b, double tol = 1e-9);

// Geodesic acceleration -Gamma^mu_{ab} u^a u^b.
Vec4 geodesic_acceleration(const MetricSpec& spec, const SpacetimePoint& p, const Vec4& u);

}  // namespace grbell
