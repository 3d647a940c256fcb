#include "grbell/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "grbell/error.hpp"

namespace grbell {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::HorizonDomain: return "HorizonDomain";
    case ErrorCode::InvalidChart: return "InvalidChart";
    case ErrorCode::BasePointMismatch: return "BasePointMismatch";
    case ErrorCode::HorizonApproach: return "HorizonApproach";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::BadNormalization: return "BadNormalization";
    case ErrorCode::CommonOriginMismatch: return "CommonOriginMismatch";
    case ErrorCode::StaticFrameUnavailable: return "StaticFrameUnavailable";
    case ErrorCode::DegenerateBasis: return "DegenerateBasis";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::DegenerateD: return "DegenerateD";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

MetricSpec MetricSpec::schwarzschild(double mass, double horizon_epsilon) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::ValidationError, "Schwarzschild mass must be positive");
  }
  if (!(horizon_epsilon > 0.0)) {
    throw Error(ErrorCode::ValidationError, "horizon_epsilon must be positive");
  }
  MetricSpec s;
  s.kind = MetricKind::Schwarzschild;
  s.mass = mass;
  s.horizon_epsilon = horizon_epsilon;
  return s;
}

void check_point(const MetricSpec& spec, const SpacetimePoint& p) {
  for (double c : p.coords) {
    if (!std::isfinite(c)) throw Error(ErrorCode::InvalidChart, "non-finite coordinate");
  }
  if (p.chart != spec.chart()) {
    throw Error(ErrorCode::InvalidChart, "point chart does not match metric");
  }
  if (spec.kind == MetricKind::Schwarzschild) {
    const double r = p.coords[1];
    if (r <= spec.guard_radius()) {
      throw Error(ErrorCode::HorizonDomain,
                  "r = " + std::to_string(r) + " is inside the horizon guard");
    }
    const double th = p.coords[2];
    if (!(th > 0.0 && th < std::numbers::pi)) {
      throw Error(ErrorCode::InvalidChart, "polar angle outside (0, pi)");
    }
  }
}

MetricTensor metric_at(const MetricSpec& spec, const SpacetimePoint& p) {
  check_point(spec, p);
  MetricTensor m;
  m.base = p;
  if (spec.kind == MetricKind::Minkowski) {
    m.g[0][0] = -1.0;
    m.g[1][1] = m.g[2][2] = m.g[3][3] = 1.0;
    return m;
  }
  const double r = p.coords[1];
  const double s = std::sin(p.coords[2]);
  const double f = (r - 2.0 * spec.mass) / r;
  m.g[0][0] = -f;
  m.g[1][1] = 1.0 / f;
  m.g[2][2] = r * r;
  m.g[3][3] = r * r * s * s;
  return m;
}

ChristoffelSymbols christoffel_at(const MetricSpec& spec, const SpacetimePoint& p) {
  check_point(spec, p);
  ChristoffelSymbols c;
  c.base = p;
  if (spec.kind == MetricKind::Minkowski) return c;

  const double M = spec.mass;
  const double r = p.coords[1];
  const double th = p.coords[2];
  const double s = std::sin(th);
  const double co = std::cos(th);
  const double f = (r - 2.0 * M) / r;
  auto set = [&c](int mu, int a, int b, double v) {
    c.gamma[mu][a][b] = v;
    c.gamma[mu][b][a] = v;
  };
  set(0, 0, 1, M / (r * r * f));
  set(1, 0, 0, M * f / (r * r));
  set(1, 1, 1, -M / (r * r * f));
  set(1, 2, 2, -r * f);
  set(1, 3, 3, -r * f * s * s);
  set(2, 1, 2, 1.0 / r);
  set(2, 3, 3, -s * co);
  set(3, 1, 3, 1.0 / r);
  set(3, 2, 3, co / s);
  return c;
}

Vec4 ChristoffelSymbols::contract(const Vec4& u, const Vec4& v) const {
  Vec4 out{};
  for (std::size_t mu = 0; mu < 4; ++mu) {
    double acc = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
      if (u[a] == 0.0) continue;
      for (std::size_t b = 0; b < 4; ++b) acc += gamma[mu][a][b] * u[a] * v[b];
    }
    out[mu] = acc;
  }
  return out;
}

bool same_point(const SpacetimePoint& a, const SpacetimePoint& b, double tol) {
  if (a.chart != b.chart) return false;
  for (std::size_t i = 0; i < 4; ++i) {
    const double scale = std::max({1.0, std::abs(a.coords[i]), std::abs(b.coords[i])});
    if (std::abs(a.coords[i] - b.coords[i]) > tol * scale) return false;
  }
  return true;
}

double inner(const MetricTensor& g, const Vec4& u, const Vec4& v) {
  double acc = 0.0;
  for (std::size_t mu = 0; mu < 4; ++mu) {
    for (std::size_t nu = 0; nu < 4; ++nu) acc += g.g[mu][nu] * u[mu] * v[nu];
  }
  return acc;
}

double inner(const MetricTensor& g, const FourVector& u, const FourVector& v) {
  if (!same_point(g.base, u.base) || !same_point(g.base, v.base)) {
    throw Error(ErrorCode::BasePointMismatch, "vectors not based at the metric's point");
  }
  // Symmetrize explicitly so inner(g,u,v) == inner(g,v,u) bit for bit.
  double acc = 0.0;
  for (std::size_t mu = 0; mu < 4; ++mu) {
    acc += g.g[mu][mu] * (u.components[mu] * v.components[mu]);
    for (std::size_t nu = mu + 1; nu < 4; ++nu) {
      acc += g.g[mu][nu] *
             (u.components[mu] * v.components[nu] + u.components[nu] * v.components[mu]);
    }
  }
  return acc;
}

Vec4 geodesic_acceleration(const MetricSpec& spec, const SpacetimePoint& p, const Vec4& u) {
  const Vec4 gu = christoffel_at(spec, p).contract(u, u);
  return {-gu[0], -gu[1], -gu[2], -gu[3]};
}

}  // namespace grbell
