#include "grbell/frames.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "grbell/error.hpp"

namespace grbell {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

Direction3 Direction3::normalized(const Vec3& v) {
  const double n = norm(v);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::ZeroVector, "direction must be a finite nonzero vector");
  }
  return Direction3({v[0] / n, v[1] / n, v[2] / n});
}

Direction3 Direction3::from_angles(double polar, double azimuth) {
  const double s = std::sin(polar);
  return normalized({s * std::cos(azimuth), s * std::sin(azimuth), std::cos(polar)});
}

Direction3 Direction3::from_degrees(double polar_deg, double azimuth_deg) {
  constexpr double k = std::numbers::pi / 180.0;
  return from_angles(polar_deg * k, azimuth_deg * k);
}

namespace {

// Orthonormalizes `seed` against the already built legs [0, count).
Vec4 gram_schmidt_step(const MetricTensor& g, const std::array<Vec4, 4>& legs, std::size_t count,
                       Vec4 seed) {
  for (std::size_t b = 0; b < count; ++b) {
    const double eta = b == 0 ? -1.0 : 1.0;
    const double c = inner(g, legs[b], seed) * eta;
    for (std::size_t i = 0; i < 4; ++i) seed[i] -= c * legs[b][i];
  }
  const double n2 = inner(g, seed, seed);
  if (!(n2 > 1e-24)) {
    throw Error(ErrorCode::DegenerateBasis, "Gram-Schmidt pivot below 1e-12");
  }
  const double n = std::sqrt(n2);
  for (double& c : seed) c /= n;
  return seed;
}

}  // namespace

LocalFrame build_static_frame(const MetricSpec& spec, const SpacetimePoint& p) {
  LocalFrame f;
  f.base = p;
  try {
    f.metric = metric_at(spec, p);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::HorizonDomain) {
      throw Error(ErrorCode::StaticFrameUnavailable, "no static observer inside the horizon guard");
    }
    throw;
  }
  const MetricTensor& g = f.metric;
  f.legs[0] = {1.0 / std::sqrt(-g(0, 0)), 0.0, 0.0, 0.0};
  for (std::size_t a = 1; a < 4; ++a) {
    Vec4 seed{};
    seed[a] = 1.0;
    f.legs[a] = gram_schmidt_step(g, f.legs, a, seed);
  }
  return f;
}

LocalFrame build_comoving_frame(const MetricSpec& spec, const SpacetimePoint& p,
                                const FourVector& u) {
  LocalFrame f;
  f.base = p;
  f.metric = metric_at(spec, p);
  const MetricTensor& g = f.metric;
  if (!same_point(u.base, p)) {
    throw Error(ErrorCode::BasePointMismatch, "4-velocity not based at the frame point");
  }
  const double uu = inner(g, u.components, u.components);
  if (!(std::abs(uu + 1.0) <= 1e-8) || !(u.components[0] > 0.0)) {
    throw Error(ErrorCode::BadNormalization,
                "comoving frame needs a future unit timelike 4-velocity, g(u,u) = " +
                    std::to_string(uu));
  }
  f.legs[0] = u.components;
  for (std::size_t a = 1; a < 4; ++a) {
    Vec4 seed{};
    seed[a] = 1.0;
    f.legs[a] = gram_schmidt_step(g, f.legs, a, seed);
  }
  return f;
}

FourVector embed_direction(const LocalFrame& frame, const Direction3& d) {
  Vec4 v{};
  for (std::size_t a = 1; a < 4; ++a) {
    for (std::size_t i = 0; i < 4; ++i) v[i] += d[a - 1] * frame.legs[a][i];
  }
  return {v, frame.base};
}

Vec4 tetrad_components(const LocalFrame& frame, const FourVector& v) {
  if (!same_point(v.base, frame.base)) {
    throw Error(ErrorCode::BasePointMismatch, "vector not based at the frame point");
  }
  Vec4 c{};
  for (std::size_t a = 0; a < 4; ++a) {
    c[a] = inner(frame.metric, frame.legs[a], v.components);
  }
  c[0] = -c[0];
  return c;
}

ProjectionResult project_to_frame(const LocalFrame& frame, const FourVector& v) {
  const Vec4 c = tetrad_components(frame, v);
  const double n = std::sqrt(c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw Error(ErrorCode::ZeroVector, "cannot project a zero vector");
  }
  const Vec3 spatial{c[1] / n, c[2] / n, c[3] / n};
  ProjectionResult out;
  out.time_component = c[0] / n;
  out.w = std::min(1.0, norm(spatial));
  if (out.w < kDegenerateWeight) {
    out.degenerate = true;
    return out;
  }
  out.direction = Direction3::normalized(spatial);
  return out;
}

ProjectionResult make_projection(double w, const Direction3& direction) {
  if (!(w >= 0.0 && w <= 1.0)) {
    throw Error(ErrorCode::ValidationError, "projection weight must lie in [0, 1]");
  }
  ProjectionResult out;
  out.w = w;
  out.direction = direction;
  out.degenerate = w < kDegenerateWeight;
  out.time_component = std::sqrt(1.0 - w * w);
  return out;
}

}  // namespace grbell
