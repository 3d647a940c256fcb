#pragma once

#include <array>

#include "grbell/geometry.hpp"

namespace grbell {

// Unit 3-vector expressed in the spatial triad of a local frame.
class Direction3 {
 public:
  Direction3() = default;

  // Normalizes v; throws Error{ZeroVector} for a zero or non-finite input.
  static Direction3 normalized(const Vec3& v);
  // polar angle from the third leg, azimuth in the plane of legs one and two.
  static Direction3 from_angles(double polar, double azimuth);
  static Direction3 from_degrees(double polar_deg, double azimuth_deg);

  const Vec3& vec() const { return d_; }
  double operator[](std::size_t i) const { return d_[i]; }
  Direction3 operator-() const { return Direction3({-d_[0], -d_[1], -d_[2]}); }

 private:
  explicit Direction3(const Vec3& d) : d_(d) {}
  Vec3 d_{1.0, 0.0, 0.0};
};

double dot(const Vec3& a, const Vec3& b);
double norm(const Vec3& a);
inline double dot(const Direction3& a, const Direction3& b) { return dot(a.vec(), b.vec()); }

// Orthonormal tetrad at an event: g(e_a, e_b) = diag(-1, 1, 1, 1).
struct LocalFrame {
  SpacetimePoint base;
  MetricTensor metric;
  std::array<Vec4, 4> legs{};  // e0 timelike future pointing, e1..e3 spatial

  FourVector leg(std::size_t a) const { return {legs[a], base}; }
};

struct ProjectionResult {
  double w = 0.0;  // in [0, 1]
  Direction3 direction;
  bool degenerate = false;      // w below the degeneracy threshold
  double time_component = 0.0;  // normalized tetrad time component
};

inline constexpr double kDegenerateWeight = 1e-9;

// Static observer frame: e0 along the Killing time direction, spatial legs
// along the coordinate directions (x, y, z) or (r, theta, phi).
LocalFrame build_static_frame(const MetricSpec& spec, const SpacetimePoint& p);

// Frame of an observer with 4-velocity u; spatial legs by Gram-Schmidt of the
// coordinate basis against u in coordinate order.
LocalFrame build_comoving_frame(const MetricSpec& spec, const SpacetimePoint& p,
                                const FourVector& u);

FourVector embed_direction(const LocalFrame& frame, const Direction3& d);

// Tetrad components of v, Euclidean-normalized as a 4-tuple; w is the length
// of the spatial part and direction its unit vector.
ProjectionResult project_to_frame(const LocalFrame& frame, const FourVector& v);

// Tetrad components v^a = eta^{ab} g(e_b, v).
Vec4 tetrad_components(const LocalFrame& frame, const FourVector& v);

// Synthetic projection for algebra-only use; w must lie in [0, 1].
ProjectionResult make_projection(double w, const Direction3& direction);

}  // namespace grbell
