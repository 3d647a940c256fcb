#pragma once

#include <limits>
#include <vector>

#include "grbell/geometry.hpp"

namespace grbell {

enum class CurveKind { Timelike, Null };

struct StopCondition {
  enum class Kind { ProperTime, Radius, CoordinateTime };
  Kind kind = Kind::ProperTime;
  double target = 1.0;
  double tolerance = 1e-10;  // event location tolerance on the stop function

  static StopCondition proper_time(double tau) { return {Kind::ProperTime, tau, 1e-10}; }
  static StopCondition radius(double r) { return {Kind::Radius, r, 1e-10}; }
  static StopCondition coordinate_time(double t) { return {Kind::CoordinateTime, t, 1e-10}; }
};

struct GeodesicSample {
  double tau = 0.0;
  Vec4 x{};
  Vec4 u{};
};

struct GeodesicOptions {
  double tol = 1e-12;  // relative and absolute error per unit affine step
  double h_max = std::numeric_limits<double>::infinity();  // caps sample spacing
  std::size_t max_steps = 5'000'000;
};

// Dense record of an integrated geodesic, immutable once built. Position and
// tangent between samples come from cubic Hermite interpolation of x with u as
// its derivative.
class GeodesicPath {
 public:
  GeodesicPath(MetricSpec spec, CurveKind kind, double tol, std::vector<GeodesicSample> samples);

  const MetricSpec& spec() const { return spec_; }
  CurveKind kind() const { return kind_; }
  double tol() const { return tol_; }
  const std::vector<GeodesicSample>& samples() const { return samples_; }

  const GeodesicSample& front() const { return samples_.front(); }
  const GeodesicSample& back() const { return samples_.back(); }
  SpacetimePoint start_point() const { return point(front().x); }
  SpacetimePoint end_point() const { return point(back().x); }
  SpacetimePoint point(const Vec4& x) const { return {x, spec_.chart()}; }
  FourVector start_tangent() const { return {front().u, start_point()}; }
  FourVector end_tangent() const { return {back().u, end_point()}; }

  // Interpolated position and tangent on segment i (samples i and i+1).
  void interpolate(std::size_t segment, double tau, Vec4& x, Vec4& u) const;

  // Same curve traversed backwards: sample order reversed, affine parameter
  // restarted at zero and tangent negated.
  GeodesicPath reversed() const;

 private:
  MetricSpec spec_;
  CurveKind kind_;
  double tol_;
  std::vector<GeodesicSample> samples_;
};

// Integrates the geodesic equation from (x0, u0) until `stop` fires.
// u0 must satisfy g(u0,u0) = -1 (timelike) or 0 (null) to 1e-9.
GeodesicPath integrate_geodesic(const MetricSpec& spec, const SpacetimePoint& x0,
                                const FourVector& u0, const StopCondition& stop,
                                CurveKind kind = CurveKind::Timelike,
                                const GeodesicOptions& opt = {});

struct GeodesicDiagnostics {
  // max |g(u,u) - n0| over 1 + sum |g_ii| (u^i)^2, the size of the terms summed
  double max_normalization_drift = 0.0;
  double max_energy_drift = 0.0;         // relative to max(|E0|, 1)
  double max_angular_momentum_drift = 0.0;
  double energy = 0.0;            // E = -g_tt u^t at the start
  double angular_momentum = 0.0;  // L_z at the start
};

GeodesicDiagnostics diagnose(const GeodesicPath& path);

// Conserved quantities for a state; for Minkowski L_z = x u^y - y u^x.
double killing_energy(const MetricSpec& spec, const Vec4& x, const Vec4& u);
double killing_angular_momentum(const MetricSpec& spec, const Vec4& x, const Vec4& u);

enum class TransportDirection { Forward, Backward };

struct TransportedVector {
  FourVector v;
  std::vector<Vec4> history;  // per sample, filled on request
};

// Levi-Civita transport of v0 along the stored path. Forward starts at the
// path's first sample, Backward at its last.
TransportedVector parallel_transport(const GeodesicPath& path, const FourVector& v0,
                                     TransportDirection direction,
                                     bool record_history = false);

// Transports vR from R back to the common origin O along geo_r, then on to L
// along geo_l.
TransportedVector transport_R_to_L(const GeodesicPath& geo_l, const GeodesicPath& geo_r,
                                   const FourVector& vR);

// Tangent with the time component solved from the normalization condition,
// future pointing. Throws BadNormalization when no solution exists.
FourVector normalized_tangent(const MetricSpec& spec, const SpacetimePoint& p,
                              const Vec3& spatial, CurveKind kind);

}  // namespace grbell
