#include "grbell/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "grbell/error.hpp"
#include "grbell/ode.hpp"

namespace grbell {
namespace {

using State8 = std::array<double, 8>;

bool in_domain(const MetricSpec& spec, const Vec4& x) {
  for (double c : x) {
    if (!std::isfinite(c)) return false;
  }
  if (spec.kind == MetricKind::Schwarzschild) {
    if (!(x[1] > spec.guard_radius())) return false;
    if (!(x[2] > 0.0 && x[2] < std::numbers::pi)) return false;
  }
  return true;
}

double normalization_target(CurveKind kind) { return kind == CurveKind::Timelike ? -1.0 : 0.0; }

std::string describe(const Vec4& x) {
  return "(" + std::to_string(x[0]) + ", " + std::to_string(x[1]) + ", " +
         std::to_string(x[2]) + ", " + std::to_string(x[3]) + ")";
}

}  // namespace

GeodesicPath::GeodesicPath(MetricSpec spec, CurveKind kind, double tol,
                           std::vector<GeodesicSample> samples)
    : spec_(spec), kind_(kind), tol_(tol), samples_(std::move(samples)) {
  if (samples_.empty()) {
    throw Error(ErrorCode::ValidationError, "geodesic path needs at least one sample");
  }
  for (std::size_t i = 1; i < samples_.size(); ++i) {
    if (!(samples_[i].tau > samples_[i - 1].tau)) {
      throw Error(ErrorCode::ValidationError, "affine parameter must be strictly increasing");
    }
  }
}

void GeodesicPath::interpolate(std::size_t segment, double tau, Vec4& x, Vec4& u) const {
  const GeodesicSample& a = samples_[segment];
  const GeodesicSample& b = samples_[segment + 1];
  const double h = b.tau - a.tau;
  const double s = (tau - a.tau) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1;
  const double d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
  for (std::size_t i = 0; i < 4; ++i) {
    x[i] = h00 * a.x[i] + h10 * h * a.u[i] + h01 * b.x[i] + h11 * h * b.u[i];
    u[i] = (d00 * a.x[i] + d01 * b.x[i]) / h + d10 * a.u[i] + d11 * b.u[i];
  }
}

GeodesicPath GeodesicPath::reversed() const {
  std::vector<GeodesicSample> rev;
  rev.reserve(samples_.size());
  const double tau_end = samples_.back().tau;
  for (auto it = samples_.rbegin(); it != samples_.rend(); ++it) {
    GeodesicSample s = *it;
    s.tau = tau_end - it->tau;
    for (double& c : s.u) c = -c;
    rev.push_back(s);
  }
  return GeodesicPath(spec_, kind_, tol_, std::move(rev));
}

FourVector normalized_tangent(const MetricSpec& spec, const SpacetimePoint& p,
                              const Vec3& spatial, CurveKind kind) {
  const MetricTensor g = metric_at(spec, p);
  double s = 0.0;
  for (std::size_t i = 0; i < 3; ++i) s += g(i + 1, i + 1) * spatial[i] * spatial[i];
  const double ut2 = (s - normalization_target(kind)) / (-g(0, 0));
  if (!(ut2 > 0.0)) {
    throw Error(ErrorCode::BadNormalization, "cannot normalize a zero null tangent");
  }
  return {{std::sqrt(ut2), spatial[0], spatial[1], spatial[2]}, p};
}

double killing_energy(const MetricSpec& spec, const Vec4& x, const Vec4& u) {
  if (spec.kind == MetricKind::Minkowski) return u[0];
  return (x[1] - 2.0 * spec.mass) / x[1] * u[0];
}

double killing_angular_momentum(const MetricSpec& spec, const Vec4& x, const Vec4& u) {
  if (spec.kind == MetricKind::Minkowski) return x[1] * u[2] - x[2] * u[1];
  const double s = std::sin(x[2]);
  return x[1] * x[1] * s * s * u[3];
}

GeodesicPath integrate_geodesic(const MetricSpec& spec, const SpacetimePoint& x0,
                                const FourVector& u0, const StopCondition& stop, CurveKind kind,
                                const GeodesicOptions& opt) {
  const MetricTensor g0 = metric_at(spec, x0);
  if (!same_point(u0.base, x0)) {
    throw Error(ErrorCode::BasePointMismatch, "initial tangent not based at x0");
  }
  const double n = inner(g0, u0.components, u0.components);
  const double n0 = normalization_target(kind);
  double scale = 1.0;
  for (std::size_t i = 0; i < 4; ++i) {
    scale = std::max(scale, std::abs(g0(i, i)) * u0.components[i] * u0.components[i]);
  }
  if (!(std::abs(n - n0) <= 1e-9 * scale) || !(u0.components[0] > 0.0)) {
    throw Error(ErrorCode::BadNormalization,
                "initial tangent has g(u,u) = " + std::to_string(n) + ", expected " +
                    std::to_string(n0) + " with u^t > 0");
  }
  if (!(opt.tol > 0.0)) throw Error(ErrorCode::ValidationError, "tolerance must be positive");

  double tau_end = std::numeric_limits<double>::infinity();
  switch (stop.kind) {
    case StopCondition::Kind::ProperTime:
      if (!(stop.target >= 0.0)) {
        throw Error(ErrorCode::ValidationError, "proper-time target must be non-negative");
      }
      tau_end = stop.target;
      break;
    case StopCondition::Kind::Radius:
      if (spec.kind != MetricKind::Schwarzschild) {
        throw Error(ErrorCode::ValidationError, "radius stop requires a Schwarzschild metric");
      }
      if (!(stop.target > spec.guard_radius())) {
        throw Error(ErrorCode::ValidationError, "radius target inside the horizon guard");
      }
      if (stop.target == x0.coords[1]) {
        throw Error(ErrorCode::ValidationError, "radius target equals the initial radius");
      }
      break;
    case StopCondition::Kind::CoordinateTime:
      if (!(stop.target > x0.coords[0])) {
        throw Error(ErrorCode::ValidationError, "coordinate-time target must lie in the future");
      }
      break;
  }

  std::vector<GeodesicSample> samples;
  samples.reserve(256);
  GeodesicSample s0{0.0, x0.coords, u0.components};
  if (tau_end == 0.0) {
    return GeodesicPath(spec, kind, opt.tol, {s0});
  }

  auto rhs = [&spec](double, const State8& y, State8& dy) {
    const Vec4 x{y[0], y[1], y[2], y[3]};
    if (!in_domain(spec, x)) return false;
    const Vec4 u{y[4], y[5], y[6], y[7]};
    const Vec4 a = christoffel_at(spec, {x, spec.chart()}).contract(u, u);
    for (std::size_t i = 0; i < 4; ++i) {
      dy[i] = u[i];
      dy[i + 4] = -a[i];
    }
    return true;
  };
  auto observe = [&samples](double tau, const State8& y, const State8&) {
    GeodesicSample s{tau, {y[0], y[1], y[2], y[3]}, {y[4], y[5], y[6], y[7]}};
    if (!samples.empty() && !(tau > samples.back().tau)) {
      samples.back() = s;
    } else {
      samples.push_back(s);
    }
  };
  auto event = [&stop](double, const State8& y) {
    switch (stop.kind) {
      case StopCondition::Kind::Radius: return y[1] - stop.target;
      case StopCondition::Kind::CoordinateTime: return y[0] - stop.target;
      case StopCondition::Kind::ProperTime: break;
    }
    return 1.0;
  };

  ode::Options o;
  o.rtol = opt.tol;
  o.atol = opt.tol;
  o.h_max = opt.h_max;
  o.max_steps = opt.max_steps;
  o.event_tol = stop.tolerance;
  o.per_unit_step = true;
  o.unit_step = spec.kind == MetricKind::Schwarzschild ? 1e-2 * spec.mass : 1.0;

  State8 y0{};
  for (std::size_t i = 0; i < 4; ++i) {
    y0[i] = x0.coords[i];
    y0[i + 4] = u0.components[i];
  }
  const auto res = ode::integrate(rhs, 0.0, y0, tau_end, o, event, observe);
  const Vec4 x_last{res.y[0], res.y[1], res.y[2], res.y[3]};

  switch (res.status) {
    case ode::Status::Finished:
      if (stop.kind != StopCondition::Kind::ProperTime) {
        throw Error(ErrorCode::StepFailure, "stop condition never reached");
      }
      break;
    case ode::Status::EventHit:
      break;
    case ode::Status::DomainFailure:
      if (spec.kind == MetricKind::Schwarzschild &&
          (x_last[2] < 1e-6 || x_last[2] > std::numbers::pi - 1e-6)) {
        throw Error(ErrorCode::InvalidChart, "geodesic reached the coordinate pole near " +
                                                 describe(x_last));
      }
      throw Error(ErrorCode::HorizonApproach,
                  "geodesic would cross the horizon guard near " + describe(x_last));
    case ode::Status::StepFailure:
      // Coordinate time diverges at the horizon, so steps collapse before the
      // guard itself is reached.
      if (spec.kind == MetricKind::Schwarzschild && 1.0 - 2.0 * spec.mass / x_last[1] < 1e-2) {
        throw Error(ErrorCode::HorizonApproach,
                    "geodesic stalled approaching the horizon near " + describe(x_last));
      }
      throw Error(ErrorCode::StepFailure,
                  "integration failed at tau = " + std::to_string(res.t) + " near " +
                      describe(x_last));
  }
  return GeodesicPath(spec, kind, opt.tol, std::move(samples));
}

GeodesicDiagnostics diagnose(const GeodesicPath& path) {
  GeodesicDiagnostics d;
  const MetricSpec& spec = path.spec();
  const double n0 = normalization_target(path.kind());
  const auto& s = path.samples();
  d.energy = killing_energy(spec, s.front().x, s.front().u);
  d.angular_momentum = killing_angular_momentum(spec, s.front().x, s.front().u);
  const double e_scale = std::max(std::abs(d.energy), 1.0);
  const double l_scale = std::max(std::abs(d.angular_momentum), 1.0);
  for (const auto& sample : s) {
    const MetricTensor g = metric_at(spec, path.point(sample.x));
    double terms = 1.0;
    for (std::size_t i = 0; i < 4; ++i) terms += std::abs(g(i, i)) * sample.u[i] * sample.u[i];
    d.max_normalization_drift = std::max(
        d.max_normalization_drift, std::abs(inner(g, sample.u, sample.u) - n0) / terms);
    d.max_energy_drift = std::max(
        d.max_energy_drift, std::abs(killing_energy(spec, sample.x, sample.u) - d.energy) / e_scale);
    d.max_angular_momentum_drift =
        std::max(d.max_angular_momentum_drift,
                 std::abs(killing_angular_momentum(spec, sample.x, sample.u) -
                          d.angular_momentum) /
                     l_scale);
  }
  return d;
}

namespace {

Vec4 transport_along(const GeodesicPath& path, const Vec4& v0, std::vector<Vec4>* history) {
  using State4 = std::array<double, 4>;
  const MetricSpec& spec = path.spec();
  const auto& s = path.samples();
  double vmax = 0.0;
  for (double c : v0) vmax = std::max(vmax, std::abs(c));

  ode::Options o;
  o.rtol = path.tol();
  o.atol = path.tol() * std::max(vmax, 1e-300) * 1e-3;

  State4 v = v0;
  if (history) history->push_back(v);
  for (std::size_t seg = 0; seg + 1 < s.size(); ++seg) {
    auto rhs = [&](double tau, const State4& w, State4& dw) {
      Vec4 x, u;
      path.interpolate(seg, tau, x, u);
      if (!in_domain(spec, x)) return false;
      const Vec4 gamma_uw = christoffel_at(spec, {x, spec.chart()}).contract(u, w);
      for (std::size_t i = 0; i < 4; ++i) dw[i] = -gamma_uw[i];
      return true;
    };
    o.h_init = s[seg + 1].tau - s[seg].tau;
    const auto res =
        ode::integrate(rhs, s[seg].tau, v, s[seg + 1].tau, o, [](double, const State4&, const State4&) {});
    if (res.status != ode::Status::Finished) {
      throw Error(ErrorCode::StepFailure,
                  "parallel transport failed on segment " + std::to_string(seg));
    }
    v = res.y;
    if (history) history->push_back(v);
  }
  return v;
}

}  // namespace

TransportedVector parallel_transport(const GeodesicPath& path, const FourVector& v0,
                                     TransportDirection direction, bool record_history) {
  TransportedVector out;
  std::vector<Vec4>* hist = record_history ? &out.history : nullptr;
  if (direction == TransportDirection::Forward) {
    if (!same_point(v0.base, path.start_point())) {
      throw Error(ErrorCode::BasePointMismatch, "vector is not based at the path start");
    }
    out.v = {transport_along(path, v0.components, hist), path.end_point()};
  } else {
    if (!same_point(v0.base, path.end_point())) {
      throw Error(ErrorCode::BasePointMismatch, "vector is not based at the path end");
    }
    const GeodesicPath rev = path.reversed();
    out.v = {transport_along(rev, v0.components, hist), path.start_point()};
  }
  return out;
}

TransportedVector transport_R_to_L(const GeodesicPath& geo_l, const GeodesicPath& geo_r,
                                   const FourVector& vR) {
  if (!same_point(geo_l.start_point(), geo_r.start_point(), 1e-9)) {
    throw Error(ErrorCode::CommonOriginMismatch, "geodesics do not share their initial event");
  }
  const TransportedVector at_origin = parallel_transport(geo_r, vR, TransportDirection::Backward);
  const FourVector v_origin{at_origin.v.components, geo_l.start_point()};
  return parallel_transport(geo_l, v_origin, TransportDirection::Forward);
}

}  // namespace grbell
