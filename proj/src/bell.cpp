#include "grbell/bell.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "grbell/error.hpp"

namespace grbell {
namespace {

double weight2(const ProjectionResult& p) { return p.degenerate ? 0.0 : p.w * p.w; }

struct Ordered {
  const ProjectionResult* b;
  const ProjectionResult* c;
  bool swapped;
};

Ordered order(const ProjectionResult& proj_b, const ProjectionResult& proj_c) {
  if (needs_swap(proj_b, proj_c)) return {&proj_c, &proj_b, true};
  return {&proj_b, &proj_c, false};
}

Vec3 difference_vector(const ProjectionResult& b, const ProjectionResult& c) {
  const double wb2 = weight2(b);
  const double wc2 = weight2(c);
  Vec3 d;
  for (std::size_t i = 0; i < 3; ++i) d[i] = wb2 * b.direction[i] - wc2 * c.direction[i];
  return d;
}

}  // namespace

bool needs_swap(const ProjectionResult& proj_b, const ProjectionResult& proj_c) {
  return weight2(proj_b) < weight2(proj_c) - kInequalityTol;
}

double quantum_correlation(const Direction3& a, const ProjectionResult& proj_b) {
  if (proj_b.degenerate) return 0.0;
  return -dot(a, proj_b.direction) * (proj_b.w * proj_b.w);
}

InequalityReport generalized_bell_check(const SettingsTriple& t, const ProjectionResult& proj_b,
                                        const ProjectionResult& proj_c, double tol) {
  const Ordered o = order(proj_b, proj_c);
  const ProjectionResult& b = *o.b;
  const ProjectionResult& c = *o.c;

  InequalityReport r;
  r.swapped = o.swapped;
  r.w_b = b.w;
  r.w_c = c.w;
  r.b_rl = b.direction;
  r.c_rl = c.direction;
  r.degenerate_b = b.degenerate;
  r.degenerate_c = c.degenerate;
  r.p_ab = quantum_correlation(t.a, b);
  r.p_ac = quantum_correlation(t.a, c);
  r.p_bc = b.degenerate ? 0.0 : quantum_correlation(b.direction, c);
  r.lhs = std::abs(r.p_ab - r.p_ac);
  r.rhs = weight2(b) + r.p_bc;
  r.margin = r.lhs - r.rhs;
  r.violated = r.margin > tol;
  return r;
}

ViolationAngles violation_condition(const SettingsTriple& t, const ProjectionResult& proj_b,
                                    const ProjectionResult& proj_c, double tol) {
  const Ordered o = order(proj_b, proj_c);
  ViolationAngles v;
  v.swapped = o.swapped;
  v.d = difference_vector(*o.b, *o.c);
  v.d_norm = norm(v.d);
  if (v.d_norm <= 1e-12) {
    v.condition_holds = true;
    return v;
  }
  v.cos_phi = dot(t.a.vec(), v.d) / v.d_norm;
  v.cos_theta = o.b->degenerate ? 0.0 : dot(o.b->direction.vec(), v.d) / v.d_norm;
  v.condition_holds = std::abs(v.cos_phi) <= v.cos_theta + tol;
  return v;
}

MaxViolation find_max_violation(const ProjectionResult& proj_b, const ProjectionResult& proj_c,
                                ViolationSearch search) {
  const Ordered o = order(proj_b, proj_c);
  const Vec3 d = difference_vector(*o.b, *o.c);
  if (norm(d) <= 1e-12) {
    throw Error(ErrorCode::DegenerateD, "w^2(b) b_RL - w^2(c) c_RL vanishes");
  }

  auto evaluate = [&](const Direction3& a) {
    return generalized_bell_check({a, proj_b.direction, proj_c.direction}, proj_b, proj_c);
  };

  if (search.mode == ViolationSearch::Mode::Analytic) {
    const Direction3 a = Direction3::normalized(d);
    return {a, evaluate(a)};
  }

  if (search.n < 2) throw Error(ErrorCode::ValidationError, "grid search needs n >= 2");
  constexpr double pi = std::numbers::pi;
  const int n = search.n;
  double best_polar = 0.0, best_azimuth = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  // Row-major scan; strict improvement keeps the first direction on ties.
  for (int i = 0; i < n; ++i) {
    const double polar = pi * (i + 0.5) / n;
    for (int j = 0; j < n; ++j) {
      const double azimuth = 2.0 * pi * j / n;
      const double m = evaluate(Direction3::from_angles(polar, azimuth)).margin;
      if (m > best) {
        best = m;
        best_polar = polar;
        best_azimuth = azimuth;
      }
    }
  }

  // Pattern search in (polar, azimuth) with step halving.
  double step = pi / n;
  while (step > 1e-9) {
    double gain = 0.0;
    const std::array<std::pair<double, double>, 4> moves{
        {{step, 0.0}, {-step, 0.0}, {0.0, step}, {0.0, -step}}};
    for (const auto& [dp, da] : moves) {
      const double m =
          evaluate(Direction3::from_angles(best_polar + dp, best_azimuth + da)).margin;
      if (m > best) {
        gain += m - best;
        best = m;
        best_polar += dp;
        best_azimuth += da;
      }
    }
    if (gain < 1e-10) step *= 0.5;
  }
  const Direction3 a = Direction3::from_angles(best_polar, best_azimuth);
  return {a, evaluate(a)};
}

}  // namespace grbell
