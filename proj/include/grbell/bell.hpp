#pragma once

#include "grbell/frames.hpp"

namespace grbell {

// a in the left frame; b and c in the right frame.
struct SettingsTriple {
  Direction3 a;
  Direction3 b;
  Direction3 c;
};

inline constexpr double kInequalityTol = 1e-12;

// True when w^2(b) falls short of w^2(c) by more than kInequalityTol; the pair
// is then exchanged before evaluating the inequality.
bool needs_swap(const ProjectionResult& proj_b, const ProjectionResult& proj_c);

// P(a, b) = -(a . b_RL) w^2(b); exactly zero for a degenerate projection.
double quantum_correlation(const Direction3& a, const ProjectionResult& proj_b);

struct InequalityReport {
  double lhs = 0.0;  // |P(a,b) - P(a,c)|
  double rhs = 0.0;  // w^2(b) - w^2(c) (b_RL . c_RL)
  double margin = 0.0;
  bool violated = false;
  bool swapped = false;  // b and c exchanged to keep w(b) >= w(c)
  double w_b = 0.0;
  double w_c = 0.0;
  Direction3 b_rl;
  Direction3 c_rl;
  double p_ab = 0.0;
  double p_ac = 0.0;
  double p_bc = 0.0;  // P(b_RL, c)
  bool degenerate_b = false;
  bool degenerate_c = false;
};

InequalityReport generalized_bell_check(const SettingsTriple& t, const ProjectionResult& proj_b,
                                        const ProjectionResult& proj_c,
                                        double tol = kInequalityTol);

struct ViolationAngles {
  Vec3 d{};  // w^2(b) b_RL - w^2(c) c_RL
  double d_norm = 0.0;
  double cos_phi = 0.0;    // angle between a and d
  double cos_theta = 0.0;  // angle between b_RL and d
  bool condition_holds = true;
  bool swapped = false;
};

ViolationAngles violation_condition(const SettingsTriple& t, const ProjectionResult& proj_b,
                                    const ProjectionResult& proj_c,
                                    double tol = kInequalityTol);

struct ViolationSearch {
  enum class Mode { Analytic, Grid };
  Mode mode = Mode::Analytic;
  int n = 0;

  static ViolationSearch analytic() { return {Mode::Analytic, 0}; }
  static ViolationSearch grid(int n) { return {Mode::Grid, n}; }
};

struct MaxViolation {
  Direction3 a;
  InequalityReport report;
};

// Left setting a that maximizes lhs - rhs for the given right-side
// projections. Throws Error{DegenerateD} when |d| <= 1e-12.
MaxViolation find_max_violation(const ProjectionResult& proj_b, const ProjectionResult& proj_c,
                                ViolationSearch search = ViolationSearch::analytic());

}  // namespace grbell
