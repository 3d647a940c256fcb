#pragma once

// Dormand-Prince 5(4) integrator with adaptive step control and terminal
// event location by bisection on the step size.
//
// The right-hand side is a callable  bool(double t, const State& y, State& dydt)
// returning false when y lies outside the problem's domain; the stepper then
// rejects the step and retries with a smaller one.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>

namespace grbell::ode {

struct Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double h_init = 0.0;  // 0 selects a starting step automatically
  double h_max = std::numeric_limits<double>::infinity();
  std::size_t max_steps = 5'000'000;
  double event_tol = 1e-12;  // |event(t, y)| accepted as zero
  // Scale the error allowance by |h| (error per unit step); the global error
  // then shrinks faster than linearly in the tolerance.
  bool per_unit_step = false;
  // Steps shorter than this are controlled per step instead, so that rounding
  // noise in the error estimate cannot stall the integration.
  double unit_step = 1.0;
};

enum class Status {
  Finished,       // reached t_end
  EventHit,       // terminal event located
  DomainFailure,  // steps kept leaving the rhs domain until h underflowed
  StepFailure,    // error control could not be met or max_steps exceeded
};

template <std::size_t N>
struct Result {
  Status status = Status::Finished;
  double t = 0.0;
  std::array<double, N> y{};
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

namespace detail {

struct DP45 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
};

}  // namespace detail

// One Dormand-Prince step of size h from (t, y) with k1 = f(t, y).
// On success writes the 5th-order solution, f at the new point (FSAL) and the
// scaled RMS error norm.
template <std::size_t N, class Rhs>
bool try_step(Rhs& rhs, double t, const std::array<double, N>& y,
              const std::array<double, N>& k1, double h, const Options& opt,
              std::array<double, N>& y_out, std::array<double, N>& k_out, double& err) {
  using C = detail::DP45;
  using State = std::array<double, N>;
  State k2, k3, k4, k5, k6, tmp;

  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * C::a21 * k1[i];
  if (!rhs(t + C::c2 * h, tmp, k2)) return false;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (C::a31 * k1[i] + C::a32 * k2[i]);
  if (!rhs(t + C::c3 * h, tmp, k3)) return false;
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (C::a41 * k1[i] + C::a42 * k2[i] + C::a43 * k3[i]);
  if (!rhs(t + C::c4 * h, tmp, k4)) return false;
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (C::a51 * k1[i] + C::a52 * k2[i] + C::a53 * k3[i] + C::a54 * k4[i]);
  if (!rhs(t + C::c5 * h, tmp, k5)) return false;
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (C::a61 * k1[i] + C::a62 * k2[i] + C::a63 * k3[i] + C::a64 * k4[i] +
                         C::a65 * k5[i]);
  if (!rhs(t + h, tmp, k6)) return false;
  for (std::size_t i = 0; i < N; ++i)
    y_out[i] = y[i] + h * (C::b1 * k1[i] + C::b3 * k3[i] + C::b4 * k4[i] + C::b5 * k5[i] +
                           C::b6 * k6[i]);
  if (!rhs(t + h, y_out, k_out)) return false;

  double sum = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double e = h * (C::e1 * k1[i] + C::e3 * k3[i] + C::e4 * k4[i] + C::e5 * k5[i] +
                          C::e6 * k6[i] + C::e7 * k_out[i]);
    const double sc = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y_out[i]));
    sum += (e / sc) * (e / sc);
  }
  err = std::sqrt(sum / static_cast<double>(N));
  if (opt.per_unit_step) err /= std::max(std::abs(h), opt.unit_step);
  return std::isfinite(err);
}

struct NoEvent {
  template <class S>
  double operator()(double, const S&) const { return 1.0; }
};

// Integrates from t0 to t_end (t_end > t0). `observe(t, y, dydt)` is called at
// the initial point and after every accepted step, including the final one.
// `event(t, y)` terminates integration when its sign differs from its sign at t0.
template <std::size_t N, class Rhs, class Event, class Observer>
Result<N> integrate(Rhs&& rhs, double t0, const std::array<double, N>& y0, double t_end,
                    const Options& opt, Event&& event, Observer&& observe) {
  using State = std::array<double, N>;
  Result<N> res;
  res.t = t0;
  res.y = y0;

  State k1;
  if (!rhs(t0, y0, k1)) {
    res.status = Status::DomainFailure;
    return res;
  }
  observe(t0, y0, k1);

  double t = t0;
  State y = y0;
  const double span = t_end - t0;
  const double t_eps = 4.0 * std::numeric_limits<double>::epsilon() *
                       std::max({1.0, std::abs(t0), std::isfinite(t_end) ? std::abs(t_end) : 0.0});
  if (span <= t_eps) return res;

  double h = opt.h_init;
  if (!(h > 0.0)) {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, 0.1 * span);
  }
  h = std::min(h, opt.h_max);

  const double g_start = event(t, y);
  auto crossed = [g_start](double g) {
    return (g_start > 0.0 && g <= 0.0) || (g_start < 0.0 && g >= 0.0);
  };

  State y1, k7;
  while (true) {
    if (t_end - t <= t_eps) {
      res.status = Status::Finished;
      break;
    }
    if (res.accepted + res.rejected >= opt.max_steps) {
      res.status = Status::StepFailure;
      break;
    }
    const double h_floor = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    h = std::min(h, opt.h_max);
    bool last = false;
    if (t + h >= t_end - t_eps) {
      h = t_end - t;
      last = true;
    }

    double err = 0.0;
    if (!try_step(rhs, t, y, k1, h, opt, y1, k7, err)) {
      ++res.rejected;
      h *= 0.25;
      if (h < h_floor) {
        res.status = Status::DomainFailure;
        break;
      }
      continue;
    }
    if (err > 1.0) {
      ++res.rejected;
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      if (h < h_floor) {
        res.status = Status::StepFailure;
        break;
      }
      continue;
    }

    const double g1 = event(t + h, y1);
    if (crossed(g1)) {
      // Bisect on the step length; the bracket end past the event is kept.
      double lo = 0.0, hi = h;
      State y_hi = y1, k_hi = k7;
      double g_hi = g1;
      for (int it = 0; it < 200 && std::abs(g_hi) > opt.event_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        State ym, km;
        double em = 0.0;
        if (!try_step(rhs, t, y, k1, mid, opt, ym, km, em)) {
          res.status = Status::DomainFailure;
          return res;
        }
        const double gm = event(t + mid, ym);
        if (crossed(gm)) {
          hi = mid;
          y_hi = ym;
          k_hi = km;
          g_hi = gm;
        } else {
          lo = mid;
          if (std::abs(gm) <= opt.event_tol) {
            hi = mid;
            y_hi = ym;
            k_hi = km;
            g_hi = gm;
            break;
          }
        }
      }
      t += hi;
      y = y_hi;
      ++res.accepted;
      observe(t, y, k_hi);
      res.status = Status::EventHit;
      break;
    }

    t = last ? t_end : t + h;
    y = y1;
    k1 = k7;
    ++res.accepted;
    observe(t, y, k1);

    const double fac = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= fac;
  }
  res.t = t;
  res.y = y;
  return res;
}

template <std::size_t N, class Rhs, class Observer>
Result<N> integrate(Rhs&& rhs, double t0, const std::array<double, N>& y0, double t_end,
                    const Options& opt, Observer&& observe) {
  return integrate(rhs, t0, y0, t_end, opt, NoEvent{}, observe);
}

}  // namespace grbell::ode
