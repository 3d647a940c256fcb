#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the code paths it is used to check.

#include <cmath>
#include <numbers>

#include "grbell/geometry.hpp"

namespace grbell::oracle {

// Gamma^mu_{ab} = 1/2 g^{mu nu} (d_a g_{nu b} + d_b g_{nu a} - d_nu g_{ab}) from
// centered differences of metric_at. Both supported metrics are diagonal.
inline std::array<Mat4, 4> christoffel_fd(const MetricSpec& spec, const SpacetimePoint& p,
                                          double h = 1e-5) {
  std::array<Mat4, 4> dg{};  // dg[k][mu][nu] = d_k g_{mu nu}
  for (std::size_t k = 0; k < 4; ++k) {
    SpacetimePoint lo = p, hi = p;
    const double step = h * std::max(1.0, std::abs(p.coords[k]));
    lo.coords[k] -= step;
    hi.coords[k] += step;
    const MetricTensor glo = metric_at(spec, lo);
    const MetricTensor ghi = metric_at(spec, hi);
    for (std::size_t m = 0; m < 4; ++m)
      for (std::size_t n = 0; n < 4; ++n) dg[k][m][n] = (ghi(m, n) - glo(m, n)) / (2 * step);
  }
  const MetricTensor g = metric_at(spec, p);
  std::array<Mat4, 4> gamma{};
  for (std::size_t mu = 0; mu < 4; ++mu) {
    const double ginv = 1.0 / g(mu, mu);
    for (std::size_t a = 0; a < 4; ++a)
      for (std::size_t b = 0; b < 4; ++b)
        gamma[mu][a][b] = 0.5 * ginv * (dg[a][mu][b] + dg[b][mu][a] - dg[mu][a][b]);
  }
  return gamma;
}

// Sphere average of sign(a.l) sign(b.l) for unit a, b separated by `angle`,
// by a midpoint rule on an n x n (polar, azimuth) grid.
inline double sign_product_quadrature(double angle, int n = 4000) {
  constexpr double pi = std::numbers::pi;
  const double bx = std::sin(angle), bz = std::cos(angle);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = pi * (i + 0.5) / n;
    const double st = std::sin(th), ct = std::cos(th);
    const double sa = ct < 0.0 ? -1.0 : 1.0;  // a = z axis
    double row = 0.0;
    for (int j = 0; j < n; ++j) {
      const double ph = 2 * pi * (j + 0.5) / n;
      const double sb = (bx * st * std::cos(ph) + bz * ct) < 0.0 ? -1.0 : 1.0;
      row += sa * sb;
    }
    acc += row * st;
  }
  // dOmega / 4pi = sin(th) dth dph / 4pi
  return acc * (pi / n) * (2 * pi / n) / (4 * pi);
}

}  // namespace grbell::oracle
