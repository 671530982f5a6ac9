// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/assembly.hpp"

#include <cmath>
#include <functional>

namespace lriga {

struct ErrorNorms {
  double l2 = 0.0;
  double h1 = 0.0;  // H^1 seminorm
  double u_l2 = 0.0;
  double u_h1 = 0.0;
};

// Errors of the discrete solution x (free coefficients in `spaces`) against
// u_exact in physical coordinates, by per-element Gauss quadrature with
// q = p + 3 points, swept one eta3 quadrature plane at a time.
[[nodiscard]] inline ErrorNorms error_norms(const TuckerTensor3& x, const PointFunction& u_exact,
                                            const std::function<Vec3(const Vec3&)>& grad_exact,
                                            const GeometryMap& G, const Spaces& spaces) {
  require_same_dims(space_dims(spaces), x.dims(), "error_norms");
  std::array<QuadratureRule1D, 3> rule;
  std::array<Matrix, 3> V, D;  // basis values / derivatives times factors, quadrature points x rank
  for (int m = 0; m < 3; ++m) {
    rule[m] = QuadratureRule1D(spaces[m], spaces[m].p + 3);
    V[m] = basis_matrix(spaces[m], rule[m].points, 0) * x.factors[m];
    D[m] = basis_matrix(spaces[m], rule[m].points, 1) * x.factors[m];
  }
  check_guard(static_cast<std::size_t>(rule[0].size() * rule[1].size()), kDenseEntryLimit, "error_norms plane");
  const auto [r1, r2, r3] = x.core.dims;
  Eigen::Map<const Matrix> core(x.core.data.data(), r1 * r2, r3);
  ErrorNorms e;
  for (Index k = 0; k < rule[2].size(); ++k) {
    const Vector t = core * V[2].row(k).transpose();
    const Vector td = core * D[2].row(k).transpose();
    Eigen::Map<const Matrix> T(t.data(), r1, r2), Td(td.data(), r1, r2);
    const Matrix uh = V[0] * T * V[1].transpose();
    const Matrix d1 = D[0] * T * V[1].transpose();
    const Matrix d2 = V[0] * T * D[1].transpose();
    const Matrix d3 = V[0] * Td * V[1].transpose();
    for (Index j = 0; j < rule[1].size(); ++j)
      for (Index i = 0; i < rule[0].size(); ++i) {
        const Vec3 eta(rule[0].points[i], rule[1].points[j], rule[2].points[k]);
        const Mat3 J = G.J(eta);
        const double w = rule[0].weights[i] * rule[1].weights[j] * rule[2].weights[k] * std::abs(J.determinant());
        const Vec3 X = G.F(eta);
        const double ue = u_exact(X);
        const Vec3 ge = grad_exact(X);
        const Vec3 gh = J.transpose().partialPivLu().solve(Vec3(d1(i, j), d2(i, j), d3(i, j)));
        e.l2 += w * (uh(i, j) - ue) * (uh(i, j) - ue);
        e.h1 += w * (gh - ge).squaredNorm();
        e.u_l2 += w * ue * ue;
        e.u_h1 += w * ge.squaredNorm();
      }
  }
  e.l2 = std::sqrt(e.l2);
  e.h1 = std::sqrt(e.h1);
  e.u_l2 = std::sqrt(e.u_l2);
  e.u_h1 = std::sqrt(e.u_h1);
  return e;
}

// Least-squares slope of log(err) against log(h).
[[nodiscard]] inline double fitted_order(const std::vector<double>& h, const std::vector<double>& err) {
  const std::size_t n = h.size();
  if (n < 2) return std::nan("");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::log(h[i]), b = std::log(err[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace lriga
