// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/geometry.hpp"

#include <cmath>
#include <numbers>

namespace lriga::manufactured {

// u = (rho - 1)(rho - 4) sin(pi z) sin(7xy), rho = x^2 + y^2; it vanishes on
// the whole boundary of the quarter annulus with radii 1 and 2.
[[nodiscard]] inline double u(const Vec3& X) {
  const double x = X[0], y = X[1], z = X[2], rho = x * x + y * y;
  return (rho - 1) * (rho - 4) * std::sin(std::numbers::pi * z) * std::sin(7 * x * y);
}

[[nodiscard]] inline Vec3 grad_u(const Vec3& X) {
  const double x = X[0], y = X[1], z = X[2], rho = x * x + y * y, pi = std::numbers::pi;
  const double s = std::sin(7 * x * y), c = std::cos(7 * x * y), sz = std::sin(pi * z);
  const double q = (rho - 4) * (rho - 1);
  return {sz * ((2 * x * (rho - 4) + 2 * x * (rho - 1)) * s + 7 * y * q * c),
          sz * ((2 * y * (rho - 4) + 2 * y * (rho - 1)) * s + 7 * x * q * c), pi * q * s * std::cos(pi * z)};
}

// f = -Laplace(u).
[[nodiscard]] inline double f(const Vec3& X) {
  const double x = X[0], y = X[1], z = X[2], rho = x * x + y * y, pi = std::numbers::pi;
  return std::sin(pi * z) *
         (56 * x * y * (5 - 2 * rho) * std::cos(7 * x * y) +
          (49 * rho * rho * rho - 245 * rho * rho + 180 * rho + 20 + pi * pi * (rho - 1) * (rho - 4)) * std::sin(7 * x * y));
}

}  // namespace lriga::manufactured
