// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/common.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

namespace lriga {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using PointFunction = std::function<double(const Vec3&)>;

struct GeometryMap {
  std::string name;
  std::function<Vec3(const Vec3&)> F;
  std::function<Mat3(const Vec3&)> J;  // J(r, c) = dF_r / d eta_c
};

struct Metric {
  Mat3 Q;
  double omega = 0.0;
};

// Q = det(J) J^{-1} J^{-T} and omega = det(J) f(F(eta)); |det J| is used so a
// left-handed parametrization still yields SPD Q.
[[nodiscard]] inline Metric metric_and_weight(const GeometryMap& G, const Vec3& eta, const PointFunction& f) {
  const Mat3 J = G.J(eta);
  const double det = J.determinant();
  if (!(std::abs(det) > 1e-14) || !std::isfinite(det)) {
    throw GeometryError("geometry '" + G.name + "': singular Jacobian at (" + std::to_string(eta[0]) + "," +
                        std::to_string(eta[1]) + "," + std::to_string(eta[2]) + ")");
  }
  const Mat3 Jinv = J.inverse();
  Metric m;
  m.Q = std::abs(det) * Jinv * Jinv.transpose();
  m.omega = f ? std::abs(det) * f(G.F(eta)) : 0.0;
  return m;
}

[[nodiscard]] inline GeometryMap unit_cube() {
  return {"cube", [](const Vec3& e) { return e; }, [](const Vec3&) { return Mat3::Identity(); }};
}

// Radii 1 to 2, angle 0 to pi/2, height 1.
[[nodiscard]] inline GeometryMap quarter_annulus() {
  constexpr double hp = std::numbers::pi / 2.0;
  return {"quarter_annulus",
          [](const Vec3& e) {
            const double r = 1.0 + e[0];
            return Vec3(r * std::cos(hp * e[1]), r * std::sin(hp * e[1]), e[2]);
          },
          [](const Vec3& e) {
            const double r = 1.0 + e[0], c = std::cos(hp * e[1]), s = std::sin(hp * e[1]);
            Mat3 J;
            J << c, -hp * r * s, 0, s, hp * r * c, 0, 0, 0, 1;
            return J;
          }};
}

// Shell patch F = (1 + eta3) S(u, v) with u, v in [-pi/4, pi/4] and
// S = (u, v c(u), c(u) c(v)), c(t) = 1 - t^2/2 a quadratic stand-in for cos.
[[nodiscard]] inline GeometryMap spherical_shell() {
  constexpr double s = std::numbers::pi / 4.0;
  return {"shell",
          [](const Vec3& e) {
            const double u = s * (2 * e[0] - 1), v = s * (2 * e[1] - 1), r = 1.0 + e[2];
            const double cu = 1 - u * u / 2, cv = 1 - v * v / 2;
            return Vec3(r * u, r * v * cu, r * cu * cv);
          },
          [](const Vec3& e) {
            const double u = s * (2 * e[0] - 1), v = s * (2 * e[1] - 1), r = 1.0 + e[2];
            const double cu = 1 - u * u / 2, cv = 1 - v * v / 2;
            Mat3 J;
            J << 2 * s * r, 0, u,                          //
                -2 * s * r * v * u, 2 * s * r * cu, v * cu,  //
                -2 * s * r * u * cv, -2 * s * r * cu * v, cu * cv;
            return J;
          }};
}

// Unit column whose two x-faces bulge outward by q(z) = z(1-z)/2.
[[nodiscard]] inline GeometryMap deformed_column() {
  return {"column",
          [](const Vec3& e) {
            const double q = 0.5 * e[2] * (1 - e[2]);
            return Vec3(e[0] + (2 * e[0] - 1) * q, e[1], e[2]);
          },
          [](const Vec3& e) {
            const double q = 0.5 * e[2] * (1 - e[2]), dq = 0.5 - e[2];
            Mat3 J;
            J << 1 + 2 * q, 0, (2 * e[0] - 1) * dq, 0, 1, 0, 0, 0, 1;
            return J;
          }};
}

// Polynomial map x_c = sum_{a,b,d} coef_c[a + (d1+1)(b + (d2+1) d)] eta1^a eta2^b eta3^d.
[[nodiscard]] inline GeometryMap polynomial_map(const std::string& name, const std::array<int, 3>& degree,
                                                const std::array<std::vector<double>, 3>& coef) {
  const std::size_t count = static_cast<std::size_t>(degree[0] + 1) * (degree[1] + 1) * (degree[2] + 1);
  for (const auto& c : coef) {
    if (c.size() != count) throw GeometryError("polynomial map '" + name + "': coefficient count mismatch");
  }
  auto eval = [degree, coef](const Vec3& e, int c, int dd) {
    double acc = 0.0;
    std::size_t idx = 0;
    for (int k = 0; k <= degree[2]; ++k)
      for (int j = 0; j <= degree[1]; ++j)
        for (int i = 0; i <= degree[0]; ++i, ++idx) {
          const std::array<int, 3> pw{i, j, k};
          double term = coef[c][idx];
          if (term == 0.0) continue;
          for (int m = 0; m < 3; ++m) {
            int q = pw[m];
            if (m == dd) {
              if (q == 0) {
                term = 0.0;
                break;
              }
              term *= q;
              --q;
            }
            term *= std::pow(e[m], q);
          }
          acc += term;
        }
    return acc;
  };
  return {name,
          [eval](const Vec3& e) { return Vec3(eval(e, 0, -1), eval(e, 1, -1), eval(e, 2, -1)); },
          [eval](const Vec3& e) {
            Mat3 J;
            for (int r = 0; r < 3; ++r)
              for (int c = 0; c < 3; ++c) J(r, c) = eval(e, r, c);
            return J;
          }};
}

[[nodiscard]] inline GeometryMap geometry_by_name(const std::string& name) {
  if (name == "cube") return unit_cube();
  if (name == "quarter_annulus") return quarter_annulus();
  if (name == "shell") return spherical_shell();
  if (name == "column") return deformed_column();
  throw std::invalid_argument("unknown geometry '" + name + "'");
}

// Radical-inverse (Halton) points in [0,1]^3 with bases 2, 3, 5, skipping the origin.
[[nodiscard]] inline std::vector<Vec3> halton_points(int count) {
  auto radical = [](int i, int b) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
      f /= b;
      r += f * (i % b);
      i /= b;
    }
    return r;
  };
  std::vector<Vec3> pts;
  pts.reserve(count);
  for (int i = 1; i <= count; ++i) pts.emplace_back(radical(i, 2), radical(i, 3), radical(i, 5));
  return pts;
}

}  // namespace lriga
