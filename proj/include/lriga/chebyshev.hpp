// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/geometry.hpp"
#include "lriga/tucker.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace lriga {

// g(eta) ~ sum core(a,b,c) (T^T F1)(eta1)_a (T^T F2)(eta2)_b (T^T F3)(eta3)_c with
// T the Chebyshev polynomials on [0,1]; factors have one row per coefficient.
struct SeparableFunction3 {
  TuckerTensor3 coef;
  double validation_error = 0.0;
  double max_abs = 0.0;
  bool zero = false;

  [[nodiscard]] std::array<Index, 3> terms() const {
    return {coef.factors[0].rows(), coef.factors[1].rows(), coef.factors[2].rows()};
  }
  [[nodiscard]] MultilinearRank rank() const { return zero ? MultilinearRank{0, 0, 0} : coef.rank(); }

  // Column r of factor m as a univariate Chebyshev series.
  [[nodiscard]] Vector univariate(int m, Index r) const { return coef.factors[m].col(r); }

  [[nodiscard]] double operator()(const Vec3& eta) const {
    if (zero) return 0.0;
    DenseTensor3 t = coef.core;
    for (int m = 0; m < 3; ++m) {
      const Matrix& F = coef.factors[m];
      Matrix row(1, F.cols());
      for (Index r = 0; r < F.cols(); ++r) row(0, r) = chebyshev_eval(F.col(r), eta[m]);
      t = mode_product(t, m, row);
    }
    return t.data[0];
  }
};

struct ChebyshevOptions {
  int initial_points = 9;
  int max_points = 129;
  int validation_points = 512;
  double validation_factor = 10.0;
};

namespace detail {

// Values at the n Chebyshev-Lobatto points to coefficients (discrete cosine transform of type I).
inline Matrix lobatto_to_coefficients(int n) {
  Matrix T(n, n);
  if (n == 1) {
    T(0, 0) = 1.0;
    return T;
  }
  const int N = n - 1;
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      double v = (2.0 / N) * std::cos(std::numbers::pi * j * k / N);
      if (j == 0 || j == N) v *= 0.5;
      if (k == 0 || k == N) v *= 0.5;
      T(k, j) = v;
    }
  }
  return T;
}

// eta-coordinates of the Lobatto points, ordered as cos(pi j / N).
inline std::vector<double> lobatto_points(int n) {
  std::vector<double> x(n, 0.5);
  if (n == 1) return x;
  for (int j = 0; j < n; ++j) x[j] = 0.5 * (1.0 + std::cos(std::numbers::pi * j / (n - 1)));
  return x;
}

inline Vector mode_profile(const DenseTensor3& C, int m) {
  Vector prof = Vector::Zero(C.dims[m]);
  for (Index k = 0; k < C.dims[2]; ++k)
    for (Index j = 0; j < C.dims[1]; ++j)
      for (Index i = 0; i < C.dims[0]; ++i) {
        const Index idx = m == 0 ? i : (m == 1 ? j : k);
        prof[idx] = std::max(prof[idx], std::abs(C(i, j, k)));
      }
  return prof;
}

}  // namespace detail

using VectorPointFunction = std::function<Vector(const Vec3&)>;

// Tensorized Chebyshev interpolation with per-direction degree doubling,
// chopping, and ST-HOSVD compression of each coefficient tensor. All K
// components share one sampling grid. A component whose largest sample does
// not exceed zero_rel times the largest sample over all components is
// returned as an exact zero.
[[nodiscard]] inline std::vector<SeparableFunction3> approximate_functions(const VectorPointFunction& g, int K,
                                                                           double eps, double zero_rel = 0.0,
                                                                           const ChebyshevOptions& opt = {}) {
  if (!(eps > 0.0)) throw std::invalid_argument("approximate_functions: tolerance must be positive");
  std::array<int, 3> n{opt.initial_points, opt.initial_points, opt.initial_points};
  std::vector<DenseTensor3> coeffs;
  std::vector<double> gmax(K, 0.0);
  std::vector<bool> live(K, true);
  for (;;) {
    std::array<std::vector<double>, 3> x;
    for (int m = 0; m < 3; ++m) x[m] = detail::lobatto_points(n[m]);
    std::vector<DenseTensor3> vals(K, DenseTensor3({n[0], n[1], n[2]}));
    std::fill(gmax.begin(), gmax.end(), 0.0);
    for (int k = 0; k < n[2]; ++k)
      for (int j = 0; j < n[1]; ++j)
        for (int i = 0; i < n[0]; ++i) {
          const Vector v = g(Vec3(x[0][i], x[1][j], x[2][k]));
          for (int c = 0; c < K; ++c) {
            if (!std::isfinite(v[c])) throw NonSeparableError("approximate_functions: non-finite sample");
            vals[c](i, j, k) = v[c];
            gmax[c] = std::max(gmax[c], std::abs(v[c]));
          }
        }
    coeffs.clear();
    const double zero_below = zero_rel * *std::max_element(gmax.begin(), gmax.end());
    std::array<bool, 3> resolved{true, true, true};
    for (int c = 0; c < K; ++c) {
      DenseTensor3 C = vals[c];
      for (int m = 0; m < 3; ++m) C = mode_product(C, m, detail::lobatto_to_coefficients(n[m]));
      live[c] = gmax[c] > zero_below && gmax[c] > 0.0;
      if (live[c]) {
        const double scale = C.data.cwiseAbs().maxCoeff();
        for (int m = 0; m < 3; ++m) {
          if (n[m] < 3) continue;
          const Vector prof = detail::mode_profile(C, m);
          const int first_tail = (3 * (n[m] - 1) + 3) / 4;
          if (prof.tail(n[m] - first_tail).maxCoeff() >= eps * scale) resolved[m] = false;
        }
      }
      coeffs.push_back(std::move(C));
    }
    bool grown = false;
    for (int m = 0; m < 3; ++m) {
      if (!resolved[m]) {
        if (2 * n[m] - 1 > opt.max_points) {
          throw NonSeparableError("approximate_functions: Chebyshev degree cap of " + std::to_string(opt.max_points) +
                                  " points exceeded in direction " + std::to_string(m + 1));
        }
        n[m] = 2 * n[m] - 1;
        grown = true;
      }
    }
    if (!grown) break;
  }

  const auto probe = halton_points(opt.validation_points);
  std::vector<Vector> exact;
  exact.reserve(probe.size());
  for (const auto& e : probe) exact.push_back(g(e));

  std::vector<SeparableFunction3> out(K);
  for (int c = 0; c < K; ++c) {
    SeparableFunction3& s = out[c];
    for (const auto& v : exact) gmax[c] = std::max(gmax[c], std::abs(v[c]));
    s.max_abs = gmax[c];
    if (!live[c]) {
      s.zero = true;
      s.coef = TuckerTensor3::zeros({1, 1, 1});
      continue;
    }
    // Chop trailing coefficients that sit below a tenth of the tail threshold.
    DenseTensor3 C = coeffs[c];
    const double scale = C.data.cwiseAbs().maxCoeff();
    Dims keep = C.dims;
    for (int m = 0; m < 3; ++m) {
      const Vector prof = detail::mode_profile(C, m);
      Index t = prof.size();
      while (t > 1 && prof[t - 1] < 0.1 * eps * scale) --t;
      keep[m] = t;
    }
    DenseTensor3 Cc(keep);
    for (Index k = 0; k < keep[2]; ++k)
      for (Index j = 0; j < keep[1]; ++j)
        for (Index i = 0; i < keep[0]; ++i) Cc(i, j, k) = C(i, j, k);

    double tol = eps;
    for (int attempt = 0;; ++attempt) {
      s.coef = sthosvd(Cc, tol);
      s.zero = false;
      double err = 0.0;
      for (std::size_t q = 0; q < probe.size(); ++q) err = std::max(err, std::abs(s(probe[q]) - exact[q][c]));
      s.validation_error = err;
      if (err <= opt.validation_factor * eps * gmax[c]) break;
      if (attempt == 3) {
        throw NonSeparableError("approximate_functions: validation error " + std::to_string(err) +
                                " exceeds " + std::to_string(opt.validation_factor * eps * gmax[c]));
      }
      tol *= 0.1;
    }
  }
  return out;
}

[[nodiscard]] inline SeparableFunction3 approximate_function(const PointFunction& g, double eps,
                                                             const ChebyshevOptions& opt = {}) {
  auto gv = [&g](const Vec3& e) {
    Vector v(1);
    v[0] = g(e);
    return v;
  };
  return approximate_functions(gv, 1, eps, 0.0, opt).front();
}

}  // namespace lriga
