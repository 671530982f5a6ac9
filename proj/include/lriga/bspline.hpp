// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/common.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace lriga {

enum class Bc { dirichlet, neumann };

// Open uniform knot vector of degree p on [0,1]; Dirichlet ends drop the
// boundary basis function.
struct SplineSpace1D {
  int p = 1;
  int n_el = 1;
  std::array<Bc, 2> bc{Bc::dirichlet, Bc::dirichlet};
  std::vector<double> knots;

  SplineSpace1D() : SplineSpace1D(1, 1) {}
  SplineSpace1D(int degree, int elements, Bc left = Bc::dirichlet, Bc right = Bc::dirichlet)
      : p(degree), n_el(elements), bc{left, right} {
    if (p < 1) throw std::invalid_argument("SplineSpace1D: degree must be >= 1");
    if (n_el < 1) throw std::invalid_argument("SplineSpace1D: need at least one element");
    knots.reserve(n_el + 2 * p + 1);
    for (int i = 0; i < p; ++i) knots.push_back(0.0);
    for (int i = 0; i <= n_el; ++i) knots.push_back(static_cast<double>(i) / n_el);
    for (int i = 0; i < p; ++i) knots.push_back(1.0);
  }

  [[nodiscard]] Index full_dim() const { return n_el + p; }
  [[nodiscard]] Index first_free() const { return bc[0] == Bc::dirichlet ? 1 : 0; }
  [[nodiscard]] Index dim() const {
    return full_dim() - (bc[0] == Bc::dirichlet ? 1 : 0) - (bc[1] == Bc::dirichlet ? 1 : 0);
  }
  // Free index of full basis function g, or -1 when it is constrained.
  [[nodiscard]] Index free_index(Index g) const {
    const Index i = g - first_free();
    return (i >= 0 && i < dim()) ? i : -1;
  }
  [[nodiscard]] double h() const { return 1.0 / n_el; }
  [[nodiscard]] int span_of(double x) const {
    return std::clamp(static_cast<int>(std::floor(x * n_el)), 0, n_el - 1);
  }
  // Same knots with every basis function kept.
  [[nodiscard]] SplineSpace1D full() const { return SplineSpace1D(p, n_el, Bc::neumann, Bc::neumann); }
};

// Values and derivatives up to order nd of the p+1 full basis functions active on
// span s (functions s..s+p); row = function, column = derivative order.
[[nodiscard]] inline Matrix basis_derivatives(const SplineSpace1D& S, int s, double x, int nd) {
  const int p = S.p;
  const auto& U = S.knots;
  const int span = s + p;  // knot index with U[span] <= x < U[span+1]
  Matrix ndu(p + 1, p + 1);
  std::vector<double> left(p + 1), right(p + 1);
  ndu(0, 0) = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - U[span + 1 - j];
    right[j] = U[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu(j, r) = right[r + 1] + left[j - r];
      const double temp = ndu(j, r) == 0.0 ? 0.0 : ndu(r, j - 1) / ndu(j, r);
      ndu(r, j) = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu(j, j) = saved;
  }
  Matrix ders = Matrix::Zero(p + 1, nd + 1);
  for (int j = 0; j <= p; ++j) ders(j, 0) = ndu(j, p);
  Matrix a(2, p + 1);
  for (int r = 0; r <= p; ++r) {
    int s1 = 0, s2 = 1;
    a(0, 0) = 1.0;
    for (int k = 1; k <= std::min(nd, p); ++k) {
      double d = 0.0;
      const int rk = r - k, pk = p - k;
      if (r >= k) {
        a(s2, 0) = a(s1, 0) / ndu(pk + 1, rk);
        d = a(s2, 0) * ndu(rk, pk);
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a(s2, j) = (a(s1, j) - a(s1, j - 1)) / ndu(pk + 1, rk + j);
        d += a(s2, j) * ndu(rk + j, pk);
      }
      if (r <= pk) {
        a(s2, k) = -a(s1, k - 1) / ndu(pk + 1, r);
        d += a(s2, k) * ndu(r, pk);
      }
      ders(r, k) = d;
      std::swap(s1, s2);
    }
  }
  double fac = p;
  for (int k = 1; k <= std::min(nd, p); ++k) {
    ders.col(k) *= fac;
    fac *= (p - k);
  }
  return ders;
}

// Nonzero (free index, value) pairs of the basis or its first derivative at x.
[[nodiscard]] inline std::vector<std::pair<Index, double>> eval_basis(const SplineSpace1D& S, double x, int deriv) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::domain_error("eval_basis: point outside [0,1]");
  if (deriv < 0 || deriv > 1) throw std::invalid_argument("eval_basis: derivative order must be 0 or 1");
  const int s = S.span_of(x);
  const Matrix d = basis_derivatives(S, s, x, deriv);
  std::vector<std::pair<Index, double>> out;
  for (int j = 0; j <= S.p; ++j) {
    const Index fi = S.free_index(s + j);
    if (fi >= 0) out.emplace_back(fi, d(j, deriv));
  }
  return out;
}

// Gauss-Legendre rule with q points on [0,1] (Newton on the Legendre recurrence).
inline void gauss_legendre(int q, std::vector<double>& x, std::vector<double>& w) {
  x.assign(q, 0.0);
  w.assign(q, 0.0);
  for (int i = 0; i < (q + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= q; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = q * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= q; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = q * (z * p0 - p1) / (z * z - 1.0);
    }
    const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
    x[i] = 0.5 * (1.0 - z);
    x[q - 1 - i] = 0.5 * (1.0 + z);
    w[i] = w[q - 1 - i] = 0.5 * wt;
  }
}

// Per-span Gauss points for a space.
struct QuadratureRule1D {
  int q = 0;
  std::vector<double> points;
  std::vector<double> weights;
  std::vector<int> span;

  QuadratureRule1D() = default;
  QuadratureRule1D(const SplineSpace1D& S, int q_per_span) : q(q_per_span) {
    std::vector<double> gx, gw;
    gauss_legendre(q, gx, gw);
    const double h = S.h();
    for (int e = 0; e < S.n_el; ++e) {
      for (int i = 0; i < q; ++i) {
        points.push_back((e + gx[i]) * h);
        weights.push_back(gw[i] * h);
        span.push_back(e);
      }
    }
  }
  [[nodiscard]] Index size() const { return static_cast<Index>(points.size()); }
};

// Matrix of free basis values (deriv 0 or 1) at the quadrature points of a
// rule built on the same space: rows = points, cols = free functions.
[[nodiscard]] inline SpMat basis_matrix(const SplineSpace1D& S, const std::vector<double>& pts, int deriv) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(pts.size() * (S.p + 1));
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (auto [j, v] : eval_basis(S, pts[i], deriv)) trip.emplace_back(static_cast<Index>(i), j, v);
  }
  SpMat B(static_cast<Index>(pts.size()), S.dim());
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

// Chebyshev series on [0,1] through the affine map eta -> 2 eta - 1 (Clenshaw).
[[nodiscard]] inline double chebyshev_eval(const Vector& c, double eta) {
  const double t = 2.0 * eta - 1.0;
  double b1 = 0.0, b2 = 0.0;
  for (Index k = c.size() - 1; k >= 1; --k) {
    const double b0 = 2.0 * t * b1 - b2 + c[k];
    b2 = b1;
    b1 = b0;
  }
  return (c.size() > 0 ? c[0] : 0.0) + t * b1 - b2;
}

struct UnivariatePencil {
  SpMat M;
  SpMat K;
};

namespace detail {

template <class Weight>
SpMat assemble_1d(const SplineSpace1D& row, const SplineSpace1D& col, int d_row, int d_col, int q, Weight&& w) {
  if (row.p != col.p || row.n_el != col.n_el) throw ShapeError("assemble: row and column spaces must share knots");
  std::vector<double> gx, gw;
  gauss_legendre(q, gx, gw);
  const double h = row.h();
  const int p = row.p;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(row.n_el) * (p + 1) * (p + 1));
  for (int e = 0; e < row.n_el; ++e) {
    Matrix local = Matrix::Zero(p + 1, p + 1);
    for (int g = 0; g < q; ++g) {
      const double x = (e + gx[g]) * h;
      const Matrix d = basis_derivatives(row, e, x, 1);
      const double wx = gw[g] * h * w(x);
      local.noalias() += wx * d.col(d_row) * d.col(d_col).transpose();
    }
    for (int a = 0; a <= p; ++a) {
      const Index i = row.free_index(e + a);
      if (i < 0) continue;
      for (int b = 0; b <= p; ++b) {
        const Index j = col.free_index(e + b);
        if (j >= 0) trip.emplace_back(i, j, local(a, b));
      }
    }
  }
  SpMat A(row.dim(), col.dim());
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

}  // namespace detail

[[nodiscard]] inline UnivariatePencil assemble_pencil(const SplineSpace1D& S) {
  auto one = [](double) { return 1.0; };
  return {detail::assemble_1d(S, S, 0, 0, S.p + 1, one), detail::assemble_1d(S, S, 1, 1, S.p + 1, one)};
}

[[nodiscard]] inline int weighted_quadrature_points(int p, Index cheb_terms) {
  const Index t = std::max<Index>(0, cheb_terms - 1);
  return p + 1 + static_cast<int>((t + 1) / 2);
}

// [C]_{ij} = int_0^1 d^{d_row} b_i d^{d_col} b_j w(eta) deta, w given by Chebyshev coefficients.
[[nodiscard]] inline SpMat assemble_weighted_matrix(const SplineSpace1D& row, const SplineSpace1D& col, int d_row,
                                                    int d_col, const Vector& w) {
  return detail::assemble_1d(row, col, d_row, d_col, weighted_quadrature_points(row.p, w.size()),
                             [&w](double x) { return chebyshev_eval(w, x); });
}

// [F]_i = int_0^1 b_i w(eta) deta.
[[nodiscard]] inline Vector assemble_weighted_rhs(const SplineSpace1D& S, const Vector& w) {
  const int q = weighted_quadrature_points(S.p, w.size());
  std::vector<double> gx, gw;
  gauss_legendre(q, gx, gw);
  Vector f = Vector::Zero(S.dim());
  const double h = S.h();
  for (int e = 0; e < S.n_el; ++e) {
    for (int g = 0; g < q; ++g) {
      const double x = (e + gx[g]) * h;
      const Matrix d = basis_derivatives(S, e, x, 0);
      const double wx = gw[g] * h * chebyshev_eval(w, x);
      for (int a = 0; a <= S.p; ++a) {
        const Index i = S.free_index(e + a);
        if (i >= 0) f[i] += wx * d(a, 0);
      }
    }
  }
  return f;
}

}  // namespace lriga
