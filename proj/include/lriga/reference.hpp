// SPDX-License-Identifier: MIT
#pragma once

// Dense brute-force references for tests. Every routine refuses problems with
// more than kOracleDofLimit unknowns per component.

#include "lriga/elasticity.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace lriga {

namespace detail {

inline void oracle_guard(Index n, const char* what) {
  if (n > kOracleDofLimit) {
    throw GuardError(std::string(what) + ": " + std::to_string(n) + " unknowns exceeds oracle guard of " +
                     std::to_string(kOracleDofLimit));
  }
}

inline Index total(const Dims& n) { return n[0] * n[1] * n[2]; }

}  // namespace detail

// sum core(a,b,c) C3[c] ⊗ C2[b] ⊗ C1[a].
[[nodiscard]] inline Matrix dense_kron_operator(const TuckerOperator3& C) {
  const Dims nr = C.row_dims(), nc = C.col_dims();
  detail::oracle_guard(std::max(detail::total(nr), detail::total(nc)), "dense_kron_operator");
  Matrix A = Matrix::Zero(detail::total(nr), detail::total(nc));
  const MultilinearRank R = C.rank();
  for (Index c = 0; c < R.r3; ++c) {
    const Matrix C3(C.factors[2][c]);
    for (Index b = 0; b < R.r2; ++b) {
      const Matrix C32 = kron(C3, Matrix(C.factors[1][b]));
      for (Index a = 0; a < R.r1; ++a) {
        const double q = C.core(a, b, c);
        if (q != 0.0) A += q * kron(C32, Matrix(C.factors[0][a]));
      }
    }
  }
  return A;
}

[[nodiscard]] inline Vector dense_vector(const TuckerTensor3& x) { return to_dense(x).data; }

[[nodiscard]] inline Matrix dense_block_operator(const BlockTuckerOperator& A) {
  const Index N = detail::total(A.dims);
  detail::oracle_guard(N, "dense_block_operator");
  Matrix D = Matrix::Zero(3 * N, 3 * N);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (A.nonzero[i][j]) D.block(i * N, j * N, N, N) = dense_kron_operator(A.A[i][j]);
  return D;
}

[[nodiscard]] inline Vector dense_block_vector(const BlockTuckerVector& x) {
  const Index N = detail::total(x[0].dims());
  Vector v(3 * N);
  for (int c = 0; c < 3; ++c) v.segment(c * N, N) = dense_vector(x[c]);
  return v;
}

// Element-loop Galerkin matrix of sum_t int g_t d_{row_dir} v d_{col_dir} u over
// tensor Gauss points, with the coefficients evaluated pointwise.
[[nodiscard]] inline Matrix dense_galerkin(const Spaces& rows, const Spaces& cols,
                                           const std::vector<CoefficientTerm>& terms) {
  const Dims nr = space_dims(rows), nc = space_dims(cols);
  detail::oracle_guard(std::max(detail::total(nr), detail::total(nc)), "dense_galerkin");
  std::array<int, 3> q{};
  for (int m = 0; m < 3; ++m) {
    Index t = 1;
    for (const auto& term : terms)
      if (!term.g->zero) t = std::max(t, term.g->terms()[m]);
    q[m] = weighted_quadrature_points(rows[m].p, t);
  }
  std::array<std::vector<double>, 3> gx, gw;
  for (int m = 0; m < 3; ++m) gauss_legendre(q[m], gx[m], gw[m]);
  const int p0 = rows[0].p, p1 = rows[1].p, p2 = rows[2].p;
  const int nloc = (p0 + 1) * (p1 + 1) * (p2 + 1);
  Matrix A = Matrix::Zero(detail::total(nr), detail::total(nc));
  std::vector<Index> ri(nloc), ci(nloc);
  for (int e2 = 0; e2 < rows[2].n_el; ++e2)
    for (int e1 = 0; e1 < rows[1].n_el; ++e1)
      for (int e0 = 0; e0 < rows[0].n_el; ++e0) {
        const std::array<int, 3> e{e0, e1, e2};
        for (int c = 0, s = 0; c <= p2; ++c)
          for (int b = 0; b <= p1; ++b)
            for (int a = 0; a <= p0; ++a, ++s) {
              const Index r0 = rows[0].free_index(e0 + a), r1 = rows[1].free_index(e1 + b), r2 = rows[2].free_index(e2 + c);
              const Index c0 = cols[0].free_index(e0 + a), c1 = cols[1].free_index(e1 + b), c2 = cols[2].free_index(e2 + c);
              ri[s] = (r0 < 0 || r1 < 0 || r2 < 0) ? -1 : r0 + nr[0] * (r1 + nr[1] * r2);
              ci[s] = (c0 < 0 || c1 < 0 || c2 < 0) ? -1 : c0 + nc[0] * (c1 + nc[1] * c2);
            }
        Matrix local = Matrix::Zero(nloc, nloc);
        Matrix grad(nloc, 4);  // value, d/deta1, d/deta2, d/deta3
        for (int g2 = 0; g2 < q[2]; ++g2)
          for (int g1 = 0; g1 < q[1]; ++g1)
            for (int g0 = 0; g0 < q[0]; ++g0) {
              const std::array<int, 3> g{g0, g1, g2};
              Vec3 x;
              double w = 1.0;
              std::array<Matrix, 3> d;
              for (int m = 0; m < 3; ++m) {
                const double h = rows[m].h();
                x[m] = (e[m] + gx[m][g[m]]) * h;
                w *= gw[m][g[m]] * h;
                d[m] = basis_derivatives(rows[m], e[m], x[m], 1);
              }
              for (int c = 0, s = 0; c <= p2; ++c)
                for (int b = 0; b <= p1; ++b)
                  for (int a = 0; a <= p0; ++a, ++s) {
                    grad(s, 0) = d[0](a, 0) * d[1](b, 0) * d[2](c, 0);
                    grad(s, 1) = d[0](a, 1) * d[1](b, 0) * d[2](c, 0);
                    grad(s, 2) = d[0](a, 0) * d[1](b, 1) * d[2](c, 0);
                    grad(s, 3) = d[0](a, 0) * d[1](b, 0) * d[2](c, 1);
                  }
              for (const auto& t : terms) {
                if (t.g->zero) continue;
                const double v = w * (*t.g)(x);
                local.noalias() += v * grad.col(t.row_dir + 1) * grad.col(t.col_dir + 1).transpose();
              }
            }
        for (int a = 0; a < nloc; ++a) {
          if (ri[a] < 0) continue;
          for (int b = 0; b < nloc; ++b)
            if (ci[b] >= 0) A(ri[a], ci[b]) += local(a, b);
        }
      }
  return A;
}

// Element-loop load vector int w v.
[[nodiscard]] inline Vector dense_rhs(const Spaces& S, const SeparableFunction3& w) {
  const Dims n = space_dims(S);
  detail::oracle_guard(detail::total(n), "dense_rhs");
  Vector f = Vector::Zero(detail::total(n));
  if (w.zero) return f;
  std::array<std::vector<double>, 3> gx, gw;
  for (int m = 0; m < 3; ++m) gauss_legendre(weighted_quadrature_points(S[m].p, w.terms()[m]), gx[m], gw[m]);
  for (int e2 = 0; e2 < S[2].n_el; ++e2)
    for (int e1 = 0; e1 < S[1].n_el; ++e1)
      for (int e0 = 0; e0 < S[0].n_el; ++e0) {
        const std::array<int, 3> e{e0, e1, e2};
        for (std::size_t g2 = 0; g2 < gx[2].size(); ++g2)
          for (std::size_t g1 = 0; g1 < gx[1].size(); ++g1)
            for (std::size_t g0 = 0; g0 < gx[0].size(); ++g0) {
              const std::array<std::size_t, 3> g{g0, g1, g2};
              Vec3 x;
              double wt = 1.0;
              std::array<Matrix, 3> d;
              for (int m = 0; m < 3; ++m) {
                const double h = S[m].h();
                x[m] = (e[m] + gx[m][g[m]]) * h;
                wt *= gw[m][g[m]] * h;
                d[m] = basis_derivatives(S[m], e[m], x[m], 0);
              }
              wt *= w(x);
              for (int c = 0; c <= S[2].p; ++c)
                for (int b = 0; b <= S[1].p; ++b)
                  for (int a = 0; a <= S[0].p; ++a) {
                    const Index i0 = S[0].free_index(e0 + a), i1 = S[1].free_index(e1 + b), i2 = S[2].free_index(e2 + c);
                    if (i0 < 0 || i1 < 0 || i2 < 0) continue;
                    f[i0 + n[0] * (i1 + n[1] * i2)] += wt * d[0](a, 0) * d[1](b, 0) * d[2](c, 0);
                  }
            }
      }
  return f;
}

// Dense Poisson system with the same approximated metric and load as `sys`.
[[nodiscard]] inline std::pair<Matrix, Vector> dense_galerkin(const AssembledSystem& sys) {
  return {dense_galerkin(sys.spaces, sys.spaces, poisson_terms(sys)), dense_rhs(sys.spaces, sys.omega)};
}

[[nodiscard]] inline Matrix dense_elasticity(const ElasticitySystem& sys) {
  const Index N = detail::total(space_dims(sys.spaces));
  detail::oracle_guard(N, "dense_elasticity");
  Matrix D(3 * N, 3 * N);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      D.block(i * N, j * N, N, N) = dense_galerkin(sys.spaces, sys.spaces, detail::block_terms(sys, i, j));
  return D;
}

// Cholesky solve; a matrix that is not numerically SPD is rejected.
[[nodiscard]] inline Vector dense_solve(const Matrix& A, const Vector& b) {
  if (A.rows() != A.cols() || A.rows() != b.size()) throw ShapeError("dense_solve: size mismatch");
  if (A.rows() > 3 * kOracleDofLimit) throw GuardError("dense_solve: system too large for the oracle");
  Eigen::LLT<Matrix> llt(A);
  if (llt.info() != Eigen::Success) throw SetupError("dense_solve: matrix is not symmetric positive definite");
  return llt.solve(b);
}

// Smallest eigenvalue of a symmetric matrix.
[[nodiscard]] inline double dense_min_eigenvalue(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

}  // namespace lriga
