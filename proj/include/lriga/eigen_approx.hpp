// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/bspline.hpp"
#include "lriga/sine_transform.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <memory>
#include <vector>

namespace lriga {

// LU of a banded matrix without pivoting; falls back to a dense pivoted LU
// when a pivot drops below 1e-12 of the largest entry.
class BandedLU {
 public:
  BandedLU() = default;
  explicit BandedLU(const SpMat& A) : n_(A.rows()) {
    if (A.rows() != A.cols()) throw ShapeError("BandedLU: matrix must be square");
    double amax = 0.0;
    for (Index i = 0; i < A.outerSize(); ++i)
      for (SpMat::InnerIterator it(A, i); it; ++it) {
        if (it.value() == 0.0) continue;
        kl_ = std::max<Index>(kl_, it.row() - it.col());
        ku_ = std::max<Index>(ku_, it.col() - it.row());
        amax = std::max(amax, std::abs(it.value()));
      }
    band_ = Matrix::Zero(kl_ + ku_ + 1, n_);
    for (Index i = 0; i < A.outerSize(); ++i)
      for (SpMat::InnerIterator it(A, i); it; ++it) at(it.row(), it.col()) = it.value();
    for (Index k = 0; k < n_; ++k) {
      const double piv = at(k, k);
      if (!(std::abs(piv) > 1e-12 * amax)) {
        dense_ = std::make_unique<Eigen::PartialPivLU<Matrix>>(Matrix(A));
        band_.resize(0, 0);
        return;
      }
      for (Index i = k + 1; i <= std::min(n_ - 1, k + kl_); ++i) {
        const double l = at(i, k) / piv;
        at(i, k) = l;
        for (Index j = k + 1; j <= std::min(n_ - 1, k + ku_); ++j) at(i, j) -= l * at(k, j);
      }
    }
  }

  [[nodiscard]] bool banded() const { return dense_ == nullptr; }
  [[nodiscard]] Index lower() const { return kl_; }
  [[nodiscard]] Index upper() const { return ku_; }

  // A^{-1} B or A^{-T} B.
  [[nodiscard]] Matrix solve(const Matrix& B, bool transpose = false) const {
    if (B.rows() != n_) throw ShapeError("BandedLU::solve: row mismatch");
    if (dense_) return transpose ? Matrix(dense_->transpose().solve(B)) : Matrix(dense_->solve(B));
    Matrix X = B;
    for (Index c = 0; c < X.cols(); ++c) {
      double* x = X.col(c).data();
      if (!transpose) {
        for (Index i = 0; i < n_; ++i)
          for (Index k = std::max<Index>(0, i - kl_); k < i; ++k) x[i] -= cat(i, k) * x[k];
        for (Index i = n_ - 1; i >= 0; --i) {
          for (Index k = i + 1; k <= std::min(n_ - 1, i + ku_); ++k) x[i] -= cat(i, k) * x[k];
          x[i] /= cat(i, i);
        }
      } else {
        for (Index i = 0; i < n_; ++i) {
          for (Index k = std::max<Index>(0, i - ku_); k < i; ++k) x[i] -= cat(k, i) * x[k];
          x[i] /= cat(i, i);
        }
        for (Index i = n_ - 1; i >= 0; --i)
          for (Index k = i + 1; k <= std::min(n_ - 1, i + kl_); ++k) x[i] -= cat(k, i) * x[k];
      }
    }
    return X;
  }

 private:
  double& at(Index i, Index j) { return band_(ku_ + i - j, j); }
  [[nodiscard]] double cat(Index i, Index j) const { return band_(ku_ + i - j, j); }

  Index n_ = 0, kl_ = 0, ku_ = 0;
  Matrix band_;
  std::unique_ptr<Eigen::PartialPivLU<Matrix>> dense_;
};

struct EigenOptions {
  bool force_exact = false;
  bool force_fast = false;  // FFT path even for short transforms
};

// Approximate generalized eigenpairs K U = M U Lambda of a univariate pencil.
// Exact path: dense eigensolve. Otherwise U ~ [V1 U1 | V2 U2] with V1 a sparse
// basis of the subspace satisfying the boundary derivative conditions,
// U1 = C^{-1} S (C collocation, S sine values) and (U2, Lambda2) from the
// pencil projected onto the M-complement V2.
struct ApproxEigen1D {
  Index n = 0, n1 = 0, n2 = 0;
  int k0 = 0, k1 = 0;
  bool exact = true;
  Vector lambda;

  Matrix U;  // exact path only

  SpMat V1;  // n x n1
  Matrix V2, U2, W2;  // W2 = V2 U2
  BandedLU collocation;
  std::shared_ptr<const SineTransform> dft;

  [[nodiscard]] double min_lambda() const { return lambda.minCoeff(); }
  [[nodiscard]] double max_lambda() const { return lambda.maxCoeff(); }

  // U~ B or U~^T B.
  [[nodiscard]] Matrix apply(const Matrix& B, bool transpose) const {
    if (B.rows() != n) throw ShapeError("ApproxEigen1D::apply: expected " + std::to_string(n) + " rows");
    if (B.cols() == 0) return Matrix(n, 0);
    if (exact) return transpose ? Matrix(U.transpose() * B) : Matrix(U * B);
    if (!transpose) {
      Matrix Y = V1 * collocation.solve(dft->apply(B.topRows(n1), false));
      if (n2 > 0) Y.noalias() += W2 * B.bottomRows(n2);
      return Y;
    }
    Matrix Y(n, B.cols());
    const Matrix Z = V1.transpose() * B;
    Y.topRows(n1) = dft->apply(collocation.solve(Z, true), true);
    if (n2 > 0) Y.bottomRows(n2) = W2.transpose() * B;
    return Y;
  }

  [[nodiscard]] Matrix dense() const { return apply(Matrix::Identity(n, n), false); }
};

namespace detail {

// Derivative orders forced to vanish at a boundary: even orders >= 2 at a
// Dirichlet end, odd orders at a Neumann end, all at most p - 1.
inline std::vector<int> constrained_orders(int p, Bc bc) {
  std::vector<int> o;
  for (int k = bc == Bc::dirichlet ? 2 : 1; k <= p - 1; k += 2) o.push_back(k);
  return o;
}

// Basis of {phi in span of the K boundary-most free functions : constrained derivatives vanish}.
inline Matrix boundary_kernel(const SplineSpace1D& S, int side, const std::vector<int>& orders, Index K) {
  if (K == 0) return Matrix(0, 0);
  const Index n = S.dim();
  const int span = side == 0 ? 0 : S.n_el - 1;
  const Matrix d = basis_derivatives(S, span, side == 0 ? 0.0 : 1.0, S.p);
  Matrix C = Matrix::Zero(static_cast<Index>(orders.size()), K);
  for (int a = 0; a <= S.p; ++a) {
    const Index f = S.free_index(span + a);
    if (f < 0) continue;
    const Index col = side == 0 ? f : f - (n - K);
    if (col < 0 || col >= K) continue;
    for (std::size_t r = 0; r < orders.size(); ++r) C(static_cast<Index>(r), col) = d(a, orders[r]);
  }
  Eigen::JacobiSVD<Matrix> svd(C, Eigen::ComputeFullV);
  const Index c = static_cast<Index>(orders.size());
  const auto& s = svd.singularValues();
  if (c > 0 && !(s[c - 1] > 1e-10 * s[0])) throw SetupError("approx_eigen: dependent boundary derivative constraints");
  return svd.matrixV().rightCols(K - c);
}

}  // namespace detail

[[nodiscard]] inline ApproxEigen1D exact_eigen(const UnivariatePencil& P) {
  ApproxEigen1D E;
  E.n = P.M.rows();
  E.n1 = E.n;
  E.exact = true;
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(Matrix(P.K), Matrix(P.M));
  if (es.info() != Eigen::Success) throw SetupError("exact_eigen: generalized eigensolver failed");
  E.U = es.eigenvectors();
  E.lambda = es.eigenvalues().cwiseMax(0.0);
  return E;
}

[[nodiscard]] inline ApproxEigen1D approx_eigen(const SplineSpace1D& S, const UnivariatePencil& P,
                                                const EigenOptions& opt = {}) {
  if (opt.force_exact || S.p <= 2 || S.n_el <= S.p) return exact_eigen(P);
  ApproxEigen1D E;
  E.exact = false;
  E.n = S.dim();
  E.k0 = S.bc[0] == Bc::neumann ? 1 : 0;
  E.k1 = S.bc[1] == Bc::neumann ? 1 : 0;
  const auto o0 = detail::constrained_orders(S.p, S.bc[0]);
  const auto o1 = detail::constrained_orders(S.p, S.bc[1]);
  auto reach = [](const std::vector<int>& o, Bc bc) -> Index {
    return o.empty() ? 0 : o.back() + 1 - (bc == Bc::dirichlet ? 1 : 0);
  };
  const Index K0 = reach(o0, S.bc[0]), K1 = reach(o1, S.bc[1]);
  const Index c0 = static_cast<Index>(o0.size()), c1 = static_cast<Index>(o1.size());
  if (K0 + K1 > E.n) throw SetupError("approx_eigen: too few elements for the boundary subspaces");
  E.n1 = E.n - c0 - c1;
  E.n2 = c0 + c1;

  const Matrix N0 = detail::boundary_kernel(S, 0, o0, K0);
  const Matrix N1 = detail::boundary_kernel(S, 1, o1, K1);
  std::vector<Eigen::Triplet<double>> trip;
  Index col = 0;
  for (Index j = 0; j < N0.cols(); ++j, ++col)
    for (Index i = 0; i < K0; ++i)
      if (N0(i, j) != 0.0) trip.emplace_back(i, col, N0(i, j));
  for (Index i = K0; i < E.n - K1; ++i, ++col) trip.emplace_back(i, col, 1.0);
  for (Index j = 0; j < N1.cols(); ++j, ++col)
    for (Index i = 0; i < K1; ++i)
      if (N1(i, j) != 0.0) trip.emplace_back(E.n - K1 + i, col, N1(i, j));
  if (col != E.n1) throw SetupError("approx_eigen: subspace dimension mismatch");
  E.V1.resize(E.n, E.n1);
  E.V1.setFromTriplets(trip.begin(), trip.end());

  auto dft = std::make_shared<SineTransform>(E.n1, E.k0, E.k1, S.p % 2 == 1, S.n_el, opt.force_fast);
  const Vector& x = dft->points();
  const SpMat Bpts = basis_matrix(S, std::vector<double>(x.data(), x.data() + x.size()), 0);
  SpMat C = Bpts * E.V1;
  C.prune(0.0);
  E.collocation = BandedLU(C);
  E.dft = std::move(dft);

  if (E.n2 > 0) {
    const SpMat G = SpMat(E.V1.transpose() * P.M * E.V1);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> gram(G);
    if (gram.info() != Eigen::Success) throw SetupError("approx_eigen: V1^T M V1 factorization failed");
    Matrix seeds = Matrix::Zero(E.n, E.n2);
    for (Index i = 0; i < c0; ++i) seeds(i, i) = 1.0;
    for (Index i = 0; i < c1; ++i) seeds(E.n - c1 + i, c0 + i) = 1.0;
    const Matrix rhs = E.V1.transpose() * (P.M * seeds);
    E.V2 = seeds - E.V1 * Matrix(gram.solve(rhs));
    const Matrix M2 = E.V2.transpose() * P.M * E.V2;
    const Matrix K2 = E.V2.transpose() * P.K * E.V2;
    Eigen::SelfAdjointEigenSolver<Matrix> check(M2);
    if (!(check.eigenvalues().minCoeff() > 1e-12 * check.eigenvalues().maxCoeff())) {
      throw SetupError("approx_eigen: projected boundary seeds are linearly dependent (n_el=" +
                       std::to_string(S.n_el) + ", p=" + std::to_string(S.p) + ")");
    }
    Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(K2, M2);
    if (es.info() != Eigen::Success) throw SetupError("approx_eigen: boundary eigensolve failed");
    E.U2 = es.eigenvectors();
    E.W2 = E.V2 * E.U2;
    E.lambda.resize(E.n);
    E.lambda.tail(E.n2) = es.eigenvalues().cwiseMax(0.0);
  } else {
    E.lambda.resize(E.n);
  }
  for (Index j = 0; j < E.n1; ++j) E.lambda[j] = E.dft->theta(j) * E.dft->theta(j);
  return E;
}

}  // namespace lriga
