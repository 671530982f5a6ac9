// SPDX-License-Identifier: MIT
#include "support.hpp"

#include <gtest/gtest.h>

using namespace lriga;
using namespace lriga::testing;

namespace {

const std::array<std::array<Bc, 2>, 4> kBcs{{{Bc::dirichlet, Bc::dirichlet},
                                             {Bc::dirichlet, Bc::neumann},
                                             {Bc::neumann, Bc::dirichlet},
                                             {Bc::neumann, Bc::neumann}}};

}  // namespace

TEST(ExactEigen, GeneralizedEigenpairs) {
  const SplineSpace1D S(3, 10);
  const UnivariatePencil P = assemble_pencil(S);
  const ApproxEigen1D E = exact_eigen(P);
  const Matrix M(P.M), K(P.K);
  EXPECT_LT((E.U.transpose() * M * E.U - Matrix::Identity(E.n, E.n)).norm(), 1e-10);
  EXPECT_LT((K * E.U - M * E.U * E.lambda.asDiagonal()).norm(), 1e-8 * E.max_lambda());
  EXPECT_GT(E.min_lambda(), 0.0);
}

TEST(BandedLU, SolvesAgainstDense) {
  std::mt19937 rng(21);
  Matrix A = Matrix::Zero(12, 12);
  std::uniform_real_distribution<double> u(-1, 1);
  for (Index i = 0; i < 12; ++i)
    for (Index j = std::max<Index>(0, i - 2); j <= std::min<Index>(11, i + 3); ++j) A(i, j) = u(rng) + (i == j ? 4.0 : 0.0);
  const BandedLU lu{SpMat(A.sparseView())};
  EXPECT_TRUE(lu.banded());
  const Matrix B = random_matrix(rng, 12, 3);
  EXPECT_LT((A * lu.solve(B) - B).norm(), 1e-12 * B.norm());
  EXPECT_LT((A.transpose() * lu.solve(B, true) - B).norm(), 1e-12 * B.norm());
}

TEST(ApproxEigen, SineInterpolationAtCollocationPoints) {
  for (int p : {3, 4, 5})
    for (const auto& bc : kBcs)
      for (int n_el : {8, 16}) {
        const SplineSpace1D S(p, n_el, bc[0], bc[1]);
        const ApproxEigen1D E = approx_eigen(S, assemble_pencil(S));
        ASSERT_FALSE(E.exact);
        Matrix sel = Matrix::Zero(E.n, E.n1);
        sel.topRows(E.n1).setIdentity();
        const std::vector<double> pts(E.dft->points().data(), E.dft->points().data() + E.n1);
        const Matrix interp = basis_matrix(S, pts, 0) * E.apply(sel, false);
        const Matrix ref = E.dft->dense();
        EXPECT_LT((interp - ref).cwiseAbs().maxCoeff(), 1e-10) << "p=" << p << " n_el=" << n_el;
      }
}

TEST(ApproxEigen, FastTransformEqualsDense) {
  // The FFT identities tie the transform length to n_el, so sizes come from real spaces.
  std::mt19937 rng(22);
  EigenOptions fo;
  fo.force_fast = true;
  for (int p : {3, 4, 5})
    for (const auto& bc : kBcs)
      for (int n_el : {5, 8, 16}) {
        const SplineSpace1D S(p, n_el, bc[0], bc[1]);
        const ApproxEigen1D E = approx_eigen(S, assemble_pencil(S), fo);
        if (E.exact) continue;  // n_el <= p
        ASSERT_TRUE(E.dft->fast());
        const Matrix dense = E.dft->dense();
        const Matrix B = random_matrix(rng, E.n1, 3);
        for (bool t : {false, true}) {
          const Matrix ref = t ? Matrix(dense.transpose() * B) : Matrix(dense * B);
          EXPECT_LT((E.dft->apply(B, t) - ref).cwiseAbs().maxCoeff(), 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()))
              << "p=" << p << " n_el=" << n_el << " t=" << t;
        }
      }
}

TEST(ApproxEigen, TransposeApplicationIsAdjoint) {
  std::mt19937 rng(23);
  const SplineSpace1D S(4, 20, Bc::dirichlet, Bc::neumann);
  const ApproxEigen1D E = approx_eigen(S, assemble_pencil(S));
  const Matrix A = random_matrix(rng, E.n, 2), B = random_matrix(rng, E.n, 2);
  EXPECT_NEAR((A.transpose() * E.apply(B, false)).trace(), (E.apply(A, true).transpose() * B).trace(), 1e-10);
}

TEST(ApproxEigen, EigenvaluesNonNegativeAndBounded) {
  for (const auto& bc : kBcs) {
    const SplineSpace1D S(3, 24, bc[0], bc[1]);
    const UnivariatePencil P = assemble_pencil(S);
    const ApproxEigen1D A = approx_eigen(S, P), X = exact_eigen(P);
    EXPECT_GE(A.min_lambda(), 0.0);
    EXPECT_LT(A.max_lambda(), 2.0 * X.max_lambda());
  }
}

TEST(ApproxEigen, OneDimensionalSpectrumIndependentOfMesh) {
  // Spectrum of the approximate pencil U^{-T}(Lambda + 1)U^{-1} relative to K + M.
  for (int p : {3, 4})
    for (int n_el : {16, 48}) {
      const SplineSpace1D S(p, n_el);
      const UnivariatePencil P = assemble_pencil(S);
      const ApproxEigen1D E = approx_eigen(S, P);
      const Matrix U = E.dense();
      const Matrix Uinv = U.inverse();
      const Matrix Ptilde = Uinv.transpose() * (E.lambda.array() + 1.0).matrix().asDiagonal() * Uinv;
      const Matrix A = Matrix(P.K) + Matrix(P.M);
      Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(A, Ptilde);
      EXPECT_GT(es.eigenvalues().minCoeff(), 0.3) << "p=" << p << " n_el=" << n_el;
      EXPECT_LT(es.eigenvalues().maxCoeff(), 1.5) << "p=" << p << " n_el=" << n_el;
    }
}

TEST(ApproxEigen, SmallMeshesFallBackToExact) {
  const SplineSpace1D S(3, 3);
  EXPECT_TRUE(approx_eigen(S, assemble_pencil(S)).exact);
  const SplineSpace1D T(2, 30);
  EXPECT_TRUE(approx_eigen(T, assemble_pencil(T)).exact);
}

TEST(ExpSum, MeasuredErrorMeetsTarget) {
  for (double M : {1.0, 10.0, 1e3, 1.6e4, 2.6e5}) {
    const ExpSum es = build_exp_sum(1.0, M, 0.1);
    EXPECT_LE(es.measured_error, 0.1 / M) << M;
    for (double x : {1.0, std::sqrt(M), M}) EXPECT_NEAR(es(x), 1.0 / x, 0.1 / M * (1 + 1e-9));
  }
}

TEST(ExpSum, RankGrowsSlowlyWithRatio) {
  int last = 0;
  for (double M : {10.0, 1e2, 1e3, 1e4, 1e5}) {
    const int R = build_exp_sum(1.0, M, 0.1).rank();
    EXPECT_GE(R, last);
    last = R;
  }
  EXPECT_LE(last, 40);
}

TEST(ExpSum, ScaleInvariance) {
  const ExpSum a = build_exp_sum(1.0, 500.0, 0.1), b = build_exp_sum(3.0, 1500.0, 0.1);
  EXPECT_EQ(a.rank(), b.rank());
  EXPECT_LT(exp_sum_bound(20, 1e4), exp_sum_bound(10, 1e4));
  EXPECT_THROW((void)build_exp_sum(0.0, 1.0, 0.1), std::invalid_argument);
  EXPECT_THROW((void)build_exp_sum(1.0, 1e8, 1e-12, 4), SetupError);
}
