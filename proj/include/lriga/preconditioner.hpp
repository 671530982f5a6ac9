// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/eigen_approx.hpp"
#include "lriga/exp_sum.hpp"
#include "lriga/truncation.hpp"

#include <functional>

namespace lriga {

// Exact fast diagonalization of sum_a w_a (M3 ⊗ .. K_a .. ⊗ M1). Applied to a
// Tucker tensor it densifies, so it is meant for oracles and small problems.
struct ExactFD {
  std::array<ApproxEigen1D, 3> eig;
  std::array<double, 3> weight{1.0, 1.0, 1.0};

  [[nodiscard]] Dims dims() const { return {eig[0].n, eig[1].n, eig[2].n}; }

  [[nodiscard]] DenseTensor3 apply_dense(const DenseTensor3& X) const {
    DenseTensor3 Y = X;
    for (int m = 0; m < 3; ++m) Y = mode_product(Y, m, eig[m].U.transpose());
    for (Index k = 0; k < Y.dims[2]; ++k)
      for (Index j = 0; j < Y.dims[1]; ++j)
        for (Index i = 0; i < Y.dims[0]; ++i) {
          const double d = weight[0] * eig[0].lambda[i] + weight[1] * eig[1].lambda[j] + weight[2] * eig[2].lambda[k];
          Y(i, j, k) = d > 0.0 ? Y(i, j, k) / d : 0.0;
        }
    for (int m = 0; m < 3; ++m) Y = mode_product(Y, m, eig[m].U);
    return Y;
  }

  [[nodiscard]] TuckerTensor3 apply(const TuckerTensor3& x) const {
    return sthosvd(apply_dense(to_dense(x)), 1e-14);
  }
};

[[nodiscard]] inline ExactFD exact_fd(const std::array<UnivariatePencil, 3>& pencils,
                                      const std::array<double, 3>& weight = {1.0, 1.0, 1.0}) {
  ExactFD P;
  for (int m = 0; m < 3; ++m) P.eig[m] = exact_eigen(pencils[m]);
  P.weight = weight;
  return P;
}

// P~^{-1} = (1/lambda_min) U~ (sum_j omega_j D3j ⊗ D2j ⊗ D1j) U~^T with
// D_ij = diag(exp(-alpha_j w_i Lambda~_i / lambda_min)).
struct LowRankFD {
  std::array<std::shared_ptr<const ApproxEigen1D>, 3> eig;
  std::array<double, 3> weight{1.0, 1.0, 1.0};
  ExpSum es;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::array<Matrix, 3> D;  // n_i x R_P

  [[nodiscard]] int rank() const { return es.rank(); }
  [[nodiscard]] Dims dims() const { return {eig[0]->n, eig[1]->n, eig[2]->n}; }
  [[nodiscard]] double core_weight(int j) const { return es.omega[j] / lambda_min; }

  // Lazy form: one term per exponential, all sharing the core of x.
  [[nodiscard]] TuckerSum apply_sum(const TuckerPtr& x, double w = 1.0) const {
    require_same_dims(dims(), x->dims(), "LowRankFD::apply");
    const int R = rank();
    TuckerSum s(x->dims());
    std::array<std::vector<std::shared_ptr<const Matrix>>, 3> Y;
    for (int m = 0; m < 3; ++m) {
      const Matrix Z = eig[m]->apply(x->factors[m], true);
      const Index r = Z.cols();
      Matrix W(Z.rows(), R * r);
      for (int j = 0; j < R; ++j) W.middleCols(j * r, r) = D[m].col(j).asDiagonal() * Z;
      const Matrix UW = eig[m]->apply(W, false);
      for (int j = 0; j < R; ++j) Y[m].push_back(std::make_shared<const Matrix>(UW.middleCols(j * r, r)));
    }
    auto core = std::shared_ptr<const DenseTensor3>(x, &x->core);
    for (int j = 0; j < R; ++j) s.terms.push_back({w * core_weight(j), core, {Y[0][j], Y[1][j], Y[2][j]}});
    return s;
  }

  // Explicit form with core diag(omega/lambda_min) ⊗ core(x), rank R_P r.
  [[nodiscard]] TuckerTensor3 apply(const TuckerTensor3& x) const {
    const TuckerSum s = apply_sum(share(x));
    const int R = rank();
    const MultilinearRank r = x.rank();
    std::array<Matrix, 3> f;
    for (int m = 0; m < 3; ++m) {
      f[m].resize(x.dims()[m], R * r[m]);
      for (int j = 0; j < R; ++j) f[m].middleCols(j * r[m], r[m]) = *s.terms[j].factors[m];
    }
    DenseTensor3 core({R * r.r1, R * r.r2, R * r.r3});
    for (int j = 0; j < R; ++j)
      for (Index k = 0; k < r.r3; ++k)
        for (Index jj = 0; jj < r.r2; ++jj)
          for (Index i = 0; i < r.r1; ++i) core(j * r.r1 + i, j * r.r2 + jj, j * r.r3 + k) = core_weight(j) * x.core(i, jj, k);
    return {std::move(core), std::move(f)};
  }

  // Diagonal of D~^{-1} (the exponential-sum inverse) at eigen-index (i,j,k).
  [[nodiscard]] double inverse_diagonal(Index i, Index j, Index k) const {
    double v = 0.0;
    for (int t = 0; t < rank(); ++t) v += es.omega[t] * D[0](i, t) * D[1](j, t) * D[2](k, t);
    return v / lambda_min;
  }
  [[nodiscard]] double diagonal(Index i, Index j, Index k) const {
    return weight[0] * eig[0]->lambda[i] + weight[1] * eig[1]->lambda[j] + weight[2] * eig[2]->lambda[k];
  }
};

[[nodiscard]] inline LowRankFD build_lowrank_fd(const std::array<std::shared_ptr<const ApproxEigen1D>, 3>& eig,
                                                double eps_prec, const std::array<double, 3>& weight = {1.0, 1.0, 1.0},
                                                int max_rank = 128) {
  LowRankFD P;
  P.eig = eig;
  P.weight = weight;
  for (int m = 0; m < 3; ++m) {
    P.lambda_min += weight[m] * eig[m]->min_lambda();
    P.lambda_max += weight[m] * eig[m]->max_lambda();
  }
  if (!(P.lambda_min > 0.0)) throw SetupError("build_lowrank_fd: lambda_min must be positive");
  P.es = build_exp_sum(P.lambda_min, P.lambda_max, eps_prec, max_rank);
  const int R = P.es.rank();
  for (int m = 0; m < 3; ++m) {
    P.D[m].resize(eig[m]->n, R);
    for (int j = 0; j < R; ++j)
      for (Index i = 0; i < eig[m]->n; ++i)
        P.D[m](i, j) = std::exp(-P.es.alpha[j] * weight[m] * eig[m]->lambda[i] / P.lambda_min);
  }
  return P;
}

[[nodiscard]] inline TuckerTensor3 apply_lowrank_fd(const LowRankFD& P, const TuckerTensor3& s) { return P.apply(s); }

[[nodiscard]] inline std::array<std::shared_ptr<const ApproxEigen1D>, 3> eigens_for(
    const std::array<SplineSpace1D, 3>& spaces, const EigenOptions& opt = {}) {
  std::array<std::shared_ptr<const ApproxEigen1D>, 3> e;
  for (int m = 0; m < 3; ++m) {
    for (int q = 0; q < m; ++q) {
      const auto& a = spaces[q];
      const auto& b = spaces[m];
      if (a.p == b.p && a.n_el == b.n_el && a.bc == b.bc) e[m] = e[q];
    }
    if (!e[m]) e[m] = std::make_shared<const ApproxEigen1D>(approx_eigen(spaces[m], assemble_pencil(spaces[m]), opt));
  }
  return e;
}

}  // namespace lriga
