// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/dense_tensor.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <vector>

namespace lriga {

struct MultilinearRank {
  Index r1 = 0, r2 = 0, r3 = 0;

  [[nodiscard]] Index operator[](int m) const { return m == 0 ? r1 : (m == 1 ? r2 : r3); }
  [[nodiscard]] Index max() const { return std::max({r1, r2, r3}); }
  friend bool operator==(const MultilinearRank&, const MultilinearRank&) = default;
};

// X = core ×3 factors[2] ×2 factors[1] ×1 factors[0].
struct TuckerTensor3 {
  DenseTensor3 core;
  std::array<Matrix, 3> factors;

  TuckerTensor3() = default;
  TuckerTensor3(DenseTensor3 c, std::array<Matrix, 3> f) : core(std::move(c)), factors(std::move(f)) {
    for (int m = 0; m < 3; ++m) {
      if (factors[m].cols() != core.dims[m]) {
        throw ShapeError("TuckerTensor3: factor " + std::to_string(m + 1) + " has " +
                         std::to_string(factors[m].cols()) + " columns but core is " +
                         dims_str(core.dims));
      }
    }
  }

  [[nodiscard]] Dims dims() const { return {factors[0].rows(), factors[1].rows(), factors[2].rows()}; }
  [[nodiscard]] MultilinearRank rank() const { return {core.dims[0], core.dims[1], core.dims[2]}; }

  // Rank-(1,1,1) representation of the zero vector with orthonormal factors.
  [[nodiscard]] static TuckerTensor3 zeros(const Dims& n) {
    std::array<Matrix, 3> f;
    for (int m = 0; m < 3; ++m) {
      f[m] = Matrix::Zero(n[m], 1);
      if (n[m] > 0) f[m](0, 0) = 1.0;
    }
    return {DenseTensor3({1, 1, 1}), std::move(f)};
  }

  [[nodiscard]] static TuckerTensor3 rank_one(const Vector& a, const Vector& b, const Vector& c,
                                              double weight = 1.0) {
    DenseTensor3 core({1, 1, 1});
    core.data[0] = weight;
    return {std::move(core), {Matrix(a), Matrix(b), Matrix(c)}};
  }
};

// C = sum_{a,b,c} core(a,b,c) * C3[c] ⊗ C2[b] ⊗ C1[a]. Factors may be
// rectangular (rows: test space, cols: trial space).
struct TuckerOperator3 {
  DenseTensor3 core;
  std::array<std::vector<SpMat>, 3> factors;
  std::array<int, 3> bandwidth{0, 0, 0};

  TuckerOperator3() = default;
  TuckerOperator3(DenseTensor3 c, std::array<std::vector<SpMat>, 3> f) : core(std::move(c)), factors(std::move(f)) {
    for (int m = 0; m < 3; ++m) {
      if (static_cast<Index>(factors[m].size()) != core.dims[m]) {
        throw ShapeError("TuckerOperator3: mode " + std::to_string(m + 1) + " lists " +
                         std::to_string(factors[m].size()) + " matrices but core is " + dims_str(core.dims));
      }
      for (const auto& A : factors[m]) {
        if (A.rows() != factors[m].front().rows() || A.cols() != factors[m].front().cols()) {
          throw ShapeError("TuckerOperator3: factor matrices of one mode must share dimensions");
        }
      }
    }
    update_bandwidth();
  }

  void update_bandwidth() {
    for (int m = 0; m < 3; ++m) {
      int bw = 0;
      for (const auto& A : factors[m]) {
        for (Index i = 0; i < A.outerSize(); ++i) {
          for (SpMat::InnerIterator it(A, i); it; ++it) {
            bw = std::max(bw, static_cast<int>(std::abs(it.row() - it.col())));
          }
        }
      }
      bandwidth[m] = bw;
    }
  }

  [[nodiscard]] MultilinearRank rank() const { return {core.dims[0], core.dims[1], core.dims[2]}; }
  [[nodiscard]] Dims row_dims() const {
    Dims d{0, 0, 0};
    for (int m = 0; m < 3; ++m) d[m] = factors[m].empty() ? 0 : factors[m].front().rows();
    return d;
  }
  [[nodiscard]] Dims col_dims() const {
    Dims d{0, 0, 0};
    for (int m = 0; m < 3; ++m) d[m] = factors[m].empty() ? 0 : factors[m].front().cols();
    return d;
  }
};

[[nodiscard]] inline TuckerTensor3 scaled(const TuckerTensor3& x, double s) {
  TuckerTensor3 y = x;
  y.core.data *= s;
  return y;
}

[[nodiscard]] inline DenseTensor3 to_dense(const TuckerTensor3& x, std::size_t limit = kDenseEntryLimit) {
  const Dims n = x.dims();
  check_guard(static_cast<std::size_t>(n[0]) * n[1] * n[2], limit, "to_dense");
  DenseTensor3 t = x.core;
  for (int m = 0; m < 3; ++m) t = mode_product(t, m, x.factors[m]);
  return t;
}

[[nodiscard]] inline TuckerTensor3 from_dense(const DenseTensor3& X) {
  std::array<Matrix, 3> f;
  for (int m = 0; m < 3; ++m) f[m] = Matrix::Identity(X.dims[m], X.dims[m]);
  return {X, std::move(f)};
}

inline void require_same_dims(const Dims& a, const Dims& b, const char* what) {
  if (a != b) throw ShapeError(std::string(what) + ": dimension mismatch " + dims_str(a) + " vs " + dims_str(b));
}

// Block-diagonal core, concatenated factors.
[[nodiscard]] inline TuckerTensor3 tucker_add(const TuckerTensor3& x, const TuckerTensor3& y) {
  require_same_dims(x.dims(), y.dims(), "tucker_add");
  const MultilinearRank rx = x.rank(), ry = y.rank();
  DenseTensor3 core({rx.r1 + ry.r1, rx.r2 + ry.r2, rx.r3 + ry.r3});
  for (Index k = 0; k < rx.r3; ++k)
    for (Index j = 0; j < rx.r2; ++j)
      for (Index i = 0; i < rx.r1; ++i) core(i, j, k) = x.core(i, j, k);
  for (Index k = 0; k < ry.r3; ++k)
    for (Index j = 0; j < ry.r2; ++j)
      for (Index i = 0; i < ry.r1; ++i) core(rx.r1 + i, rx.r2 + j, rx.r3 + k) = y.core(i, j, k);
  std::array<Matrix, 3> f;
  for (int m = 0; m < 3; ++m) {
    f[m].resize(x.factors[m].rows(), x.factors[m].cols() + y.factors[m].cols());
    f[m] << x.factors[m], y.factors[m];
  }
  return {std::move(core), std::move(f)};
}

// <x, y> through the factor Gram matrices; never forms a full tensor.
[[nodiscard]] inline double tucker_inner(const TuckerTensor3& x, const TuckerTensor3& y) {
  require_same_dims(x.dims(), y.dims(), "tucker_inner");
  DenseTensor3 t = y.core;
  for (int m = 0; m < 3; ++m) t = mode_product(t, m, x.factors[m].transpose() * y.factors[m]);
  return x.core.data.dot(t.data);
}

[[nodiscard]] inline double tucker_norm(const TuckerTensor3& x) {
  return std::sqrt(std::max(0.0, tucker_inner(x, x)));
}

// Cx with core c ⊗ x and factors [C_{m,1}X_m, ..., C_{m,R_m}X_m].
[[nodiscard]] inline TuckerTensor3 tucker_matvec(const TuckerOperator3& C, const TuckerTensor3& x) {
  require_same_dims(C.col_dims(), x.dims(), "tucker_matvec");
  const MultilinearRank R = C.rank(), r = x.rank();
  const Dims out_n = C.row_dims();
  std::array<Matrix, 3> f;
  for (int m = 0; m < 3; ++m) {
    f[m].resize(out_n[m], R[m] * r[m]);
    for (Index a = 0; a < R[m]; ++a) f[m].middleCols(a * r[m], r[m]) = C.factors[m][a] * x.factors[m];
  }
  DenseTensor3 core({R.r1 * r.r1, R.r2 * r.r2, R.r3 * r.r3});
  for (Index c = 0; c < R.r3; ++c)
    for (Index b = 0; b < R.r2; ++b)
      for (Index a = 0; a < R.r1; ++a) {
        const double w = C.core(a, b, c);
        if (w == 0.0) continue;
        for (Index k = 0; k < r.r3; ++k)
          for (Index j = 0; j < r.r2; ++j)
            for (Index i = 0; i < r.r1; ++i)
              core(a * r.r1 + i, b * r.r2 + j, c * r.r3 + k) = w * x.core(i, j, k);
      }
  return {std::move(core), std::move(f)};
}

namespace detail {

// Leading left singular vectors of the mode-m unfolding and their singular values.
inline void unfolding_svd(const DenseTensor3& X, int m, Matrix& U, Vector& sigma) {
  Matrix T = unfolding_transposed(X, m);
  if (T.rows() >= T.cols()) {
    Eigen::HouseholderQR<Matrix> qr(T);
    Matrix R = qr.matrixQR().topRows(T.cols()).triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Matrix> svd(R, Eigen::ComputeFullV);
    U = svd.matrixV();
    sigma = svd.singularValues();
  } else {
    Eigen::BDCSVD<Matrix> svd(T, Eigen::ComputeThinV);
    U = svd.matrixV();
    sigma = svd.singularValues();
  }
}

// Smallest rank whose discarded tail fits the squared budget; ties keep the value.
inline Index budget_rank(const Vector& sigma, double budget2) {
  Index r = sigma.size();
  double tail = 0.0;
  while (r > 1) {
    const double next = tail + sigma[r - 1] * sigma[r - 1];
    if (next > budget2) break;
    tail = next;
    --r;
  }
  return r;
}

}  // namespace detail

// Sequentially truncated HOSVD in mode order 1,2,3 with budget eps*||X||/sqrt(3) per mode.
[[nodiscard]] inline TuckerTensor3 sthosvd(const DenseTensor3& X, double eps) {
  if (eps < 0.0) throw std::invalid_argument("sthosvd: tolerance must be non-negative");
  const double nrm = X.norm();
  if (nrm == 0.0 || X.size() == 0) return TuckerTensor3::zeros(X.dims);
  const double budget2 = eps * eps * nrm * nrm / 3.0;
  DenseTensor3 cur = X;
  std::array<Matrix, 3> f;
  for (int m = 0; m < 3; ++m) {
    Matrix U;
    Vector sigma;
    detail::unfolding_svd(cur, m, U, sigma);
    const Index r = std::max<Index>(1, std::min<Index>(detail::budget_rank(sigma, budget2), U.cols()));
    f[m] = U.leftCols(r);
    cur = mode_product(cur, m, f[m].transpose());
  }
  return {std::move(cur), std::move(f)};
}

}  // namespace lriga
