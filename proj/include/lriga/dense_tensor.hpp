// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/common.hpp"

namespace lriga {

// Third-order tensor stored colexicographically: entry (i,j,k) lives at
// i + n1*(j + n2*k), which is exactly vec() of the tensor.
struct DenseTensor3 {
  Dims dims{0, 0, 0};
  Vector data;

  DenseTensor3() = default;
  explicit DenseTensor3(const Dims& d) : dims(d), data(Vector::Zero(d[0] * d[1] * d[2])) {
    for (Index n : d) {
      if (n < 0) throw ShapeError("DenseTensor3: negative dimension");
    }
  }
  DenseTensor3(const Dims& d, Vector v) : dims(d), data(std::move(v)) {
    if (data.size() != d[0] * d[1] * d[2]) {
      throw ShapeError("DenseTensor3: payload size does not match " + dims_str(d));
    }
  }

  [[nodiscard]] Index size() const { return data.size(); }
  [[nodiscard]] double& operator()(Index i, Index j, Index k) {
    return data[i + dims[0] * (j + dims[1] * k)];
  }
  [[nodiscard]] double operator()(Index i, Index j, Index k) const {
    return data[i + dims[0] * (j + dims[1] * k)];
  }
  [[nodiscard]] double norm() const { return data.norm(); }
};

// X ×_m J, with m zero-based.
[[nodiscard]] inline DenseTensor3 mode_product(const DenseTensor3& X, int m, const Matrix& J) {
  if (m < 0 || m > 2) throw ShapeError("mode_product: mode must be 0, 1 or 2");
  if (J.cols() != X.dims[m]) {
    throw ShapeError("mode_product: matrix has " + std::to_string(J.cols()) +
                     " columns, tensor mode " + std::to_string(m + 1) + " has extent " +
                     std::to_string(X.dims[m]) + " in " + dims_str(X.dims));
  }
  const auto [n1, n2, n3] = X.dims;
  Dims out_dims = X.dims;
  out_dims[m] = J.rows();
  DenseTensor3 Y(out_dims);
  if (Y.size() == 0 || X.size() == 0) return Y;
  if (m == 0) {
    Eigen::Map<const Matrix> x(X.data.data(), n1, n2 * n3);
    Eigen::Map<Matrix> y(Y.data.data(), J.rows(), n2 * n3);
    y.noalias() = J * x;
  } else if (m == 2) {
    Eigen::Map<const Matrix> x(X.data.data(), n1 * n2, n3);
    Eigen::Map<Matrix> y(Y.data.data(), n1 * n2, J.rows());
    y.noalias() = x * J.transpose();
  } else {
    const Index l = J.rows();
    for (Index k = 0; k < n3; ++k) {
      Eigen::Map<const Matrix> x(X.data.data() + k * n1 * n2, n1, n2);
      Eigen::Map<Matrix> y(Y.data.data() + k * n1 * l, n1, l);
      y.noalias() = x * J.transpose();
    }
  }
  return Y;
}

// Transpose of the mode-m unfolding: rows run over the remaining two indices
// (lower mode fastest), columns over mode m.
[[nodiscard]] inline Matrix unfolding_transposed(const DenseTensor3& X, int m) {
  const auto [n1, n2, n3] = X.dims;
  if (m == 0) {
    return Eigen::Map<const Matrix>(X.data.data(), n1, n2 * n3).transpose();
  }
  if (m == 2) {
    return Eigen::Map<const Matrix>(X.data.data(), n1 * n2, n3);
  }
  Matrix out(n1 * n3, n2);
  for (Index k = 0; k < n3; ++k) {
    out.middleRows(k * n1, n1) = Eigen::Map<const Matrix>(X.data.data() + k * n1 * n2, n1, n2);
  }
  return out;
}

// Dense Kronecker product A ⊗ B.
[[nodiscard]] inline Matrix kron(const Matrix& A, const Matrix& B) {
  Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
  for (Index i = 0; i < A.rows(); ++i) {
    for (Index j = 0; j < A.cols(); ++j) {
      K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    }
  }
  return K;
}

}  // namespace lriga
