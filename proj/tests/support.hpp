// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/experiments.hpp"
#include "lriga/reference.hpp"

#include <random>

namespace lriga::testing {

inline Matrix random_matrix(std::mt19937& rng, Index r, Index c) {
  std::normal_distribution<double> d;
  Matrix A(r, c);
  for (Index j = 0; j < c; ++j)
    for (Index i = 0; i < r; ++i) A(i, j) = d(rng);
  return A;
}

inline DenseTensor3 random_dense(std::mt19937& rng, const Dims& n) {
  std::normal_distribution<double> d;
  DenseTensor3 X(n);
  for (Index i = 0; i < X.size(); ++i) X.data[i] = d(rng);
  return X;
}

inline TuckerTensor3 random_tucker(std::mt19937& rng, const Dims& n, const Dims& r) {
  return {random_dense(rng, r), {random_matrix(rng, n[0], r[0]), random_matrix(rng, n[1], r[1]), random_matrix(rng, n[2], r[2])}};
}

// Tucker tensor with geometrically decaying core so truncation has work to do.
inline TuckerTensor3 decaying_tucker(std::mt19937& rng, const Dims& n, const Dims& r) {
  TuckerTensor3 x = random_tucker(rng, n, r);
  for (Index k = 0; k < r[2]; ++k)
    for (Index j = 0; j < r[1]; ++j)
      for (Index i = 0; i < r[0]; ++i) x.core(i, j, k) *= std::pow(0.3, static_cast<double>(i + j + k));
  return x;
}

inline SpMat random_sparse(std::mt19937& rng, Index r, Index c) {
  return random_matrix(rng, r, c).sparseView();
}

inline TuckerOperator3 random_operator(std::mt19937& rng, const Dims& rows, const Dims& cols, const Dims& R) {
  std::array<std::vector<SpMat>, 3> f;
  for (int m = 0; m < 3; ++m)
    for (Index a = 0; a < R[m]; ++a) f[m].push_back(random_sparse(rng, rows[m], cols[m]));
  return {random_dense(rng, R), std::move(f)};
}

inline double rel_diff(const Vector& a, const Vector& b) { return (a - b).norm() / std::max(b.norm(), 1e-300); }

inline Spaces dirichlet_spaces(int p, int n_el) {
  const SplineSpace1D S(p, n_el);
  return {S, S, S};
}

}  // namespace lriga::testing
