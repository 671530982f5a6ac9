// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/tucker_sum.hpp"

#include <cmath>

namespace lriga {

// y = Z ×3 Q3 ×2 Q2 ×1 Q1 with orthonormal Q_i: Q_i R_i is the QR of the
// concatenated distinct factors of mode i and Z collects the terms through R_i.
struct ProjectedSum {
  std::array<Matrix, 3> Q;
  DenseTensor3 Z;
};

[[nodiscard]] inline ProjectedSum project_sum(const TuckerSum& y) {
  std::array<Matrix, 3> Q, R;
  std::array<std::vector<Index>, 3> offset;  // per term, column offset into the concatenation
  for (int m = 0; m < 3; ++m) {
    std::map<const Matrix*, Index> pos;
    std::vector<const Matrix*> uniq;
    Index cols = 0;
    offset[m].reserve(y.terms.size());
    for (const auto& t : y.terms) {
      const Matrix* f = t.factors[m].get();
      auto it = pos.find(f);
      if (it == pos.end()) {
        it = pos.emplace(f, cols).first;
        uniq.push_back(f);
        cols += f->cols();
      }
      offset[m].push_back(it->second);
    }
    const Index n = y.dims[m];
    Matrix F(n, cols);
    for (const Matrix* f : uniq) F.middleCols(pos[f], f->cols()) = *f;
    const Index k = std::min(n, cols);
    Eigen::HouseholderQR<Matrix> qr(F);
    Q[m] = qr.householderQ() * Matrix::Identity(n, k);
    R[m] = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  }

  // Terms that agree in core and first two factors are merged through their
  // (weighted) third-mode blocks; the mode-1 product is shared per (core, factor 1).
  using Key2 = std::pair<const DenseTensor3*, const Matrix*>;
  using Key3 = std::tuple<const DenseTensor3*, const Matrix*, const Matrix*>;
  std::map<Key3, std::pair<std::size_t, Matrix>> groups;
  std::vector<Key3> order;
  for (std::size_t s = 0; s < y.terms.size(); ++s) {
    const auto& t = y.terms[s];
    const Key3 key{t.core.get(), t.factors[0].get(), t.factors[1].get()};
    const Matrix blk = t.weight * R[2].middleCols(offset[2][s], t.core->dims[2]);
    auto it = groups.find(key);
    if (it == groups.end()) {
      groups.emplace(key, std::make_pair(s, blk));
      order.push_back(key);
    } else {
      it->second.second += blk;
    }
  }
  std::map<Key2, DenseTensor3> first;
  DenseTensor3 Z({Q[0].cols(), Q[1].cols(), Q[2].cols()});
  for (const auto& key : order) {
    const auto& [s, blk3] = groups.at(key);
    const auto& t = y.terms[s];
    const Key2 k2{t.core.get(), t.factors[0].get()};
    auto it = first.find(k2);
    if (it == first.end()) it = first.emplace(k2, mode_product(*t.core, 0, R[0].middleCols(offset[0][s], t.core->dims[0]))).first;
    DenseTensor3 z = mode_product(it->second, 1, R[1].middleCols(offset[1][s], t.core->dims[1]));
    Z.data += mode_product(z, 2, blk3).data;
  }
  return {std::move(Q), std::move(Z)};
}

// ||y||_2 without truncation.
[[nodiscard]] inline double norm(const TuckerSum& y) {
  if (y.terms.empty()) return 0.0;
  return project_sum(y).Z.norm();
}

// ST-HOSVD of the projected core at relative tolerance eps, factors Q_i S_i.
[[nodiscard]] inline TuckerTensor3 truncate_rel(const TuckerSum& y, double eps) {
  if (eps < 0.0) throw std::invalid_argument("truncate_rel: tolerance must be non-negative");
  if (y.terms.empty()) return TuckerTensor3::zeros(y.dims);
  auto [Q, Z] = project_sum(y);
  TuckerTensor3 small = sthosvd(Z, eps);
  for (int m = 0; m < 3; ++m) small.factors[m] = Q[m] * small.factors[m];
  return small;
}

[[nodiscard]] inline TuckerTensor3 truncate_rel(const TuckerTensor3& y, double eps) {
  TuckerSum s(y.dims());
  s.add(std::make_shared<const TuckerTensor3>(y));
  return truncate_rel(s, eps);
}

struct DynamicTruncation {
  std::vector<TuckerTensor3> y;  // one entry per component
  double eps = 0.0;
  int passes = 0;
  double ratio = 1.0;  // last update ratio v_k
};

// Dynamic truncation of a proposed iterate y_next relative to the current y_k,
// componentwise at one shared tolerance with the update ratio taken over all
// components. The tolerance is reduced by alpha until |v_k - 1| <= delta or
// the next reduction would fall to eps_min or below.
[[nodiscard]] inline DynamicTruncation truncate_dynamic(const std::vector<TuckerPtr>& y_k,
                                                        const std::vector<TuckerSum>& y_next, double eps, double alpha,
                                                        double eps_min, double delta) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("truncate_dynamic: alpha must lie in (0,1)");
  if (!(eps_min > 0.0) || eps < eps_min) throw std::invalid_argument("truncate_dynamic: need eps >= eps_min > 0");
  if (!(delta > 0.0)) throw std::invalid_argument("truncate_dynamic: delta must be positive");
  if (y_k.size() != y_next.size()) throw ShapeError("truncate_dynamic: component count mismatch");
  const std::size_t K = y_k.size();

  std::vector<TuckerSum> proposed(K);
  double step2 = 0.0;
  bool empty = true;
  for (std::size_t c = 0; c < K; ++c) {
    proposed[c] = y_next[c];
    proposed[c].add(y_k[c], -1.0);
    proposed[c].simplify();
    if (!proposed[c].terms.empty()) {
      empty = false;
      step2 += inner(proposed[c], proposed[c]);
    }
  }
  DynamicTruncation out;
  out.eps = eps;
  if (empty || step2 <= 0.0) {
    for (const auto& y : y_k) out.y.push_back(*y);
    return out;
  }
  for (;;) {
    out.y.clear();
    double cross = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
      out.y.push_back(truncate_rel(y_next[c], out.eps));
      TuckerSum actual = as_sum(std::make_shared<const TuckerTensor3>(out.y.back()));
      actual.add(y_k[c], -1.0);
      if (!proposed[c].terms.empty()) cross += inner(proposed[c], actual);
    }
    ++out.passes;
    out.ratio = cross / step2;
    if (std::abs(out.ratio - 1.0) <= delta) break;
    if (alpha * out.eps > eps_min) {
      out.eps *= alpha;
    } else {
      break;
    }
  }
  return out;
}

[[nodiscard]] inline DynamicTruncation truncate_dynamic(const TuckerPtr& y_k, const TuckerSum& y_next, double eps,
                                                        double alpha, double eps_min, double delta) {
  return truncate_dynamic(std::vector<TuckerPtr>{y_k}, std::vector<TuckerSum>{y_next}, eps, alpha, eps_min, delta);
}

}  // namespace lriga
