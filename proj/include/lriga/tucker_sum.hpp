// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/tucker.hpp"

#include <map>
#include <memory>
#include <tuple>
#include <utility>

namespace lriga {

using TuckerPtr = std::shared_ptr<const TuckerTensor3>;

[[nodiscard]] inline TuckerPtr share(TuckerTensor3 x) { return std::make_shared<const TuckerTensor3>(std::move(x)); }

// One weighted Tucker term whose pieces may be shared with other terms.
struct TuckerTerm {
  double weight = 1.0;
  std::shared_ptr<const DenseTensor3> core;
  std::array<std::shared_ptr<const Matrix>, 3> factors;
};

// Unevaluated linear combination of Tucker tensors. Materializing it gives the
// block-diagonal Tucker tensor of the usual sum/matvec formulas; the truncation
// below works on the terms directly so those large cores are never formed.
struct TuckerSum {
  Dims dims{0, 0, 0};
  std::vector<TuckerTerm> terms;

  TuckerSum() = default;
  explicit TuckerSum(const Dims& d) : dims(d) {}

  void add(const TuckerPtr& x, double w = 1.0) {
    if (terms.empty() && dims == Dims{0, 0, 0}) dims = x->dims();
    require_same_dims(dims, x->dims(), "TuckerSum::add");
    TuckerTerm t;
    t.weight = w;
    t.core = std::shared_ptr<const DenseTensor3>(x, &x->core);
    for (int m = 0; m < 3; ++m) t.factors[m] = std::shared_ptr<const Matrix>(x, &x->factors[m]);
    terms.push_back(std::move(t));
  }

  void add(const TuckerSum& s, double w = 1.0) {
    if (terms.empty() && dims == Dims{0, 0, 0}) dims = s.dims;
    require_same_dims(dims, s.dims, "TuckerSum::add");
    for (TuckerTerm t : s.terms) {
      t.weight *= w;
      terms.push_back(std::move(t));
    }
  }

  // Merges terms that share every piece and drops terms with zero weight.
  void simplify() {
    using Key = std::tuple<const void*, const void*, const void*, const void*>;
    std::map<Key, std::size_t> seen;
    std::vector<TuckerTerm> out;
    for (auto& t : terms) {
      Key key{t.core.get(), t.factors[0].get(), t.factors[1].get(), t.factors[2].get()};
      auto it = seen.find(key);
      if (it == seen.end()) {
        seen.emplace(key, out.size());
        out.push_back(t);
      } else {
        out[it->second].weight += t.weight;
      }
    }
    std::erase_if(out, [](const TuckerTerm& t) { return t.weight == 0.0; });
    terms = std::move(out);
  }

  [[nodiscard]] MultilinearRank rank() const {
    MultilinearRank r;
    for (const auto& t : terms) {
      r.r1 += t.core->dims[0];
      r.r2 += t.core->dims[1];
      r.r3 += t.core->dims[2];
    }
    return r;
  }
};

[[nodiscard]] inline TuckerSum as_sum(const TuckerPtr& x, double w = 1.0) {
  TuckerSum s(x->dims());
  s.add(x, w);
  return s;
}

// w * C x as a sum with one term per nonzero operator core entry.
[[nodiscard]] inline TuckerSum apply_operator(const TuckerOperator3& C, const TuckerPtr& x, double w = 1.0) {
  require_same_dims(C.col_dims(), x->dims(), "apply_operator");
  TuckerSum s(C.row_dims());
  const MultilinearRank R = C.rank();
  std::array<std::vector<std::shared_ptr<const Matrix>>, 3> prod;
  std::array<std::vector<bool>, 3> used;
  for (int m = 0; m < 3; ++m) {
    prod[m].resize(R[m]);
    used[m].assign(R[m], false);
  }
  for (Index c = 0; c < R.r3; ++c)
    for (Index b = 0; b < R.r2; ++b)
      for (Index a = 0; a < R.r1; ++a)
        if (C.core(a, b, c) != 0.0) used[0][a] = used[1][b] = used[2][c] = true;
  for (int m = 0; m < 3; ++m)
    for (Index a = 0; a < R[m]; ++a)
      if (used[m][a]) prod[m][a] = std::make_shared<const Matrix>(C.factors[m][a] * x->factors[m]);
  auto core = std::shared_ptr<const DenseTensor3>(x, &x->core);
  for (Index c = 0; c < R.r3; ++c)
    for (Index b = 0; b < R.r2; ++b)
      for (Index a = 0; a < R.r1; ++a) {
        const double q = C.core(a, b, c);
        if (q == 0.0) continue;
        s.terms.push_back({w * q, core, {prod[0][a], prod[1][b], prod[2][c]}});
      }
  return s;
}

namespace detail {

inline double term_inner(const TuckerTerm& s, const TuckerTerm& t,
                         std::map<std::pair<const Matrix*, const Matrix*>, Matrix>& grams) {
  DenseTensor3 y = *t.core;
  for (int m = 0; m < 3; ++m) {
    auto key = std::make_pair(s.factors[m].get(), t.factors[m].get());
    auto it = grams.find(key);
    if (it == grams.end()) {
      it = grams.emplace(key, s.factors[m]->transpose() * (*t.factors[m])).first;
    }
    y = mode_product(y, m, it->second);
  }
  return s.weight * t.weight * s.core->data.dot(y.data);
}

}  // namespace detail

[[nodiscard]] inline double inner(const TuckerSum& x, const TuckerSum& y) {
  require_same_dims(x.dims, y.dims, "inner");
  std::map<std::pair<const Matrix*, const Matrix*>, Matrix> grams;
  double acc = 0.0;
  for (const auto& s : x.terms)
    for (const auto& t : y.terms) acc += detail::term_inner(s, t, grams);
  return acc;
}

// Explicit block-diagonal form of the sum.
[[nodiscard]] inline TuckerTensor3 materialize(const TuckerSum& s) {
  if (s.terms.empty()) return TuckerTensor3::zeros(s.dims);
  const MultilinearRank R = s.rank();
  DenseTensor3 core({R.r1, R.r2, R.r3});
  std::array<Matrix, 3> f;
  for (int m = 0; m < 3; ++m) f[m].resize(s.dims[m], R[m]);
  Index o1 = 0, o2 = 0, o3 = 0;
  for (const auto& t : s.terms) {
    const Dims& r = t.core->dims;
    f[0].middleCols(o1, r[0]) = *t.factors[0];
    f[1].middleCols(o2, r[1]) = *t.factors[1];
    f[2].middleCols(o3, r[2]) = *t.factors[2];
    for (Index k = 0; k < r[2]; ++k)
      for (Index j = 0; j < r[1]; ++j)
        for (Index i = 0; i < r[0]; ++i) core(o1 + i, o2 + j, o3 + k) = t.weight * (*t.core)(i, j, k);
    o1 += r[0];
    o2 += r[1];
    o3 += r[2];
  }
  return {std::move(core), std::move(f)};
}

}  // namespace lriga
