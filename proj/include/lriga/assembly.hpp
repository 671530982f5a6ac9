// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/bspline.hpp"
#include "lriga/chebyshev.hpp"
#include "lriga/geometry.hpp"
#include "lriga/truncation.hpp"

#include <algorithm>

namespace lriga {

using Spaces = std::array<SplineSpace1D, 3>;

[[nodiscard]] inline Dims space_dims(const Spaces& S) { return {S[0].dim(), S[1].dim(), S[2].dim()}; }

[[nodiscard]] inline Spaces full_spaces(const Spaces& S) { return {S[0].full(), S[1].full(), S[2].full()}; }

// One separable coefficient g multiplying d/d eta_{row_dir} on the test (row)
// function and d/d eta_{col_dir} on the trial (column) function; -1 means no derivative.
struct CoefficientTerm {
  int row_dir = -1;
  int col_dir = -1;
  const SeparableFunction3* g = nullptr;
};

// Tucker operator with one diagonal core block per nonzero coefficient term.
[[nodiscard]] inline TuckerOperator3 build_operator(const Spaces& rows, const Spaces& cols,
                                                    const std::vector<CoefficientTerm>& terms) {
  MultilinearRank total;
  for (const auto& t : terms) {
    const MultilinearRank r = t.g->rank();
    total.r1 += r.r1;
    total.r2 += r.r2;
    total.r3 += r.r3;
  }
  DenseTensor3 core({total.r1, total.r2, total.r3});
  std::array<std::vector<SpMat>, 3> factors;
  Dims off{0, 0, 0};
  for (const auto& t : terms) {
    if (t.g->zero) continue;
    const TuckerTensor3& c = t.g->coef;
    for (int m = 0; m < 3; ++m) {
      for (Index r = 0; r < c.core.dims[m]; ++r) {
        factors[m].push_back(assemble_weighted_matrix(rows[m], cols[m], t.row_dir == m ? 1 : 0,
                                                      t.col_dir == m ? 1 : 0, t.g->univariate(m, r)));
      }
    }
    for (Index k = 0; k < c.core.dims[2]; ++k)
      for (Index j = 0; j < c.core.dims[1]; ++j)
        for (Index i = 0; i < c.core.dims[0]; ++i) core(off[0] + i, off[1] + j, off[2] + k) = c.core(i, j, k);
    for (int m = 0; m < 3; ++m) off[m] += c.core.dims[m];
  }
  return TuckerOperator3(std::move(core), std::move(factors));
}

[[nodiscard]] inline TuckerTensor3 build_rhs(const Spaces& S, const SeparableFunction3& w) {
  if (w.zero) return TuckerTensor3::zeros(space_dims(S));
  std::array<Matrix, 3> f;
  for (int m = 0; m < 3; ++m) {
    const Index R = w.coef.core.dims[m];
    f[m].resize(S[m].dim(), R);
    for (Index r = 0; r < R; ++r) f[m].col(r) = assemble_weighted_rhs(S[m], w.univariate(m, r));
  }
  return {w.coef.core, std::move(f)};
}

struct AssembledSystem {
  Spaces spaces;
  TuckerOperator3 A;
  TuckerTensor3 f;
  // Approximated metric entries indexed [k][l] (symmetric, shared storage) and load weight.
  std::array<std::array<std::shared_ptr<const SeparableFunction3>, 3>, 3> Q;
  SeparableFunction3 omega;
  std::array<std::array<MultilinearRank, 3>, 3> block_ranks{};
  MultilinearRank aggregate;
  double eps = 0.0;
};

[[nodiscard]] inline double assembly_tolerance(double tol) { return std::max(tol * 0.1, 1e-12); }

inline constexpr std::array<std::array<int, 2>, 6> kSymmetricPairs{{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};

[[nodiscard]] inline std::vector<CoefficientTerm> poisson_terms(const AssembledSystem& sys) {
  std::vector<CoefficientTerm> terms;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) terms.push_back({l, k, sys.Q[k][l].get()});
  return terms;
}

// Tucker operator and right-hand side of the pulled-back Poisson problem. Six
// metric entries are approximated (Q is symmetric); the operator core holds all
// nine (k,l) blocks on its diagonal.
[[nodiscard]] inline AssembledSystem assemble_system(const Spaces& S, const GeometryMap& G, const PointFunction& load,
                                                     double eps, const ChebyshevOptions& opt = {}) {
  AssembledSystem sys;
  sys.spaces = S;
  sys.eps = eps;
  auto qfun = [&G](const Vec3& e) {
    const Mat3 Q = metric_and_weight(G, e, nullptr).Q;
    Vector v(6);
    for (int s = 0; s < 6; ++s) v[s] = Q(kSymmetricPairs[s][0], kSymmetricPairs[s][1]);
    return v;
  };
  auto q = approximate_functions(qfun, 6, eps, eps, opt);
  for (int s = 0; s < 6; ++s) {
    auto ptr = std::make_shared<const SeparableFunction3>(std::move(q[s]));
    const auto [k, l] = kSymmetricPairs[s];
    sys.Q[k][l] = ptr;
    sys.Q[l][k] = ptr;
  }
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      sys.block_ranks[k][l] = sys.Q[k][l]->rank();
      sys.aggregate.r1 += sys.block_ranks[k][l].r1;
      sys.aggregate.r2 += sys.block_ranks[k][l].r2;
      sys.aggregate.r3 += sys.block_ranks[k][l].r3;
    }
  sys.A = build_operator(S, S, poisson_terms(sys));
  sys.omega = approximate_function([&G, &load](const Vec3& e) { return metric_and_weight(G, e, load).omega; }, eps, opt);
  sys.f = build_rhs(S, sys.omega);
  return sys;
}

struct DirichletFace {
  int dir = 2;   // parametric direction 0..2
  int side = 1;  // 0: eta_dir = 0, 1: eta_dir = 1
  double value = 0.0;
};

// Degrees of freedom of constant boundary data on the full (unconstrained)
// basis: one rank-one term per face; a face skips dofs already owned by an
// earlier face.
[[nodiscard]] inline TuckerTensor3 dirichlet_data(const Spaces& S, const std::vector<DirichletFace>& faces) {
  const Spaces full = full_spaces(S);
  const Dims n = space_dims(full);
  TuckerSum g(n);
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& face = faces[f];
    if (face.value == 0.0) continue;
    std::array<Vector, 3> v;
    for (int m = 0; m < 3; ++m) {
      if (m == face.dir) {
        v[m] = Vector::Zero(n[m]);
        v[m][face.side == 0 ? 0 : n[m] - 1] = 1.0;
      } else {
        v[m] = Vector::Ones(n[m]);
        for (std::size_t e = 0; e < f; ++e)
          if (faces[e].dir == m) v[m][faces[e].side == 0 ? 0 : n[m] - 1] = 0.0;
      }
    }
    g.add(share(TuckerTensor3::rank_one(v[0], v[1], v[2], face.value)));
  }
  return materialize(g);
}

// f - A_boundary g, where A_boundary maps full-basis dofs to free test functions.
[[nodiscard]] inline TuckerTensor3 dirichlet_lift(const TuckerTensor3& f, const TuckerOperator3& A_boundary,
                                                  const TuckerTensor3& g, double eps = 1e-14) {
  TuckerSum s = as_sum(share(f));
  s.add(apply_operator(A_boundary, share(g)), -1.0);
  return truncate_rel(s, eps);
}

}  // namespace lriga
