// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/assembly.hpp"
#include "lriga/tpcg.hpp"

namespace lriga {

struct Lame {
  double lambda = 0.3 / 0.52;
  double mu = 1.0 / 2.6;
};

// A 3x3 grid of Tucker operators acting on three displacement components.
// Blocks with no nonzero coefficient are flagged and skipped.
struct BlockTuckerOperator {
  std::array<std::array<TuckerOperator3, 3>, 3> A;
  std::array<std::array<bool, 3>, 3> nonzero{};
  Dims dims{0, 0, 0};
};

using BlockTuckerVector = std::array<TuckerTensor3, 3>;

[[nodiscard]] inline TuckerVec to_vec(const BlockTuckerVector& x) {
  return {share(x[0]), share(x[1]), share(x[2])};
}

[[nodiscard]] inline BlockTuckerVector from_vec(const TuckerVec& x) {
  if (x.size() != 3) throw ShapeError("from_vec: expected three components");
  return {*x[0], *x[1], *x[2]};
}

[[nodiscard]] inline SumVec apply_block(const BlockTuckerOperator& A, const TuckerVec& x) {
  if (x.size() != 3) throw ShapeError("apply_block: expected three components");
  SumVec y(3, TuckerSum(A.dims));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (A.nonzero[i][j]) y[i].add(apply_operator(A.A[i][j], x[j]));
  return y;
}

[[nodiscard]] inline LinearMap block_operator_map(const BlockTuckerOperator& A) {
  return [&A](const TuckerVec& x) { return apply_block(A, x); };
}

[[nodiscard]] inline double block_inner(const BlockTuckerVector& a, const BlockTuckerVector& b) {
  double s = 0.0;
  for (int c = 0; c < 3; ++c) s += tucker_inner(a[c], b[c]);
  return s;
}

// Pulled-back coefficient of block (i,j) (test component i, trial component j)
// multiplying d/d eta_k of the test function and d/d eta_l of the trial one:
// |det J| [ mu delta_ij (G G^T)_lk + mu G_li G_kj + lambda G_lj G_ki ], G = J^{-1}.
[[nodiscard]] inline double elasticity_coefficient(const Mat3& G, double adet, const Lame& lame, int i, int j, int k,
                                                   int l) {
  const double gg = i == j ? G.row(l).dot(G.row(k)) : 0.0;
  return adet * (lame.mu * gg + lame.mu * G(l, i) * G(k, j) + lame.lambda * G(l, j) * G(k, i));
}

inline constexpr std::array<std::array<int, 2>, 6> kUpperBlocks{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

struct ElasticitySystem {
  Spaces spaces;
  Lame lame;
  BlockTuckerOperator A;
  BlockTuckerVector f;
  // coef[b][3k+l] for upper block b of kUpperBlocks; block (j,i) reuses (i,j) with k and l swapped.
  std::array<std::vector<std::shared_ptr<const SeparableFunction3>>, 6> coef;
  std::array<std::array<MultilinearRank, 3>, 3> block_ranks{};
  double eps = 0.0;
};

// Spaces of the column test: natural conditions in x and y, essential in z.
[[nodiscard]] inline Spaces elasticity_spaces(int p, int n_el) {
  return {SplineSpace1D(p, n_el, Bc::neumann, Bc::neumann), SplineSpace1D(p, n_el, Bc::neumann, Bc::neumann),
          SplineSpace1D(p, n_el, Bc::dirichlet, Bc::dirichlet)};
}

namespace detail {

inline std::vector<CoefficientTerm> block_terms(const ElasticitySystem& sys, int i, int j) {
  const bool upper = i <= j;
  const int a = upper ? i : j, b = upper ? j : i;
  int idx = 0;
  while (kUpperBlocks[idx][0] != a || kUpperBlocks[idx][1] != b) ++idx;
  std::vector<CoefficientTerm> terms;
  for (int k = 0; k < 3; ++k)
    for (int l = 0; l < 3; ++l) {
      const auto& g = upper ? sys.coef[idx][3 * k + l] : sys.coef[idx][3 * l + k];
      if (!g->zero) terms.push_back({k, l, g.get()});
    }
  return terms;
}

}  // namespace detail

// Block operator and load of the pulled-back elasticity problem with load
// vector `load` (physical coordinates) and constant Dirichlet data `faces[c]`
// on component c, lifted through the full-basis boundary blocks.
[[nodiscard]] inline ElasticitySystem assemble_elasticity(
    const Spaces& S, const GeometryMap& G, const std::array<PointFunction, 3>& load, const Lame& lame, double eps,
    const std::array<std::vector<DirichletFace>, 3>& faces = {}, const ChebyshevOptions& opt = {}) {
  if (!(lame.lambda >= 0.0 && lame.mu > 0.0)) throw SetupError("assemble_elasticity: need mu > 0 and lambda >= 0");
  ElasticitySystem sys;
  sys.spaces = S;
  sys.lame = lame;
  sys.eps = eps;
  auto cfun = [&G, &lame](const Vec3& e) {
    const Mat3 J = G.J(e);
    const double det = J.determinant();
    if (!(std::abs(det) > 1e-14) || !std::isfinite(det)) throw GeometryError("geometry '" + G.name + "': singular Jacobian");
    const Mat3 Gi = J.inverse();
    Vector v(54);
    for (int b = 0; b < 6; ++b)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l)
          v[9 * b + 3 * k + l] = elasticity_coefficient(Gi, std::abs(det), lame, kUpperBlocks[b][0], kUpperBlocks[b][1], k, l);
    return v;
  };
  auto c = approximate_functions(cfun, 54, eps, eps, opt);
  for (int b = 0; b < 6; ++b)
    for (int s = 0; s < 9; ++s) sys.coef[b].push_back(std::make_shared<const SeparableFunction3>(std::move(c[9 * b + s])));

  sys.A.dims = space_dims(S);
  const Spaces full = full_spaces(S);
  std::array<TuckerTensor3, 3> g;
  std::array<bool, 3> lifted{};
  for (int j = 0; j < 3; ++j) {
    for (const auto& face : faces[j]) lifted[j] = lifted[j] || face.value != 0.0;
    if (lifted[j]) g[j] = dirichlet_data(S, faces[j]);
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const auto terms = detail::block_terms(sys, i, j);
      MultilinearRank r{0, 0, 0};
      for (const auto& t : terms) {
        const MultilinearRank q = t.g->rank();
        r.r1 += q.r1;
        r.r2 += q.r2;
        r.r3 += q.r3;
      }
      sys.block_ranks[i][j] = r;
      sys.A.nonzero[i][j] = !terms.empty();
      if (!terms.empty()) sys.A.A[i][j] = build_operator(S, S, terms);
    }
    auto w = approximate_function(
        [&G, &load, i](const Vec3& e) {
          if (!load[i]) return 0.0;
          const Mat3 J = G.J(e);
          return std::abs(J.determinant()) * load[i](G.F(e));
        },
        eps, opt);
    TuckerTensor3 fi = build_rhs(S, w);
    TuckerSum s = as_sum(share(std::move(fi)));
    for (int j = 0; j < 3; ++j) {
      if (!lifted[j]) continue;
      const auto terms = detail::block_terms(sys, i, j);
      if (terms.empty()) continue;
      const TuckerOperator3 Ab = build_operator(S, full, terms);
      s.add(apply_operator(Ab, share(g[j])), -1.0);
    }
    sys.f[i] = truncate_rel(s, 1e-14);
  }
  return sys;
}

// Block-diagonal preconditioner: component a uses the parametric diagonal block
// mu grad.grad + (mu + lambda) d_a d_a, i.e. direction weights mu + (mu + lambda) delta_ac.
struct BlockPreconditioner {
  std::array<LowRankFD, 3> P;
  [[nodiscard]] SumVec apply(const TuckerVec& x) const {
    if (x.size() != 3) throw ShapeError("BlockPreconditioner: expected three components");
    return {P[0].apply_sum(x[0]), P[1].apply_sum(x[1]), P[2].apply_sum(x[2])};
  }
};

[[nodiscard]] inline std::array<double, 3> elasticity_weights(const Lame& lame, int a) {
  std::array<double, 3> w;
  for (int c = 0; c < 3; ++c) w[c] = lame.mu + (c == a ? lame.mu + lame.lambda : 0.0);
  return w;
}

[[nodiscard]] inline BlockPreconditioner block_preconditioner(const Spaces& S, const Lame& lame, double eps_prec,
                                                              const EigenOptions& opt = {}, int max_rank = 128) {
  const auto eig = eigens_for(S, opt);
  BlockPreconditioner B;
  for (int a = 0; a < 3; ++a) B.P[a] = build_lowrank_fd(eig, eps_prec, elasticity_weights(lame, a), max_rank);
  return B;
}

[[nodiscard]] inline LinearMap preconditioner_map(const BlockPreconditioner& B) {
  return [&B](const TuckerVec& x) { return B.apply(x); };
}

[[nodiscard]] inline std::pair<BlockTuckerVector, SolveReport> block_tpcg(const BlockTuckerOperator& A,
                                                                         const BlockTuckerVector& f,
                                                                         const LinearMap& P, const TpcgConfig& cfg) {
  auto [x, rep] = tpcg(block_operator_map(A), to_vec(f), P, cfg);
  return {from_vec(x), rep};
}

// Column test data: load (0,0,-1), u = 0 on z = 0 and u = (0,0,-0.5) on z = 1.
[[nodiscard]] inline std::array<PointFunction, 3> column_load() {
  return {PointFunction{}, PointFunction{}, [](const Vec3&) { return -1.0; }};
}

[[nodiscard]] inline std::array<std::vector<DirichletFace>, 3> column_dirichlet() {
  return {std::vector<DirichletFace>{}, std::vector<DirichletFace>{}, std::vector<DirichletFace>{{2, 1, -0.5}}};
}

}  // namespace lriga
