// SPDX-License-Identifier: MIT
// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
// Exit status is the number of failures.

#include "../support.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>

using namespace lriga;
using namespace lriga::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Criterion = std::function<Outcome()>;

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

// 1 -------------------------------------------------------------------------
Outcome truncation_contract() {
  std::mt19937 rng(1001);
  std::uniform_int_distribution<Index> dn(1, 16), dr(1, 6);
  int cases = 0, bad = 0;
  double worst = 0.0;
  for (int t = 0; t < 600; ++t) {
    const Dims n{dn(rng), dn(rng), dn(rng)};
    const Dims r{std::min(dr(rng), n[0]), std::min(dr(rng), n[1]), std::min(dr(rng), n[2])};
    const TuckerTensor3 y = t % 2 ? decaying_tucker(rng, n, r) : random_tucker(rng, n, r);
    const Vector ref = to_dense(y).data;
    for (double eps : {1e-1, 1e-3, 1e-6}) {
      const TuckerTensor3 z = truncate_rel(y, eps);
      const double rel = (to_dense(z).data - ref).norm() / ref.norm();
      worst = std::max(worst, rel / eps);
      ++cases;
      if (!(rel <= eps)) ++bad;
    }
  }
  return {bad == 0 && cases >= 1500, fmt("%d tensors x 3 eps, %d violations, max err/eps %.3f", cases / 3, bad, worst)};
}

// 2 -------------------------------------------------------------------------
Outcome algebra_oracles() {
  std::mt19937 rng(1002);
  std::uniform_int_distribution<Index> dn(1, 7), dr(1, 3);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const Dims n{dn(rng), dn(rng), dn(rng)}, m{dn(rng), dn(rng), dn(rng)};
    const TuckerTensor3 x = random_tucker(rng, n, {dr(rng), dr(rng), dr(rng)});
    const TuckerTensor3 y = random_tucker(rng, n, {dr(rng), dr(rng), dr(rng)});
    const TuckerOperator3 C = random_operator(rng, m, n, {dr(rng), dr(rng), dr(rng)});
    const Vector xd = to_dense(x).data, yd = to_dense(y).data;
    worst = std::max(worst, rel_diff(to_dense(tucker_add(x, y)).data, xd + yd));
    worst = std::max(worst, rel_diff(to_dense(tucker_matvec(C, x)).data, dense_kron_operator(C) * xd));
    const double ip = xd.dot(yd);
    worst = std::max(worst, std::abs(tucker_inner(x, y) - ip) / (xd.norm() * yd.norm()));
  }
  return {worst <= 1e-12, fmt("200 instances, max relative deviation %.2e", worst)};
}

// 3 -------------------------------------------------------------------------
Outcome exp_sum_quality() {
  const double eps = 0.1;
  const std::array<double, 2> Ms{1.6e4, 2.6e5};
  const std::array<int, 2> limit{22, 32};
  bool ok = true;
  std::string d;
  for (int c = 0; c < 2; ++c) {
    const double M = Ms[c];
    const ExpSum es = build_exp_sum(1.0, M, eps);
    // Independent sup-error on a denser grid than the builder uses.
    double err = 0.0;
    const int N = 400000;
    for (int i = 0; i <= N; ++i) {
      const double x = std::exp(std::log(M) * i / N);
      err = std::max(err, std::abs(es(x) - 1.0 / x));
    }
    ok = ok && err <= eps / M && es.rank() <= limit[c];
    d += fmt("M=%.1e R=%d err*M/eps=%.3f; ", M, es.rank(), err * M / eps);
  }
  return {ok, d};
}

// 4 -------------------------------------------------------------------------
Outcome spectral_sandwich() {
  const Spaces S = dirichlet_spaces(3, 5);
  if (space_dims(S) != Dims{6, 6, 6}) return {false, "unexpected dimensions"};
  const LowRankFD P = build_lowrank_fd(eigens_for(S), 0.1);
  const Index N = 216;
  // D = (sum of eigenvalues)^{-1}, Dt its exponential-sum approximation.
  Matrix D = Matrix::Zero(N, N), Dt = Matrix::Zero(N, N);
  for (Index k = 0, idx = 0; k < 6; ++k)
    for (Index j = 0; j < 6; ++j)
      for (Index i = 0; i < 6; ++i, ++idx) {
        const double lam = P.eig[0]->lambda[i] + P.eig[1]->lambda[j] + P.eig[2]->lambda[k];
        D(idx, idx) = 1.0 / lam;
        double s = 0.0;
        for (int t = 0; t < P.rank(); ++t) s += P.es.omega[t] * std::exp(-P.es.alpha[t] * lam / P.lambda_min);
        Dt(idx, idx) = s / P.lambda_min;
      }
  const Matrix T = D.inverse() * Dt;
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(T, false).eigenvalues();
  double lo = 1e300, hi = -1e300, im = 0.0;
  for (Index i = 0; i < ev.size(); ++i) {
    lo = std::min(lo, ev[i].real());
    hi = std::max(hi, ev[i].real());
    im = std::max(im, std::abs(ev[i].imag()));
  }
  return {lo >= 0.9 && hi <= 1.1 && im < 1e-12, fmt("eigenvalues in [%.4f, %.4f], R_P=%d", lo, hi, P.rank())};
}

// 5 -------------------------------------------------------------------------
Outcome preconditioner_robustness() {
  int lo = 1 << 30, hi = 0;
  bool all = true;
  std::string d;
  for (int p : {2, 3, 4})
    for (int n_el : {16, 32, 64}) {
      PoissonSetup s;
      s.geometry = quarter_annulus();
      s.load = "manufactured";
      s.p = p;
      s.n_el = n_el;
      s.cfg.tol = 1e-6;
      const PoissonRun r = run_poisson(s);
      all = all && r.report.converged;
      lo = std::min(lo, r.report.iterations);
      hi = std::max(hi, r.report.iterations);
      d += fmt("p%d/%d:%d ", p, n_el, r.report.iterations);
    }
  const double ratio = static_cast<double>(hi) / lo;
  return {all && hi <= 30 && ratio <= 1.5, d + fmt("max/min %.2f", ratio)};
}

// 6 -------------------------------------------------------------------------
Outcome convergence_orders() {
  bool ok = true;
  std::string d;
  for (int p : {2, 3}) {
    const ConvergenceStudy c = convergence_study(quarter_annulus(), p, {3, 4, 5});
    const bool pl2 = std::abs(c.order_l2 - (p + 1)) <= 0.3, ph1 = std::abs(c.order_h1 - p) <= 0.3;
    ok = ok && pl2 && ph1;
    d += fmt("p=%d L2 %.2f (want %d) H1 %.2f (want %d); ", p, c.order_l2, p + 1, c.order_h1, p);
  }
  return {ok, d};
}

// 7 -------------------------------------------------------------------------
Outcome assembly_ranks() {
  const PointFunction one = [](const Vec3&) { return 1.0; };
  const double eps = assembly_tolerance(1e-6);
  const MultilinearRank a = assemble_system(dirichlet_spaces(3, 16), quarter_annulus(), one, eps).aggregate;
  const MultilinearRank s = assemble_system(dirichlet_spaces(3, 16), spherical_shell(), one, eps).aggregate;
  const bool ok = a == MultilinearRank{3, 3, 3} && std::abs(s.r1 - 13) <= 2 && std::abs(s.r2 - 13) <= 2 &&
                  std::abs(s.r3 - 9) <= 2;
  return {ok, fmt("annulus (%d,%d,%d) shell (%d,%d,%d)", int(a.r1), int(a.r2), int(a.r3), int(s.r1), int(s.r2),
                  int(s.r3))};
}

// 8 -------------------------------------------------------------------------
Outcome end_to_end() {
  bool ok = true;
  double worst = 0.0;
  int runs = 0;
  for (const std::string name : {"cube", "quarter_annulus", "shell", "column"})
    for (auto [p, n_el] : {std::pair{2, 4}, std::pair{3, 5}}) {
      const Spaces S = dirichlet_spaces(p, n_el);
      const AssembledSystem sys = assemble_system(S, geometry_by_name(name), manufactured::f, 1e-10);
      const LowRankFD P = build_lowrank_fd(eigens_for(S), 0.1);
      TpcgConfig cfg;
      cfg.tol = 1e-6;
      const auto [x, rep] = tpcg(sys.A, sys.f, preconditioner_map(P), cfg);
      const Matrix A = dense_kron_operator(sys.A);
      const Vector e = dense_vector(x) - dense_solve(A, dense_vector(sys.f));
      const double bound = (1 + cfg.beta) * rep.tol_abs / std::sqrt(dense_min_eigenvalue(A));
      const double en = std::sqrt(e.dot(A * e));
      worst = std::max(worst, en / bound);
      ok = ok && rep.converged && en <= bound;
      ++runs;
    }
  return {ok, fmt("%d solves, max energy error / bound %.3f", runs, worst)};
}

// 9 -------------------------------------------------------------------------
Outcome eigen_construction() {
  const std::array<std::array<Bc, 2>, 4> bcs{{{Bc::dirichlet, Bc::dirichlet},
                                              {Bc::dirichlet, Bc::neumann},
                                              {Bc::neumann, Bc::dirichlet},
                                              {Bc::neumann, Bc::neumann}}};
  double interp = 0.0, fast = 0.0;
  std::mt19937 rng(1009);
  for (int p : {3, 4, 5})
    for (const auto& bc : bcs)
      for (int n_el : {8, 16}) {
        const SplineSpace1D S(p, n_el, bc[0], bc[1]);
        const UnivariatePencil P = assemble_pencil(S);
        const ApproxEigen1D E = approx_eigen(S, P);
        if (E.exact) return {false, "unexpected exact fallback"};
        Matrix sel = Matrix::Zero(E.n, E.n1);
        sel.topRows(E.n1).setIdentity();
        const std::vector<double> pts(E.dft->points().data(), E.dft->points().data() + E.n1);
        const Matrix vals = basis_matrix(S, pts, 0) * E.apply(sel, false);
        interp = std::max(interp, (vals - E.dft->dense()).cwiseAbs().maxCoeff());

        EigenOptions fo;
        fo.force_fast = true;
        const ApproxEigen1D F = approx_eigen(S, P, fo);
        const Matrix B = random_matrix(rng, E.n, 3);
        for (bool t : {false, true}) {
          const Matrix a = F.apply(B, t), b = E.apply(B, t);
          const Matrix ref = [&] {
            const Matrix U = E.dense();
            return t ? Matrix(U.transpose() * B) : Matrix(U * B);
          }();
          fast = std::max(fast, (a - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff()));
          fast = std::max(fast, (b - ref).cwiseAbs().maxCoeff() / std::max(1.0, ref.cwiseAbs().maxCoeff()));
        }
      }
  return {interp <= 1e-10 && fast <= 1e-12, fmt("interpolation %.2e, fast vs dense %.2e", interp, fast)};
}

// 10 ------------------------------------------------------------------------
Outcome elasticity() {
  bool ok = true;
  std::string d;
  for (int n_el : {8, 16, 32}) {
    ElasticitySetup s;
    s.n_el = n_el;
    s.cfg.tol = 1e-6;
    const ElasticityRun r = run_elasticity(s);
    ok = ok && r.report.converged && r.report.iterations <= 60;
    d += fmt("n_el=%d:%d ", n_el, r.report.iterations);
  }
  const Spaces S = elasticity_spaces(2, 2);
  const ElasticitySystem sys = assemble_elasticity(S, deformed_column(), column_load(), Lame{}, 1e-12, column_dirichlet());
  const BlockPreconditioner B = block_preconditioner(S, sys.lame, 0.1);
  TpcgConfig cfg;
  cfg.tol = 1e-6;
  const auto [x, rep] = block_tpcg(sys.A, sys.f, preconditioner_map(B), cfg);
  const Matrix A = dense_block_operator(sys.A);
  const Vector e = dense_block_vector(x) - dense_solve(A, dense_block_vector(sys.f));
  const double bound = (1 + cfg.beta) * rep.tol_abs / std::sqrt(dense_min_eigenvalue(A));
  const double en = std::sqrt(e.dot(A * e));
  ok = ok && rep.converged && en <= bound;
  return {ok, d + fmt("tiny energy error / bound %.3f", en / bound)};
}

// 11 ------------------------------------------------------------------------
Outcome memory_formula() {
  auto expected = [](const std::vector<TuckerTensor3>& xs) {
    long long num = 0, den = 0;
    for (const auto& x : xs) {
      const MultilinearRank r = x.rank();
      const Dims n = x.dims();
      num += static_cast<long long>(r.r1) * r.r2 * r.r3 + r.r1 * n[0] + r.r2 * n[1] + r.r3 * n[2];
      den += static_cast<long long>(n[0]) * n[1] * n[2];
    }
    return 100.0 * static_cast<double>(num) / static_cast<double>(den);
  };
  std::mt19937 rng(1011);
  std::uniform_int_distribution<Index> dn(2, 400), dr(1, 30);
  int bad = 0;
  for (int t = 0; t < 1000; ++t) {
    std::vector<TuckerTensor3> xs;
    const int comps = t % 2 ? 3 : 1;
    for (int c = 0; c < comps; ++c) {
      const Dims n{dn(rng), dn(rng), dn(rng)};
      const Dims r{std::min(dr(rng), n[0]), std::min(dr(rng), n[1]), std::min(dr(rng), n[2])};
      xs.emplace_back(DenseTensor3(r), std::array<Matrix, 3>{Matrix(n[0], r[0]), Matrix(n[1], r[1]), Matrix(n[2], r[2])});
    }
    if (memory_compression(xs) != expected(xs)) ++bad;
  }
  // The value a solve reports is the same formula on its stored iterate.
  const Spaces S = dirichlet_spaces(2, 8);
  const AssembledSystem sys = assemble_system(S, quarter_annulus(), manufactured::f, 1e-8);
  const auto [x, rep] = tpcg(sys.A, sys.f, preconditioner_map(build_lowrank_fd(eigens_for(S), 0.1)), TpcgConfig{});
  if (rep.memory_compression != expected({x})) ++bad;
  return {bad == 0, fmt("1001 checks, %d mismatches", bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Criterion>> criteria{
      {"truncation contract", truncation_contract},
      {"algebra oracle equivalence", algebra_oracles},
      {"exp-sum quality", exp_sum_quality},
      {"spectral sandwich", spectral_sandwich},
      {"preconditioner robustness", preconditioner_robustness},
      {"convergence orders", convergence_orders},
      {"assembly ranks", assembly_ranks},
      {"end-to-end correctness", end_to_end},
      {"eigen construction", eigen_construction},
      {"elasticity", elasticity},
      {"memory compression", memory_formula},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failures += !o.pass;
    std::printf("%s %2zu %-28s %7.1fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), sec,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures;
}
