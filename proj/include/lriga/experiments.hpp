// SPDX-License-Identifier: MIT
#pragma once

// End-to-end drivers shared by the command line tool and the acceptance runs.

#include "lriga/elasticity.hpp"
#include "lriga/error_norms.hpp"
#include "lriga/manufactured.hpp"

#include <chrono>

namespace lriga {

[[nodiscard]] inline PointFunction load_by_name(const std::string& name) {
  if (name == "one") return [](const Vec3&) { return 1.0; };
  if (name == "manufactured") return manufactured::f;
  if (name == "zero") return [](const Vec3&) { return 0.0; };
  throw std::invalid_argument("unknown load '" + name + "'");
}

struct PoissonSetup {
  GeometryMap geometry = quarter_annulus();
  std::string load = "one";
  int p = 2;
  int n_el = 16;
  double eps_prec = 0.1;
  TpcgConfig cfg;
  EigenOptions eig;
};

struct PoissonRun {
  TuckerTensor3 x;
  SolveReport report;
  MultilinearRank aggregate;
  int rank_p = 0;
  double M_p = 0.0;
  double exp_sum_error = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double assembly_seconds = 0.0;
  double setup_seconds = 0.0;
};

namespace detail {

inline double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace detail

[[nodiscard]] inline PoissonRun run_poisson(const PoissonSetup& s) {
  const SplineSpace1D S1(s.p, s.n_el);
  const Spaces S{S1, S1, S1};
  PoissonRun run;
  auto t0 = std::chrono::steady_clock::now();
  const AssembledSystem sys = assemble_system(S, s.geometry, load_by_name(s.load), assembly_tolerance(s.cfg.tol));
  run.assembly_seconds = detail::seconds_since(t0);
  run.aggregate = sys.aggregate;
  t0 = std::chrono::steady_clock::now();
  const LowRankFD P = build_lowrank_fd(eigens_for(S, s.eig), s.eps_prec);
  run.setup_seconds = detail::seconds_since(t0);
  run.rank_p = P.rank();
  run.M_p = P.es.M;
  run.exp_sum_error = P.es.measured_error;
  run.lambda_min = P.lambda_min;
  run.lambda_max = P.lambda_max;
  auto [x, rep] = tpcg(sys.A, sys.f, preconditioner_map(P), s.cfg);
  run.x = std::move(x);
  run.report = std::move(rep);
  return run;
}

struct ConvergenceRow {
  int level = 0;
  int n_el = 0;
  double h = 0.0;
  double tol = 0.0;
  int iterations = 0;
  bool converged = false;
  ErrorNorms err;
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double order_l2 = 0.0;  // NaN with fewer than two levels
  double order_h1 = 0.0;
};

// Manufactured-solution study: per level a tight solve estimates the
// discretization error, then the reported solve uses a relative tolerance a
// hundred times below that estimate.
[[nodiscard]] inline ConvergenceStudy convergence_study(const GeometryMap& G, int p, const std::vector<int>& levels,
                                                        double tight_tol = 1e-8, double eps_prec = 0.1) {
  ConvergenceStudy out;
  std::vector<double> h, l2, h1;
  for (int level : levels) {
    PoissonSetup s;
    s.geometry = G;
    s.load = "manufactured";
    s.p = p;
    s.n_el = 1 << level;
    s.eps_prec = eps_prec;
    s.cfg.tol = tight_tol;
    const SplineSpace1D S1(p, s.n_el);
    const Spaces S{S1, S1, S1};
    const PoissonRun tight = run_poisson(s);
    const ErrorNorms e0 = error_norms(tight.x, manufactured::u, manufactured::grad_u, G, S);
    s.cfg.tol = std::max(e0.l2 / e0.u_l2 / 100.0, 1e-12);
    const PoissonRun run = run_poisson(s);
    ConvergenceRow row;
    row.level = level;
    row.n_el = s.n_el;
    row.h = 1.0 / s.n_el;
    row.tol = s.cfg.tol;
    row.iterations = run.report.iterations;
    row.converged = run.report.converged;
    row.err = error_norms(run.x, manufactured::u, manufactured::grad_u, G, S);
    out.rows.push_back(row);
    h.push_back(row.h);
    l2.push_back(row.err.l2);
    h1.push_back(row.err.h1);
  }
  out.order_l2 = fitted_order(h, l2);
  out.order_h1 = fitted_order(h, h1);
  return out;
}

struct ElasticitySetup {
  GeometryMap geometry = deformed_column();
  int p = 3;
  int n_el = 8;
  Lame lame;
  double eps_prec = 0.1;
  bool zero_load = false;
  TpcgConfig cfg;
  EigenOptions eig;
};

struct ElasticityRun {
  BlockTuckerVector x;
  SolveReport report;
  std::array<std::array<MultilinearRank, 3>, 3> block_ranks{};
  std::array<int, 3> rank_p{};
  std::array<MultilinearRank, 3> rank_x{};
};

[[nodiscard]] inline ElasticityRun run_elasticity(const ElasticitySetup& s) {
  const Spaces S = elasticity_spaces(s.p, s.n_el);
  std::array<PointFunction, 3> load = column_load();
  std::array<std::vector<DirichletFace>, 3> faces = column_dirichlet();
  if (s.zero_load) {
    load = {};
    faces = {};
  }
  const ElasticitySystem sys = assemble_elasticity(S, s.geometry, load, s.lame, assembly_tolerance(s.cfg.tol), faces);
  const BlockPreconditioner B = block_preconditioner(S, s.lame, s.eps_prec, s.eig);
  ElasticityRun run;
  run.block_ranks = sys.block_ranks;
  for (int a = 0; a < 3; ++a) run.rank_p[a] = B.P[a].rank();
  auto [x, rep] = block_tpcg(sys.A, sys.f, preconditioner_map(B), s.cfg);
  run.x = std::move(x);
  run.report = std::move(rep);
  for (int c = 0; c < 3; ++c) run.rank_x[c] = run.x[c].rank();
  return run;
}

}  // namespace lriga
