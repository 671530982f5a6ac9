// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/preconditioner.hpp"
#include "lriga/truncation.hpp"

#include <chrono>
#include <functional>
#include <ostream>

namespace lriga {

// A vector with one Tucker tensor per component (one for Poisson, three for
// elasticity) and its lazy counterpart.
using TuckerVec = std::vector<TuckerPtr>;
using SumVec = std::vector<TuckerSum>;
using LinearMap = std::function<SumVec(const TuckerVec&)>;

struct TpcgConfig {
  double tol = 1e-6;          // relative to ||f||_2 unless tol_is_absolute
  bool tol_is_absolute = false;
  double beta = 0.1;
  double eps0 = 0.1;
  double alpha = 0.5;
  double eps_min = -1.0;      // <= 0: tol_abs / 10
  double delta = 1e-3;
  int max_iterations = 500;
  int restarts = 0;  // fresh starts from the current iterate after a breakdown
};

struct SolveReport {
  int iterations = 0;
  bool converged = false;
  bool breakdown = false;
  int restarts = 0;
  double f_norm = 0.0;
  double tol_abs = 0.0;
  double final_residual = 0.0;  // untruncated ||f - A x|| at exit
  double memory_compression = 0.0;
  double wall_seconds = 0.0;
  std::vector<double> res_norm;  // entry k is ||r_k||
  std::vector<MultilinearRank> rank_x, rank_r, rank_p;  // max over components
  std::vector<std::vector<MultilinearRank>> rank_x_components;
  std::vector<double> eps;
};

// 100 (r1 r2 r3 + sum_i r_i n_i) / (n1 n2 n3), summed over components for blocks.
[[nodiscard]] inline double memory_compression(const std::vector<TuckerTensor3>& x) {
  double num = 0.0, den = 0.0;
  for (const auto& c : x) {
    const MultilinearRank r = c.rank();
    const Dims n = c.dims();
    num += static_cast<double>(r.r1) * r.r2 * r.r3 + static_cast<double>(r.r1) * n[0] +
           static_cast<double>(r.r2) * n[1] + static_cast<double>(r.r3) * n[2];
    den += static_cast<double>(n[0]) * n[1] * n[2];
  }
  return 100.0 * num / den;
}
[[nodiscard]] inline double memory_compression(const TuckerTensor3& x) { return memory_compression(std::vector{x}); }

namespace detail {

inline MultilinearRank max_rank(const TuckerVec& v) {
  MultilinearRank r{0, 0, 0};
  for (const auto& c : v) {
    r.r1 = std::max(r.r1, c->rank().r1);
    r.r2 = std::max(r.r2, c->rank().r2);
    r.r3 = std::max(r.r3, c->rank().r3);
  }
  return r;
}

inline double dot(const TuckerVec& a, const TuckerVec& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += tucker_inner(*a[c], *b[c]);
  return s;
}

inline double vnorm(const TuckerVec& a) { return std::sqrt(std::max(0.0, dot(a, a))); }

inline TuckerVec truncate(const SumVec& s, double eps) {
  TuckerVec out;
  for (const auto& c : s) out.push_back(share(truncate_rel(c, eps)));
  return out;
}

inline SumVec residual(const TuckerVec& f, const LinearMap& A, const TuckerVec& x) {
  SumVec Ax = A(x);
  SumVec r;
  for (std::size_t c = 0; c < f.size(); ++c) {
    r.push_back(as_sum(f[c]));
    r.back().add(Ax[c], -1.0);
  }
  return r;
}

}  // namespace detail

// Truncated preconditioned CG with a directly computed residual, dynamic
// truncation of the iterate and relative truncation at eta_k of r, z, p, q.
[[nodiscard]] inline std::pair<TuckerVec, SolveReport> tpcg_once(const LinearMap& A, const TuckerVec& f,
                                                            const LinearMap& P, const TpcgConfig& cfg,
                                                            TuckerVec x = {}) {
  const auto t0 = std::chrono::steady_clock::now();
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("tpcg: tol must be positive");
  if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) throw std::invalid_argument("tpcg: beta must lie in (0,1)");
  if (x.empty())
    for (const auto& c : f) x.push_back(share(TuckerTensor3::zeros(c->dims())));
  if (x.size() != f.size()) throw ShapeError("tpcg: initial guess has the wrong number of components");

  SolveReport rep;
  rep.f_norm = detail::vnorm(f);
  rep.tol_abs = cfg.tol_is_absolute ? cfg.tol : cfg.tol * rep.f_norm;
  const double tol = rep.tol_abs;
  const double eps_min = std::min(cfg.eps0, cfg.eps_min > 0.0 ? cfg.eps_min : 0.1 * tol);
  auto finish = [&](TuckerVec& xs) {
    double r2 = 0.0;
    for (const auto& c : detail::residual(f, A, xs)) r2 += std::pow(norm(c), 2);
    rep.final_residual = std::sqrt(r2);
    std::vector<TuckerTensor3> xv;
    for (const auto& c : xs) xv.push_back(*c);
    rep.memory_compression = memory_compression(xv);
    rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return std::make_pair(xs, rep);
  };

  TuckerVec r = detail::truncate(detail::residual(f, A, x), 0.0);
  double rn = detail::vnorm(r);
  double eps = cfg.eps0;
  auto record = [&](const TuckerVec& p) {
    rep.res_norm.push_back(rn);
    rep.rank_x.push_back(detail::max_rank(x));
    rep.rank_x_components.emplace_back();
    for (const auto& c : x) rep.rank_x_components.back().push_back(c->rank());
    rep.rank_r.push_back(detail::max_rank(r));
    rep.rank_p.push_back(p.empty() ? MultilinearRank{0, 0, 0} : detail::max_rank(p));
    rep.eps.push_back(eps);
  };
  if (rn <= tol || tol == 0.0) {
    rep.converged = rn <= tol;
    record({});
    return finish(x);
  }
  double eta = cfg.beta * tol / rn;
  TuckerVec z = detail::truncate(P(r), eta);
  TuckerVec p = z;
  TuckerVec q = detail::truncate(A(p), eta);
  double xi = detail::dot(p, q);
  record(p);
  int k = 0;
  while (rn > tol) {
    if (!(xi > 0.0)) {
      rep.breakdown = true;
      break;
    }
    if (k >= cfg.max_iterations) break;
    const double omega = detail::dot(r, p) / xi;
    SumVec proposal;
    for (std::size_t c = 0; c < x.size(); ++c) {
      proposal.push_back(as_sum(x[c]));
      proposal.back().add(p[c], omega);
    }
    DynamicTruncation dt = truncate_dynamic(x, proposal, eps, cfg.alpha, eps_min, cfg.delta);
    eps = dt.eps;
    x.clear();
    for (auto& c : dt.y) x.push_back(share(std::move(c)));
    r = detail::truncate(detail::residual(f, A, x), eta);
    rn = detail::vnorm(r);
    ++k;
    if (rn <= tol) {
      record(p);
      break;
    }
    eta = cfg.beta * tol / rn;
    z = detail::truncate(P(r), eta);
    const double bk = -detail::dot(z, q) / xi;
    SumVec pn;
    for (std::size_t c = 0; c < x.size(); ++c) {
      pn.push_back(as_sum(z[c]));
      pn.back().add(p[c], bk);
    }
    p = detail::truncate(pn, eta);
    q = detail::truncate(A(p), eta);
    xi = detail::dot(p, q);
    record(p);
  }
  rep.iterations = k;
  rep.converged = rn <= tol;
  return finish(x);
}

// tpcg_once plus up to cfg.restarts restarts after a breakdown. Histories are
// concatenated; the iteration cap covers all passes together.
[[nodiscard]] inline std::pair<TuckerVec, SolveReport> tpcg(const LinearMap& A, const TuckerVec& f,
                                                            const LinearMap& P, const TpcgConfig& cfg,
                                                            TuckerVec x = {}) {
  auto [y, rep] = tpcg_once(A, f, P, cfg, std::move(x));
  while (rep.breakdown && rep.restarts < cfg.restarts && rep.iterations < cfg.max_iterations) {
    TpcgConfig c = cfg;
    c.max_iterations = cfg.max_iterations - rep.iterations;
    auto [y2, r2] = tpcg_once(A, f, P, c, y);
    y = std::move(y2);
    rep.restarts += 1;
    rep.iterations += r2.iterations;
    rep.converged = r2.converged;
    rep.breakdown = r2.breakdown;
    rep.final_residual = r2.final_residual;
    rep.memory_compression = r2.memory_compression;
    rep.wall_seconds += r2.wall_seconds;
    // Entry 0 of a restart repeats the state the previous pass stopped in.
    auto append = [](auto& into, const auto& from) { into.insert(into.end(), from.begin() + 1, from.end()); };
    if (!r2.res_norm.empty()) {
      append(rep.res_norm, r2.res_norm);
      append(rep.rank_x, r2.rank_x);
      append(rep.rank_x_components, r2.rank_x_components);
      append(rep.rank_r, r2.rank_r);
      append(rep.rank_p, r2.rank_p);
      append(rep.eps, r2.eps);
    }
  }
  return {y, rep};
}

// Scalar convenience wrappers.
[[nodiscard]] inline LinearMap operator_map(const TuckerOperator3& A) {
  return [&A](const TuckerVec& x) { return SumVec{apply_operator(A, x[0])}; };
}

[[nodiscard]] inline LinearMap preconditioner_map(const LowRankFD& P) {
  return [&P](const TuckerVec& x) { return SumVec{P.apply_sum(x[0])}; };
}

[[nodiscard]] inline LinearMap preconditioner_map(const ExactFD& P) {
  return [&P](const TuckerVec& x) { return SumVec{as_sum(share(P.apply(*x[0])))}; };
}

[[nodiscard]] inline LinearMap identity_map() {
  return [](const TuckerVec& x) {
    SumVec s;
    for (const auto& c : x) s.push_back(as_sum(c));
    return s;
  };
}

[[nodiscard]] inline std::pair<TuckerTensor3, SolveReport> tpcg(const TuckerOperator3& A, const TuckerTensor3& f,
                                                                const LinearMap& P, const TpcgConfig& cfg) {
  auto [x, rep] = tpcg(operator_map(A), TuckerVec{share(f)}, P, cfg);
  return {*x[0], rep};
}

// CSV columns iter,res_norm,rx1..3,rr1..3,rp1..3,eps_k.
inline void write_report_csv(std::ostream& os, const SolveReport& rep) {
  os << "iter,res_norm,rx1,rx2,rx3,rr1,rr2,rr3,rp1,rp2,rp3,eps_k\n";
  os.precision(10);
  for (std::size_t k = 0; k < rep.res_norm.size(); ++k) {
    os << k << ',' << rep.res_norm[k];
    for (const auto* h : {&rep.rank_x, &rep.rank_r, &rep.rank_p})
      os << ',' << (*h)[k].r1 << ',' << (*h)[k].r2 << ',' << (*h)[k].r3;
    os << ',' << rep.eps[k] << '\n';
  }
}

// As write_report_csv with the iterate ranks of every component appended
// (rx1_c1,rx2_c1,rx3_c1,rx1_c2,...).
inline void write_block_report_csv(std::ostream& os, const SolveReport& rep) {
  const std::size_t K = rep.rank_x_components.empty() ? 0 : rep.rank_x_components.front().size();
  os << "iter,res_norm,rx1,rx2,rx3,rr1,rr2,rr3,rp1,rp2,rp3,eps_k";
  for (std::size_t c = 1; c <= K; ++c) os << ",rx1_c" << c << ",rx2_c" << c << ",rx3_c" << c;
  os << '\n';
  os.precision(10);
  for (std::size_t k = 0; k < rep.res_norm.size(); ++k) {
    os << k << ',' << rep.res_norm[k];
    for (const auto* h : {&rep.rank_x, &rep.rank_r, &rep.rank_p})
      os << ',' << (*h)[k].r1 << ',' << (*h)[k].r2 << ',' << (*h)[k].r3;
    os << ',' << rep.eps[k];
    for (const auto& r : rep.rank_x_components[k]) os << ',' << r.r1 << ',' << r.r2 << ',' << r.r3;
    os << '\n';
  }
}

}  // namespace lriga
