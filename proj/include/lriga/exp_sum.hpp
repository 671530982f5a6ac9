// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/common.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

namespace lriga {

// 1/x ~ sum_j omega_j exp(-alpha_j x) on [1, M].
struct ExpSum {
  std::vector<double> omega;
  std::vector<double> alpha;
  double M = 1.0;
  double eps = 0.0;
  double measured_error = 0.0;  // sup over a log-spaced grid of 10^5 points
  double step = 0.0;            // quadrature step h
  double shift = 0.0;           // first node s_0

  [[nodiscard]] int rank() const { return static_cast<int>(omega.size()); }
  [[nodiscard]] double operator()(double x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < omega.size(); ++j) v += omega[j] * std::exp(-alpha[j] * x);
    return v;
  }
};

// 16 exp(-R pi^2 / log(8M)), the classical bound for the best R-term approximation.
[[nodiscard]] inline double exp_sum_bound(int R, double M) {
  return 16.0 * std::exp(-R * std::numbers::pi * std::numbers::pi / std::log(8.0 * M));
}

namespace detail {

// Trapezoid nodes for 1/x = int exp(s - x e^s) ds; the first weight also
// carries the geometric tail of the truncated nodes to its left.
inline void sinc_nodes(double h, double s0, int R, std::vector<double>& w, std::vector<double>& a) {
  w.resize(R);
  a.resize(R);
  for (int k = 0; k < R; ++k) {
    const double s = s0 + k * h;
    a[k] = std::exp(s);
    w[k] = h * a[k];
  }
  w[0] = h * std::exp(s0) / (1.0 - std::exp(-h));
}

inline std::vector<double> log_grid(double M, int count) {
  std::vector<double> x(count, 1.0);
  if (count < 2 || M <= 1.0) return x;
  const double L = std::log(M);
  for (int i = 0; i < count; ++i) x[i] = std::exp(L * i / (count - 1));
  return x;
}

inline double sup_error(const std::vector<double>& w, const std::vector<double>& a, const std::vector<double>& x) {
  double e = 0.0;
  for (double xi : x) {
    double v = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) v += w[j] * std::exp(-a[j] * xi);
    e = std::max(e, std::abs(1.0 / xi - v));
  }
  return e;
}

// Minimal Nelder-Mead on R^2.
template <class F>
std::array<double, 2> nelder_mead(F&& f, std::array<double, 2> x0, std::array<double, 2> step, int max_iter) {
  std::array<std::array<double, 2>, 3> P{x0, {x0[0] + step[0], x0[1]}, {x0[0], x0[1] + step[1]}};
  std::array<double, 3> v{f(P[0]), f(P[1]), f(P[2])};
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> o{0, 1, 2};
    std::sort(o.begin(), o.end(), [&](int i, int j) { return v[i] < v[j]; });
    const int b = o[0], m = o[1], w = o[2];
    if (std::abs(v[w] - v[b]) < 1e-12 && std::abs(P[w][0] - P[b][0]) + std::abs(P[w][1] - P[b][1]) < 1e-10) break;
    const std::array<double, 2> c{(P[b][0] + P[m][0]) / 2, (P[b][1] + P[m][1]) / 2};
    auto along = [&](double t) { return std::array<double, 2>{c[0] + t * (P[w][0] - c[0]), c[1] + t * (P[w][1] - c[1])}; };
    const auto r = along(-1.0);
    const double fr = f(r);
    if (fr < v[b]) {
      const auto e = along(-2.0);
      const double fe = f(e);
      if (fe < fr) {
        P[w] = e;
        v[w] = fe;
      } else {
        P[w] = r;
        v[w] = fr;
      }
    } else if (fr < v[m]) {
      P[w] = r;
      v[w] = fr;
    } else {
      const auto k = fr < v[w] ? along(-0.5) : along(0.5);
      const double fk = f(k);
      if (fk < std::min(fr, v[w])) {
        P[w] = k;
        v[w] = fk;
      } else {
        for (int i : {m, w}) {
          P[i] = {(P[i][0] + P[b][0]) / 2, (P[i][1] + P[b][1]) / 2};
          v[i] = f(P[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i < 3; ++i)
    if (v[i] < v[best]) best = i;
  return P[best];
}

}  // namespace detail

// Smallest R whose measured sup error on [1, M] is at most eps / M, with
// (h, s_0) optimized per R on a coarse grid and refined by Nelder-Mead.
[[nodiscard]] inline ExpSum build_exp_sum_ratio(double M, double eps, int max_rank = 128) {
  if (!(M >= 1.0) || !std::isfinite(M)) throw std::invalid_argument("build_exp_sum: need M >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("build_exp_sum: tolerance must be positive");
  ExpSum es;
  es.M = M;
  es.eps = eps;
  const double target = eps / M;
  if (M <= 1.0 + 1e-12) {
    // exp(1 - x) matches 1/x and its slope at x = 1.
    es.omega = {std::numbers::e};
    es.alpha = {1.0};
    es.measured_error = 0.0;
    return es;
  }
  const auto scan = detail::log_grid(M, 120);
  const auto coarse = detail::log_grid(M, 400);
  const auto fine = detail::log_grid(M, 100000);
  std::vector<double> w, a;
  for (int R = 1; R <= max_rank; ++R) {
    auto objective = [&](const std::vector<double>& grid) {
      return [&](const std::array<double, 2>& x) {
        if (x[0] <= 0.05) return std::numeric_limits<double>::infinity();
        detail::sinc_nodes(x[0], x[1], R, w, a);
        return std::log(detail::sup_error(w, a, grid));
      };
    };
    auto obj = objective(coarse);
    auto rough = objective(scan);
    std::array<double, 2> best{1.0, 0.0};
    double fbest = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 23; ++i)
      for (int j = 0; j < 55; ++j) {
        const std::array<double, 2> x{0.3 + 0.1 * i, -25.0 + 0.5 * j};
        const double v = rough(x);
        if (v < fbest) {
          fbest = v;
          best = x;
        }
      }
    best = detail::nelder_mead(obj, best, {0.05, 0.25}, 400);
    detail::sinc_nodes(best[0], best[1], R, w, a);
    if (std::exp(obj(best)) > target) continue;
    const double e = detail::sup_error(w, a, fine);
    if (e <= target) {
      es.omega = w;
      es.alpha = a;
      es.measured_error = e;
      es.step = best[0];
      es.shift = best[1];
      return es;
    }
  }
  throw SetupError("build_exp_sum: no exponential sum with at most " + std::to_string(max_rank) +
                   " terms reaches " + std::to_string(target) + " on [1, " + std::to_string(M) + "]");
}

// Cached by (M, eps) since every solve on a given mesh asks for the same sum.
[[nodiscard]] inline ExpSum build_exp_sum(double lambda_min, double lambda_max, double eps, int max_rank = 128) {
  if (!(lambda_min > 0.0) || !(lambda_max >= lambda_min)) {
    throw std::invalid_argument("build_exp_sum: need 0 < lambda_min <= lambda_max");
  }
  static std::mutex mu;
  static std::map<std::tuple<double, double, int>, ExpSum> cache;
  const double M = lambda_max / lambda_min;
  const auto key = std::make_tuple(M, eps, max_rank);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  ExpSum es = build_exp_sum_ratio(M, eps, max_rank);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, es);
  return es;
}

}  // namespace lriga
