// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/common.hpp"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

namespace lriga {

// S(i,j) = c_j sin(theta_j x_i + k0 pi/2), theta_j = (j + 1 - k0/2 - k1/2) pi
// (0-based j), on the interpolation points of a degree-p spline space:
// breakpoints for odd p (Dirichlet ends excluded), span midpoints for even p.
// c_j = sqrt(2) except the constant Neumann-Neumann mode, where c_0 = 1.
class SineTransform {
 public:
  SineTransform() = default;
  SineTransform(Index n1, int k0, int k1, bool odd_degree, int n_el, bool force_fast = false)
      : n1_(n1), k0_(k0), k1_(k1), odd_(odd_degree), n_el_(n_el) {
    scale_ = Vector::Constant(n1_, std::numbers::sqrt2);
    if (k0_ == 1 && k1_ == 1 && n1_ > 0) scale_[0] = 1.0;
    points_.resize(n1_);
    for (Index i = 0; i < n1_; ++i) {
      if (odd_) {
        points_[i] = static_cast<double>(i + (k0_ == 1 ? 0 : 1)) / n_el_;
      } else {
        points_[i] = (i + 0.5) / n_el_;
      }
    }
    fast_ = force_fast || n1_ >= 32;
    if (k0_ == 1 && k1_ == 1 && odd_ && n1_ < 2) fast_ = false;
    if (fast_) {
      make_plans();
    } else {
      dense_ = dense();
    }
  }

  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;
  SineTransform(SineTransform&&) = default;
  SineTransform& operator=(SineTransform&&) = default;

  [[nodiscard]] Index size() const { return n1_; }
  [[nodiscard]] bool fast() const { return fast_; }
  [[nodiscard]] const Vector& points() const { return points_; }

  [[nodiscard]] double theta(Index j) const { return (j + 1 - 0.5 * k0_ - 0.5 * k1_) * std::numbers::pi; }

  [[nodiscard]] Matrix dense() const {
    Matrix S(n1_, n1_);
    for (Index j = 0; j < n1_; ++j)
      for (Index i = 0; i < n1_; ++i) S(i, j) = scale_[j] * std::sin(theta(j) * points_[i] + k0_ * std::numbers::pi / 2);
    return S;
  }

  // S B (transpose = false) or S^T B.
  [[nodiscard]] Matrix apply(const Matrix& B, bool transpose) const {
    if (B.rows() != n1_) throw ShapeError("SineTransform::apply: expected " + std::to_string(n1_) + " rows");
    if (!fast_) {
      return transpose ? Matrix(dense_.transpose() * B) : Matrix(dense_ * B);
    }
    Matrix in = B;
    Matrix out(n1_, B.cols());
    const Plan& plan = transpose ? *backward_ : *forward_;
    if (!transpose) in = scale_.asDiagonal() * in;
    for (Index c = 0; c < in.cols(); ++c) {
      double* x = in.col(c).data();
      if (plan.double_first) x[0] *= 2.0;
      if (plan.double_last) x[n1_ - 1] *= 2.0;
      fftw_execute_r2r(plan.p, x, out.col(c).data());
    }
    out *= 0.5;
    if (transpose) out = scale_.asDiagonal() * out;
    return out;
  }

 private:
  struct Plan {
    fftw_plan p = nullptr;
    bool double_first = false;
    bool double_last = false;
    ~Plan() {
      if (p) {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(p);
      }
    }
  };

  static std::mutex& planner_mutex() {
    static std::mutex mu;
    return mu;
  }

  static std::unique_ptr<Plan> plan(Index n, fftw_r2r_kind kind, bool first, bool last) {
    auto pl = std::make_unique<Plan>();
    pl->double_first = first;
    pl->double_last = last;
    Vector a(n), b(n);
    std::lock_guard<std::mutex> lock(planner_mutex());
    pl->p = fftw_plan_r2r_1d(static_cast<int>(n), a.data(), b.data(), kind, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!pl->p) throw SetupError("SineTransform: FFTW planning failed");
    return pl;
  }

  void make_plans() {
    const bool D0 = k0_ == 0, D1 = k1_ == 0;
    if (D0 && D1) {
      if (odd_) {
        forward_ = plan(n1_, FFTW_RODFT00, false, false);
        backward_ = plan(n1_, FFTW_RODFT00, false, false);
      } else {
        forward_ = plan(n1_, FFTW_RODFT01, false, true);
        backward_ = plan(n1_, FFTW_RODFT10, false, false);
      }
    } else if (!D0 && D1) {
      if (odd_) {
        forward_ = plan(n1_, FFTW_REDFT10, false, false);
        backward_ = plan(n1_, FFTW_REDFT01, true, false);
      } else {
        forward_ = plan(n1_, FFTW_REDFT11, false, false);
        backward_ = plan(n1_, FFTW_REDFT11, false, false);
      }
    } else if (D0 && !D1) {
      if (odd_) {
        forward_ = plan(n1_, FFTW_RODFT10, false, false);
        backward_ = plan(n1_, FFTW_RODFT01, false, true);
      } else {
        forward_ = plan(n1_, FFTW_RODFT11, false, false);
        backward_ = plan(n1_, FFTW_RODFT11, false, false);
      }
    } else {
      if (odd_) {
        forward_ = plan(n1_, FFTW_REDFT00, true, true);
        backward_ = plan(n1_, FFTW_REDFT00, true, true);
      } else {
        forward_ = plan(n1_, FFTW_REDFT01, true, false);
        backward_ = plan(n1_, FFTW_REDFT10, false, false);
      }
    }
  }

  Index n1_ = 0;
  int k0_ = 0, k1_ = 0;
  bool odd_ = true;
  int n_el_ = 1;
  bool fast_ = false;
  Vector scale_;
  Vector points_;
  Matrix dense_;
  std::unique_ptr<Plan> forward_, backward_;
};

}  // namespace lriga
