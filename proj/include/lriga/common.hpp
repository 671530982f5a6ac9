// SPDX-License-Identifier: MIT
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace lriga {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Dims = std::array<Index, 3>;

// 2^27 doubles is 1 GiB; anything bigger is refused rather than sampled.
inline constexpr std::size_t kDenseEntryLimit = std::size_t{1} << 27;
inline constexpr Index kOracleDofLimit = 4096;

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GuardError : std::length_error {
  using std::length_error::length_error;
};

struct GeometryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SetupError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonSeparableError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string dims_str(const Dims& d) {
  return "(" + std::to_string(d[0]) + "," + std::to_string(d[1]) + "," + std::to_string(d[2]) + ")";
}

inline void check_guard(std::size_t entries, std::size_t limit, const char* what) {
  if (entries > limit) {
    throw GuardError(std::string(what) + ": " + std::to_string(entries) +
                     " entries exceeds guard of " + std::to_string(limit));
  }
}

}  // namespace lriga
