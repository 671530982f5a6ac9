// SPDX-License-Identifier: MIT
#pragma once

#include "lriga/geometry.hpp"
#include "lriga/tucker.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace lriga {

// Text dump of a Tucker tensor:
//   tucker3
//   r1 r2 r3
//   <core entries, colexicographic, one line>
//   then per mode: "n_m r_m" followed by n_m rows of r_m values.
// Values use 17 significant digits, so a round trip is exact.
inline void write_tucker(std::ostream& os, const TuckerTensor3& x) {
  const auto old = os.precision(17);
  os << "tucker3\n" << x.core.dims[0] << ' ' << x.core.dims[1] << ' ' << x.core.dims[2] << '\n';
  for (Index i = 0; i < x.core.data.size(); ++i) os << (i ? " " : "") << x.core.data[i];
  os << '\n';
  for (int m = 0; m < 3; ++m) {
    const Matrix& F = x.factors[m];
    os << F.rows() << ' ' << F.cols() << '\n';
    for (Index i = 0; i < F.rows(); ++i) {
      for (Index j = 0; j < F.cols(); ++j) os << (j ? " " : "") << F(i, j);
      os << '\n';
    }
  }
  os.precision(old);
}

[[nodiscard]] inline TuckerTensor3 read_tucker(std::istream& is) {
  std::string tag;
  if (!(is >> tag) || tag != "tucker3") throw std::runtime_error("read_tucker: missing tucker3 header");
  Dims r{};
  if (!(is >> r[0] >> r[1] >> r[2]) || r[0] < 0 || r[1] < 0 || r[2] < 0)
    throw std::runtime_error("read_tucker: bad core dimensions");
  DenseTensor3 core(r);
  for (Index i = 0; i < core.data.size(); ++i)
    if (!(is >> core.data[i])) throw std::runtime_error("read_tucker: truncated core");
  std::array<Matrix, 3> f;
  for (int m = 0; m < 3; ++m) {
    Index n = 0, c = 0;
    if (!(is >> n >> c) || n < 0 || c != r[m]) throw std::runtime_error("read_tucker: bad factor header");
    f[m].resize(n, c);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < c; ++j)
        if (!(is >> f[m](i, j))) throw std::runtime_error("read_tucker: truncated factor");
  }
  return {std::move(core), std::move(f)};
}

// Polynomial geometry from JSON:
//   {"name": "...", "degree": [d1, d2, d3], "coef": [[...x...], [...y...], [...z...]]}
// with each coefficient list ordered as in polynomial_map.
[[nodiscard]] inline GeometryMap polynomial_map_from_json(const nlohmann::json& j) {
  try {
    const auto deg = j.at("degree").get<std::array<int, 3>>();
    const auto coef = j.at("coef").get<std::array<std::vector<double>, 3>>();
    for (int d : deg)
      if (d < 0) throw GeometryError("polynomial map: negative degree");
    return polynomial_map(j.value("name", std::string("polynomial")), deg, coef);
  } catch (const nlohmann::json::exception& e) {
    throw GeometryError(std::string("polynomial map: ") + e.what());
  }
}

[[nodiscard]] inline GeometryMap load_polynomial_map(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GeometryError("cannot open geometry file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw GeometryError("geometry file '" + path + "': " + e.what());
  }
  return polynomial_map_from_json(j);
}

}  // namespace lriga
