// SPDX-License-Identifier: MIT
#include "lriga/io.hpp"
#include "support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace lriga;
using namespace lriga::testing;

TEST(TuckerIo, RoundTripIsExact) {
  std::mt19937 rng(51);
  const TuckerTensor3 x = random_tucker(rng, {6, 4, 5}, {2, 3, 1});
  std::stringstream ss;
  write_tucker(ss, x);
  const TuckerTensor3 y = read_tucker(ss);
  EXPECT_EQ(y.rank(), x.rank());
  EXPECT_EQ(y.dims(), x.dims());
  EXPECT_EQ(y.core.data, x.core.data);
  for (int m = 0; m < 3; ++m) EXPECT_EQ(y.factors[m], x.factors[m]);
}

TEST(TuckerIo, MalformedInputIsRejected) {
  std::istringstream a("tucker2\n1 1 1\n");
  EXPECT_THROW((void)read_tucker(a), std::runtime_error);
  std::istringstream b("tucker3\n1 1 1\n0.5\n2 1\n1\n");
  EXPECT_THROW((void)read_tucker(b), std::runtime_error);
  std::istringstream c("tucker3\n1 1 1\n0.5\n2 3\n");
  EXPECT_THROW((void)read_tucker(c), std::runtime_error);
}

TEST(PolynomialJson, AffineMapHasConstantJacobian) {
  // x = 2 xi, y = eta + xi, z = 3 zeta with degree one in each direction.
  const auto j = nlohmann::json::parse(R"({
    "name": "affine", "degree": [1, 1, 1],
    "coef": [[0, 2, 0, 0, 0, 0, 0, 0],
             [0, 1, 1, 0, 0, 0, 0, 0],
             [0, 0, 0, 0, 3, 0, 0, 0]]})");
  const GeometryMap G = polynomial_map_from_json(j);
  EXPECT_EQ(G.name, "affine");
  Mat3 ref;
  ref << 2, 0, 0, 1, 1, 0, 0, 0, 3;
  for (const Vec3& e : halton_points(5)) {
    EXPECT_LT((G.J(e) - ref).norm(), 1e-14);
    EXPECT_LT((G.F(e) - ref * e).norm(), 1e-14);
  }
}

TEST(PolynomialJson, BadDocumentsThrowGeometryError) {
  EXPECT_THROW((void)polynomial_map_from_json(nlohmann::json::parse(R"({"degree": [1, 1]})")), GeometryError);
  EXPECT_THROW((void)polynomial_map_from_json(nlohmann::json::parse(R"({"degree": [-1, 1, 1], "coef": [[], [], []]})")),
               GeometryError);
  EXPECT_THROW((void)load_polynomial_map("/nonexistent/geometry.json"), GeometryError);
}
