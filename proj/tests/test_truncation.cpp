// SPDX-License-Identifier: MIT
#include "support.hpp"

#include <gtest/gtest.h>

using namespace lriga;
using namespace lriga::testing;

TEST(TruncateRel, ContractOnRandomSums) {
  std::mt19937 rng(11);
  std::uniform_int_distribution<Index> dn(2, 12), dr(1, 4);
  for (int trial = 0; trial < 60; ++trial) {
    const Dims n{dn(rng), dn(rng), dn(rng)};
    TuckerSum s(n);
    for (int t = 0; t < 3; ++t) s.add(share(decaying_tucker(rng, n, {dr(rng), dr(rng), dr(rng)})), t == 1 ? -0.7 : 1.0);
    const Vector ref = to_dense(materialize(s)).data;
    for (double eps : {1e-1, 1e-4, 0.0}) {
      const TuckerTensor3 y = truncate_rel(s, eps);
      EXPECT_LE((to_dense(y).data - ref).norm(), std::max(eps, 1e-13) * ref.norm());
      for (int m = 0; m < 3; ++m) EXPECT_LE(y.rank()[m], n[m]);
    }
  }
}

TEST(TruncateRel, ExactLowRankIsRecovered) {
  std::mt19937 rng(12);
  const TuckerTensor3 x = random_tucker(rng, {10, 9, 8}, {2, 3, 2});
  TuckerSum s(x.dims());
  s.add(share(x), 0.5);
  s.add(share(x), 0.5);
  const TuckerTensor3 y = truncate_rel(s, 1e-10);
  EXPECT_EQ(y.rank(), (MultilinearRank{2, 3, 2}));
}

TEST(TruncateRel, NegativeToleranceRejected) {
  EXPECT_THROW((void)truncate_rel(TuckerTensor3::zeros({2, 2, 2}), -1.0), std::invalid_argument);
}

TEST(TruncateRel, NormOfLazySum) {
  std::mt19937 rng(13);
  TuckerSum s({7, 6, 5});
  s.add(share(random_tucker(rng, {7, 6, 5}, {3, 2, 2})));
  s.add(share(random_tucker(rng, {7, 6, 5}, {2, 2, 3})), -2.0);
  EXPECT_NEAR(norm(s), to_dense(materialize(s)).norm(), 1e-12 * norm(s));
}

TEST(DynamicTruncation, StagnantProposalKeepsIterate) {
  std::mt19937 rng(14);
  const TuckerPtr y = share(random_tucker(rng, {5, 5, 5}, {2, 2, 2}));
  const auto out = truncate_dynamic(y, as_sum(y), 0.1, 0.5, 1e-6, 1e-3);
  EXPECT_EQ(out.eps, 0.1);
  EXPECT_LT(rel_diff(to_dense(out.y[0]).data, to_dense(*y).data), 1e-14);
}

TEST(DynamicTruncation, ToleranceOnlyDecreasesAndStaysAboveFloor) {
  std::mt19937 rng(15);
  for (int trial = 0; trial < 20; ++trial) {
    const TuckerPtr y = share(decaying_tucker(rng, {8, 8, 8}, {4, 4, 4}));
    TuckerSum next = as_sum(y);
    next.add(share(decaying_tucker(rng, {8, 8, 8}, {4, 4, 4})), 1e-3);
    const double eps_min = 1e-5;
    const auto out = truncate_dynamic(y, next, 0.1, 0.5, eps_min, 1e-3);
    EXPECT_LE(out.eps, 0.1);
    EXPECT_GT(out.eps, eps_min);
    EXPECT_GE(out.passes, 1);
    // Either the update ratio is accepted or the floor stopped the reduction.
    EXPECT_TRUE(std::abs(out.ratio - 1.0) <= 1e-3 || 0.5 * out.eps <= eps_min);
    const Vector ref = to_dense(materialize(next)).data;
    EXPECT_LE((to_dense(out.y[0]).data - ref).norm(), out.eps * ref.norm() * (1 + 1e-10));
  }
}

TEST(DynamicTruncation, RejectsBadParameters) {
  const TuckerPtr y = share(TuckerTensor3::zeros({2, 2, 2}));
  EXPECT_THROW((void)truncate_dynamic(y, as_sum(y), 0.1, 1.5, 1e-3, 1e-3), std::invalid_argument);
  EXPECT_THROW((void)truncate_dynamic(y, as_sum(y), 1e-4, 0.5, 1e-3, 1e-3), std::invalid_argument);
  EXPECT_THROW((void)truncate_dynamic(y, as_sum(y), 0.1, 0.5, 1e-3, 0.0), std::invalid_argument);
}

TEST(DynamicTruncation, SharedToleranceAcrossComponents) {
  std::mt19937 rng(16);
  std::vector<TuckerPtr> y;
  std::vector<TuckerSum> next;
  for (int c = 0; c < 3; ++c) {
    y.push_back(share(decaying_tucker(rng, {6, 6, 6}, {3, 3, 3})));
    next.push_back(as_sum(y.back()));
    next.back().add(share(decaying_tucker(rng, {6, 6, 6}, {3, 3, 3})), 0.01);
  }
  const auto out = truncate_dynamic(y, next, 0.1, 0.5, 1e-8, 1e-3);
  ASSERT_EQ(out.y.size(), 3u);
  for (int c = 0; c < 3; ++c) {
    const Vector ref = to_dense(materialize(next[c])).data;
    EXPECT_LE((to_dense(out.y[c]).data - ref).norm(), out.eps * ref.norm() * (1 + 1e-10));
  }
}
