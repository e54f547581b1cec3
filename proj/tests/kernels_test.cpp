// Copyright 2026 The gvo_nav Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gvo_nav/kernels.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace gvo_nav::kernels {
namespace {

PointCloud random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> d(-10.0, 10.0);
  PointCloud c;
  for (std::size_t i = 0; i < n; ++i) c.push_back({d(gen), d(gen)});
  return c;
}

std::vector<Vec2> as_vec(const PointCloud& c) {
  std::vector<Vec2> out;
  for (std::size_t i = 0; i < c.size(); ++i) out.push_back(c[i]);
  return out;
}

class KernelVariants : public ::testing::TestWithParam<Isa> {
 protected:
  void SetUp() override {
    if (!isa_available(GetParam())) GTEST_SKIP() << isa_name(GetParam()) << " not available";
  }
};

// Sizes cover empty input, pure tails and full vectors plus tails.
constexpr std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 64, 1000};

TEST_P(KernelVariants, PointDistanceBitIdenticalToScalar) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> q(-12.0, 12.0);
  for (std::size_t n : kSizes) {
    const PointCloud c = random_cloud(n, n + 1);
    for (int i = 0; i < 50; ++i) {
      const double qx = q(gen), qy = q(gen);
      const double ref = scalar::min_dist_sq(c.view(), qx, qy);
      const double got = GetParam() == Isa::kAvx2   ? avx2::min_dist_sq(c.view(), qx, qy)
                         : GetParam() == Isa::kNeon ? neon::min_dist_sq(c.view(), qx, qy)
                                                    : scalar::min_dist_sq(c.view(), qx, qy);
      EXPECT_EQ(got, ref) << "n=" << n;
    }
  }
}

TEST_P(KernelVariants, SegmentDistanceBitIdenticalToScalar) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> q(-12.0, 12.0);
  for (std::size_t n : kSizes) {
    const PointCloud c = random_cloud(n, 3 * n + 5);
    for (int i = 0; i < 50; ++i) {
      const double ax = q(gen), ay = q(gen);
      // Every tenth segment is degenerate.
      const double bx = i % 10 == 0 ? ax : q(gen);
      const double by = i % 10 == 0 ? ay : q(gen);
      const double ref = scalar::min_segment_dist_sq(c.view(), ax, ay, bx, by);
      const double got = GetParam() == Isa::kAvx2   ? avx2::min_segment_dist_sq(c.view(), ax, ay, bx, by)
                         : GetParam() == Isa::kNeon ? neon::min_segment_dist_sq(c.view(), ax, ay, bx, by)
                                                    : scalar::min_segment_dist_sq(c.view(), ax, ay, bx, by);
      EXPECT_EQ(got, ref) << "n=" << n;
    }
  }
}

INSTANTIATE_TEST_SUITE_P(AllIsas, KernelVariants, ::testing::Values(Isa::kScalar, Isa::kAvx2, Isa::kNeon),
                         [](const auto& info) { return std::string(isa_name(info.param)); });

TEST(ScalarKernels, MatchBruteForceOracle) {
  const PointCloud c = random_cloud(300, 4);
  const std::vector<Vec2> pts = as_vec(c);
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> q(-12.0, 12.0);
  for (int i = 0; i < 200; ++i) {
    const Vec2 p{q(gen), q(gen)}, b{q(gen), q(gen)};
    const double d = oracle::min_point_distance(pts, p);
    EXPECT_NEAR(std::sqrt(scalar::min_dist_sq(c.view(), p.x, p.y)), d, 1e-12);
    double seg = std::numeric_limits<double>::infinity();
    for (const Vec2& x : pts) seg = std::min(seg, oracle::segment_distance(x, p, b));
    EXPECT_NEAR(std::sqrt(scalar::min_segment_dist_sq(c.view(), p.x, p.y, b.x, b.y)), seg, 1e-9);
  }
}

TEST(ScalarKernels, EmptyInputIsInfinite) {
  const PointCloud c;
  EXPECT_EQ(scalar::min_dist_sq(c.view(), 0, 0), std::numeric_limits<double>::infinity());
  EXPECT_EQ(scalar::min_segment_dist_sq(c.view(), 0, 0, 1, 1), std::numeric_limits<double>::infinity());
}

TEST(Dispatch, ForceIsaSwitchesAndRejectsMissing) {
  const Isa before = active_isa();
  EXPECT_TRUE(isa_available(Isa::kScalar));
  force_isa(Isa::kScalar);
  EXPECT_EQ(active_isa(), Isa::kScalar);
  const PointCloud c = random_cloud(100, 1);
  const double scalar_value = min_dist_sq(c.view(), 0.3, -0.2);
  for (Isa isa : {Isa::kAvx2, Isa::kNeon}) {
    if (isa_available(isa)) {
      force_isa(isa);
      EXPECT_EQ(min_dist_sq(c.view(), 0.3, -0.2), scalar_value);
    } else {
      EXPECT_THROW(force_isa(isa), std::invalid_argument);
    }
  }
  force_isa(before);
}

}  // namespace
}  // namespace gvo_nav::kernels
