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

#include "gvo_nav/avoidance.hpp"

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "support/oracles.hpp"

namespace gvo_nav {
namespace {

Cluster cluster_of(const std::vector<Vec2>& pts) {
  std::vector<ScanPoint> s;
  for (const Vec2& p : pts) s.push_back({p.x, p.y, 0.0});
  return Cluster::from_points(std::move(s));
}

kernels::PointCloud cloud_of(const std::vector<Vec2>& pts) {
  kernels::PointCloud c;
  for (const Vec2& p : pts) c.push_back(p);
  return c;
}

Track track_at(Vec2 p, Vec2 v, double pos_var, double vel_var) {
  Track t;
  t.mean << p.x, p.y, v.x, v.y;
  t.covariance = Eigen::Matrix4d::Zero();
  t.covariance.topLeftCorner<2, 2>() = pos_var * Eigen::Matrix2d::Identity();
  t.covariance.bottomRightCorner<2, 2>() = vel_var * Eigen::Matrix2d::Identity();
  return t;
}

TEST(AvoidParams, Validate) {
  EXPECT_NO_THROW(AvoidParams{}.validate());
  AvoidParams a;
  a.p_th = 1.0;
  EXPECT_THROW(a.validate(), std::invalid_argument);
  AvoidParams b;
  b.t_c_th = 5.0;
  EXPECT_THROW(b.validate(), std::invalid_argument);
  AvoidParams c;
  c.delta_t = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(ArcSamples, CountAndEndpoints) {
  const auto s = arc_samples(Pose(0, 0, 0), {1.0, 0.0}, 4.0, 0.05);
  ASSERT_EQ(s.size(), 81u);
  EXPECT_EQ(s.front(), (Vec2{0.0, 0.0}));
  EXPECT_NEAR(s.back().x, 4.0, 1e-12);
}

TEST(StaticConflict, NoStaticsIsFree) {
  const StaticVerdict v = static_conflict({1.0, 0.0}, Pose(0, 0, 0), std::span<const Cluster>{}, AvoidParams{});
  EXPECT_FALSE(v.hit);
  EXPECT_EQ(v.t_min, AvoidParams{}.t_s_th);
}

TEST(StaticConflict, PointDeadAhead) {
  const std::vector<Cluster> c{cluster_of({{1.0, 0.0}})};
  const StaticVerdict v = static_conflict({1.0, 0.0}, Pose(0, 0, 0), c, AvoidParams{});
  EXPECT_TRUE(v.hit);
  EXPECT_NEAR(v.t_min, 1.0, 1e-9);
  // First sample strictly inside 0.2 m: t = 0.8 up to rounding, else 0.85.
  EXPECT_GE(v.t_hit, 0.8 - 1e-9);
  EXPECT_LE(v.t_hit, 0.85 + 1e-9);
  EXPECT_NEAR(v.min_distance, 0.0, 1e-12);
}

TEST(StaticConflict, CurvingAwayMatchesOracle) {
  const std::vector<Vec2> pts{{1.0, 0.0}};
  const std::vector<Cluster> c{cluster_of(pts)};
  const AvoidParams params;
  oracle::FineRules rules;
  rules.radius_robot = params.radius_robot;
  for (double w : {2.0, -2.0, 0.5, 1.0, 3.0}) {
    const Action a{1.0, w};
    const StaticVerdict v = static_conflict(a, Pose(0, 0, 0), c, params);
    const oracle::FineVerdict f = oracle::fine_verdict(Pose(0, 0, 0), a, pts, {}, rules);
    if (std::abs(f.min_static - params.radius_robot) < 1e-2) continue;
    EXPECT_EQ(v.hit, f.min_static < params.radius_robot) << "w=" << w;
    EXPECT_NEAR(v.min_distance, f.min_static, 1e-2);
  }
}

TEST(DynamicConflict, StationaryTrackOnPath) {
  AvoidParams params;
  params.p_th = 0.1;
  params.hard_floor = false;
  const Track t = track_at({1.0, 0.0}, {0.0, 0.0}, 1e-4, 1e-8);
  const DynamicVerdict v = dynamic_conflict({1.0, 0.0}, Pose(0, 0, 0), t, params);
  EXPECT_TRUE(v.hit);
  EXPECT_NEAR(v.t_hit, 1.0, 0.05 + 1e-9);
}

TEST(DynamicConflict, FarTrackIsFree) {
  const Track t = track_at({50.0, 0.0}, {1.0, 0.0}, 0.01, 0.01);
  const DynamicVerdict v = dynamic_conflict({1.0, 0.0}, Pose(0, 0, 0), t, AvoidParams{});
  EXPECT_FALSE(v.hit);
  EXPECT_EQ(v.t_hit, 4.0);
}

TEST(DynamicConflict, HardFloorCatchesDiffuseTrack) {
  // The normalized pdf stays below p_th, so the floor alone decides.
  AvoidParams params;
  params.p_th = 0.999;
  params.escape_inside = false;
  const Track t = track_at({0.4, 0.0}, {0.0, 0.0}, 1.0, 1e-6);
  EXPECT_TRUE(dynamic_conflict({0.0, 0.0}, Pose(0, 0, 0), t, params).hit);
  params.hard_floor = false;
  EXPECT_FALSE(dynamic_conflict({0.0, 0.0}, Pose(0, 0, 0), t, params).hit);
}

TEST(EvaluateAction, FreeImpliesHorizon) {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> v(0.0, 1.6), w(-kPi, kPi), p(-3.0, 3.0);
  const std::vector<Vec2> pts{{2.0, 0.5}, {1.0, -1.0}, {-1.0, 1.5}};
  const kernels::PointCloud cloud = cloud_of(pts);
  const std::vector<Track> tracks{track_at({3.0, 0.0}, {-0.8, 0.0}, 0.01, 0.01)};
  const AvoidParams params;
  for (int i = 0; i < 200; ++i) {
    const ActionVerdict a = evaluate_action({v(gen), w(gen)}, Pose(0, 0, 0), cloud.view(), tracks, params);
    if (a.free) {
      EXPECT_EQ(a.t_min, params.horizon());
    } else {
      EXPECT_GE(a.t_min, 0.0);
      EXPECT_LT(a.t_min, params.horizon() + 1e-12);
    }
  }
}

TEST(EvaluateAction, RaisingPthNeverAddsConflicts) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> v(0.0, 1.6), w(-kPi, kPi);
  const std::vector<Track> tracks{track_at({2.0, 0.3}, {-0.5, 0.1}, 0.02, 0.05),
                                  track_at({1.0, -1.5}, {0.0, 0.7}, 0.03, 0.02)};
  AvoidParams low, high;
  low.hard_floor = high.hard_floor = false;
  low.p_th = 0.01;
  high.p_th = 0.2;
  int flips = 0;
  for (int i = 0; i < 300; ++i) {
    const Action a{v(gen), w(gen)};
    const ActionVerdict l = evaluate_action(a, Pose(0, 0, 0), {}, tracks, low);
    const ActionVerdict h = evaluate_action(a, Pose(0, 0, 0), {}, tracks, high);
    if (l.free) {
      EXPECT_TRUE(h.free);
    }
    if (!l.free && h.free) ++flips;
    if (!h.free) {
      EXPECT_GE(h.t_min, l.t_min);
    }
  }
  EXPECT_GT(flips, 0);
}

TEST(EvaluateAction, GridMatchesFineOracle) {
  const Pose robot(0.0, 0.0, 0.0);
  std::vector<Vec2> wall;
  for (double y = 0.4; y <= 1.6; y += 0.05) wall.push_back({1.5, y});
  const kernels::PointCloud cloud = cloud_of(wall);
  const std::vector<Track> tracks{track_at({3.0, -0.5}, {-0.7, 0.2}, 0.02, 0.01)};
  for (bool floor : {true, false}) {
    AvoidParams params;
    params.radius_robot = 0.3;
    params.hard_floor = floor;
    oracle::FineRules rules;
    rules.radius_robot = params.radius_robot;
    rules.hard_floor = floor;
    rules.p_th = params.p_th;
    int compared = 0, mismatched = 0;
    for (int i = 0; i <= 10; ++i) {
      for (int j = 0; j <= 10; ++j) {
        const Action a{1.6 * i / 10.0, -kPi + 2.0 * kPi * j / 10.0};
        const oracle::FineVerdict f = oracle::fine_verdict(robot, a, wall, tracks, rules);
        const bool banded = std::abs(f.min_static - rules.radius_robot) < 1e-2 ||
                            std::abs(f.peak_fd - rules.p_th) < 1e-3 ||
                            (floor && std::abs(f.min_center - rules.radius_robot - rules.radius_human) < 1e-2);
        if (banded) continue;
        ++compared;
        const ActionVerdict v = evaluate_action(a, robot, cloud.view(), tracks, params);
        if (v.free != f.free) ++mismatched;
      }
    }
    EXPECT_GT(compared, 100);
    EXPECT_EQ(mismatched, 0) << "hard_floor=" << floor;
  }
}

TEST(SelectAction, NoObstaclesReturnsDesired) {
  Rng rng(1);
  const Action u{0.7, 0.3};
  const Decision d = select_action(u, Pose(0, 0, 0), {}, {}, ActionSpace{}, AvoidParams{}, rng);
  EXPECT_EQ(d.kind, DecisionKind::kAccepted);
  EXPECT_EQ(d.chosen, 0u);
  EXPECT_EQ(d.action.v, u.v);
  EXPECT_EQ(d.action.omega, u.omega);
}

TEST(SelectAction, StopsWhenEverythingConflictsNow) {
  AvoidParams params;
  params.escape_inside = false;
  const std::vector<Cluster> c{cluster_of({{0.1, 0.0}})};
  Rng rng(2);
  const Decision d = select_action({1.0, 0.0}, Pose(0, 0, 0), c, {}, ActionSpace{}, params, rng);
  EXPECT_EQ(d.kind, DecisionKind::kStop);
  EXPECT_EQ(d.action.v, 0.0);
  EXPECT_EQ(d.action.omega, 0.0);
}

TEST(SelectAction, FallbackKeepsLatestConflict) {
  // A long wall across the path: every action conflicts, some only late.
  std::vector<Vec2> ring;
  for (int i = 0; i < 400; ++i) {
    const double a = 2.0 * kPi * i / 400.0;
    ring.push_back({3.0 * std::cos(a), 3.0 * std::sin(a)});
  }
  const std::vector<Cluster> c{cluster_of(ring)};
  AvoidParams params;
  params.turn_in_place = false;
  params.dis_sta = 5.0;
  Rng rng(3);
  const Decision d = select_action({1.6, 0.0}, Pose(0, 0, 0), c, {}, ActionSpace{}, params, rng);
  if (d.kind == DecisionKind::kFallback) {
    for (const ActionVerdict& v : d.candidates) {
      EXPECT_FALSE(v.free);
      EXPECT_LE(v.t_min, d.candidates[d.chosen].t_min);
    }
  } else {
    EXPECT_EQ(d.kind, DecisionKind::kAccepted);
    EXPECT_TRUE(d.candidates[d.chosen].free);
  }
}

TEST(SelectAction, HeadOnPedestrianForcesTurn) {
  const std::vector<Track> tracks{track_at({3.0, 0.0}, {-1.0, 0.0}, 0.01, 0.01)};
  AvoidParams params;
  Rng rng(4);
  const Decision d = select_action({1.0, 0.0}, Pose(0, 0, 0), {}, tracks, ActionSpace{}, params, rng);
  ASSERT_EQ(d.kind, DecisionKind::kAccepted);
  EXPECT_FALSE(d.candidates[0].free);
  EXPECT_NE(d.action.omega, 0.0);
  oracle::FineRules rules;
  rules.radius_robot = params.radius_robot;
  const oracle::FineVerdict f = oracle::fine_verdict(Pose(0, 0, 0), d.action, {}, tracks, rules);
  const bool banded = std::abs(f.peak_fd - rules.p_th) < 1e-3 ||
                      std::abs(f.min_center - rules.radius_robot - rules.radius_human) < 1e-2;
  if (!banded) {
    EXPECT_TRUE(f.free);
  }
}

TEST(SelectAction, ChosenIsClosestFreeCandidate) {
  const std::vector<Track> tracks{track_at({2.0, 0.2}, {-0.5, 0.0}, 0.02, 0.02)};
  const AvoidParams params;
  Rng rng(5);
  const Action u{1.0, 0.1};
  const Decision d = select_action(u, Pose(0, 0, 0), {}, tracks, ActionSpace{}, params, rng);
  ASSERT_EQ(d.kind, DecisionKind::kAccepted);
  const auto cost = [&](const Action& a) {
    return std::hypot(a.v - u.v, params.omega_weight * (a.omega - u.omega));
  };
  for (const ActionVerdict& v : d.candidates) {
    if (v.free) {
      EXPECT_GE(cost(v.action), cost(d.action));
    }
  }
}

TEST(SelectAction, TurnInPlaceRotatesAway) {
  // Wall just ahead and to the left: the extra candidate turns right.
  std::vector<Vec2> wall;
  for (double y = -1.0; y <= 1.0; y += 0.05) wall.push_back({0.35, y + 0.05});
  const std::vector<Cluster> c{cluster_of(wall)};
  AvoidParams params;
  params.n_samples = 20;
  Rng rng(6);
  const ActionSpace space;
  const Decision d = select_action({1.0, 0.0}, Pose(0, 0, 0.1), c, {}, space, params, rng);
  const ActionVerdict& turn = d.candidates.back();
  EXPECT_EQ(d.candidates.size(), 21u);
  EXPECT_EQ(turn.action.v, 0.0);
  EXPECT_EQ(std::abs(turn.action.omega), space.omega_max);
  EXPECT_TRUE(turn.free);
}

TEST(SelectAction, Deterministic) {
  const std::vector<Track> tracks{track_at({2.0, 0.2}, {-0.5, 0.0}, 0.02, 0.02)};
  Rng a(9), b(9);
  const Decision x = select_action({1.0, 0.0}, Pose(0, 0, 0), {}, tracks, ActionSpace{}, AvoidParams{}, a);
  const Decision y = select_action({1.0, 0.0}, Pose(0, 0, 0), {}, tracks, ActionSpace{}, AvoidParams{}, b);
  EXPECT_EQ(x.chosen, y.chosen);
  EXPECT_EQ(x.action.v, y.action.v);
  EXPECT_EQ(x.action.omega, y.action.omega);
}

}  // namespace
}  // namespace gvo_nav
