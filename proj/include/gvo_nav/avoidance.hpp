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

// Action selection against static points and predicted pedestrians.
//
// Every candidate (v, omega) is rolled forward on its constant-curvature arc
// over a fixed time grid. Static points reject the candidate when the
// robot center comes closer than radius_robot; a track rejects it when the
// peak-normalized density of the predicted pedestrian position at the robot
// center exceeds p_th, or when the center comes within radius_robot +
// radius_human of the predicted mean. Among accepted candidates the one
// closest to the desired action wins; if none is accepted the candidate with
// the latest conflict is taken, or the robot stops when even that conflict
// is sooner than t_c_th.

#ifndef GVO_NAV_AVOIDANCE_HPP_
#define GVO_NAV_AVOIDANCE_HPP_

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gvo_nav/core.hpp"
#include "gvo_nav/kernels.hpp"
#include "gvo_nav/perception.hpp"
#include "gvo_nav/tracking.hpp"

namespace gvo_nav {

struct AvoidParams {
  double t_s_th = 4.0;  // s, static horizon
  double t_d_th = 4.0;  // s, dynamic horizon
  double t_c_th = 0.8;  // s, stop threshold
  double p_th = std::exp(-4.5);
  double delta_t = 0.05;  // s
  double radius_robot = 0.2;
  double dis_sta = 3.0;
  int n_samples = 200;
  /// Weight on omega in the distance to the desired action, m/rad.
  double omega_weight = 0.5;
  /// Center-distance floor against tracks: conflict when closer than
  /// radius_robot + radius_human. Disabled when hard_floor is false.
  bool hard_floor = true;
  double radius_human = 0.3;
  std::optional<Eigen::Matrix2d> velocity_cov_prior;
  /// When the robot already sits inside a conflict threshold at t = 0, judge
  /// each action against the current value instead (no closer to statics,
  /// no closer than the floor, no higher f_d than now), so that moving away
  /// stays admissible. Without it every action conflicts at t = 0.
  bool escape_inside = true;
  /// Appends the in-place turn (0, +-omega_max) that rotates the heading away
  /// from the nearest obstacle point or track mean. Uniform draws almost
  /// never hit v = 0, so without it a robot facing a close wall can be left
  /// with no admissible action.
  bool turn_in_place = true;

  void validate() const;
  double horizon() const { return std::max(t_s_th, t_d_th); }
};

struct StaticVerdict {
  bool hit = false;
  double t_min = 0.0;  // argmin time of the distance when hit, else t_s_th
  double t_hit = 0.0;  // first time below the threshold when hit, else t_s_th
  double min_distance = 0.0;
};

struct DynamicVerdict {
  bool hit = false;
  double t_hit = 0.0;  // first conflicting time when hit, else t_d_th
};

struct ActionVerdict {
  Action action;
  bool free = true;
  double t_min = 0.0;  // earliest conflict time; horizon when free
};

/// Robot centers at k * delta_t, k = 0..floor(horizon / delta_t).
std::vector<Vec2> arc_samples(const Pose& robot, const Action& action, double horizon, double delta_t);

StaticVerdict static_conflict(const Action& action, const Pose& robot, std::span<const Cluster> statics,
                              const AvoidParams& params);
StaticVerdict static_conflict(const Action& action, const Pose& robot, kernels::PointsView statics,
                              const AvoidParams& params);

DynamicVerdict dynamic_conflict(const Action& action, const Pose& robot, const Track& track,
                                const AvoidParams& params);

enum class DecisionKind { kAccepted, kFallback, kStop };

struct Decision {
  Action action;
  DecisionKind kind = DecisionKind::kAccepted;
  /// Candidate 0 is the desired action.
  std::vector<ActionVerdict> candidates;
  std::size_t chosen = 0;
};

/// Evaluates u_star plus n_samples - 1 uniform draws from the action space
/// (v in [v_min, v_max], |omega| <= omega_max), then the in-place turn when
/// turn_in_place is set, and picks the action.
/// Static clusters farther than dis_sta from the robot are ignored.
Decision select_action(const Action& u_star, const Pose& robot, std::span<const Cluster> statics,
                       std::span<const Track> tracks, const ActionSpace& space, const AvoidParams& params,
                       Rng& rng);

/// Verdict for one action against already-filtered statics and all tracks.
ActionVerdict evaluate_action(const Action& action, const Pose& robot, kernels::PointsView statics,
                              std::span<const Track> tracks, const AvoidParams& params);

}  // namespace gvo_nav

#endif  // GVO_NAV_AVOIDANCE_HPP_
