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

#ifndef GVO_NAV_FOLLOWER_HPP_
#define GVO_NAV_FOLLOWER_HPP_

#include <cstddef>
#include <span>

#include "gvo_nav/core.hpp"
#include "gvo_nav/planner.hpp"
#include "gvo_nav/spline.hpp"

namespace gvo_nav {

struct FollowerParams {
  double xi = 0.9;  // damping ratio, (0, 1]
  double g = 10.0;  // gain, > 0
  int lookahead_steps = 5;
  double trace_spacing = 0.05;  // m

  void validate() const;
};

/// Pose error expressed in the frame of the real robot.
struct TrackingError {
  double e1 = 0.0;  // m
  double e2 = 0.0;  // m
  double e3 = 0.0;  // rad, (-pi, pi]
};

struct Gains {
  double k1 = 0.0;
  double k2 = 0.0;
  double k3 = 0.0;
};

/// e = -R(theta)^T (p - p_ref),  e3 = -(theta - theta_ref), i.e.
///   e1 = -cos(th) dx - sin(th) dy
///   e2 =  sin(th) dx - cos(th) dy
TrackingError tracking_error(const Pose& real, const Pose& ref);

/// k1 = k3 = 2 xi sqrt(w_r^2 + g v_r^2),  k2 = g |v_r|.
Gains gains(const Action& u_r, const FollowerParams& params);

/// Feedback law before saturation:
///   u_e1 = -k1 e1,  u_e2 = -sign(v_r) k2 e2 - k3 e3   (sign(0) = 0)
///   v = v_r cos(e3) - u_e1,  omega = w_r - u_e2.
/// With the error sign convention above this steers toward the reference:
/// a robot right of the path (e2 > 0) gets a positive omega.
Action control_unclamped(const Pose& real, const Pose& ref, const Action& u_r, const FollowerParams& params);

/// control_unclamped saturated to the action space.
Action control(const Pose& real, const Pose& ref, const Action& u_r, const FollowerParams& params,
               const ActionSpace& space);

struct Reference {
  Pose pose;
  Action u_r;
  std::size_t index = 0;  // nearest trace point
};

/// Nearest trace point to the robot (lowest index on ties) gives the
/// reference pose; the reference action is read lookahead_steps further
/// along, saturating at the end. Past the final point the action is zero.
/// Throws std::invalid_argument on an empty trace.
Reference reference_lookup(std::span<const TracePoint> trace, const Pose& real, const FollowerParams& params);
Reference reference_lookup(const PlannedPath& path, const Pose& real, const FollowerParams& params);

}  // namespace gvo_nav

#endif  // GVO_NAV_FOLLOWER_HPP_
