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

#ifndef GVO_NAV_SPLINE_HPP_
#define GVO_NAV_SPLINE_HPP_

#include <span>
#include <vector>

#include "gvo_nav/core.hpp"

namespace gvo_nav {

/// Natural cubic spline through 2D nodes, parameterized by cumulative chord
/// length. Two nodes give a straight segment.
class CubicSpline2D {
 public:
  /// Requires >= 2 nodes with no two consecutive nodes coincident.
  explicit CubicSpline2D(std::span<const Vec2> nodes);

  double max_param() const { return knots_.back(); }
  const std::vector<double>& knots() const { return knots_; }

  Vec2 position(double u) const;
  Vec2 first_derivative(double u) const;
  Vec2 second_derivative(double u) const;
  /// Signed curvature (positive = turning left).
  double curvature(double u) const;

 private:
  std::size_t segment(double u) const;

  std::vector<double> knots_;
  std::vector<Vec2> values_;
  std::vector<Vec2> second_;  // second derivatives at knots
};

/// Reference speed along the trace: ramps up from v_start with `accel`,
/// cruises at v_cruise and ramps down to zero at the end.
struct SpeedProfile {
  double v_cruise = 0.8;
  double accel = 1.0;
  double v_start = 0.1;

  double speed_at(double s, double length) const;
};

struct TracePoint {
  Pose pose;
  Action ref_action;
  double s = 0.0;          // arc length from the first trace point, m
  double curvature = 0.0;  // 1/m
};

/// Fits the spline through `nodes`, resamples it every `spacing` meters of
/// arc length (last point at the final node), and attaches tangent heading
/// and reference action (v from the profile, omega = v * curvature).
std::vector<TracePoint> smooth(std::span<const Vec2> nodes, double spacing, const SpeedProfile& profile = {});

}  // namespace gvo_nav

#endif  // GVO_NAV_SPLINE_HPP_
