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

#ifndef GVO_NAV_SIMULATOR_HPP_
#define GVO_NAV_SIMULATOR_HPP_

#include <cstddef>
#include <variant>
#include <vector>

#include "gvo_nav/core.hpp"
#include "gvo_nav/kernels.hpp"
#include "gvo_nav/perception.hpp"

namespace gvo_nav {

/// Axis-aligned rectangle (walls and blocks).
struct Box {
  Vec2 min;
  Vec2 max;
};

struct Disc {
  Vec2 center;
  double radius = 0.0;
};

using Shape = std::variant<Box, Disc>;

/// Distance from p to the shape boundary, 0 inside the shape.
double distance_to_shape(Vec2 p, const Shape& shape);
bool shape_valid(const Shape& shape);

/// Scripted pedestrian walking through its waypoints at constant speed,
/// oblivious to the robot.
struct Pedestrian {
  Vec2 position;
  double speed = 1.0;
  std::vector<Vec2> waypoints;
  double radius = 0.3;
  /// Restart from the first waypoint after the last one.
  bool loop = false;
  /// Seconds to stand still before walking.
  double start_delay = 0.0;
  std::size_t next_waypoint = 0;
};

struct RobotBody {
  Pose pose;
  double radius = 0.2;
};

struct World {
  RobotBody robot;
  std::vector<Pedestrian> pedestrians;
  std::vector<Shape> static_shapes;
  double time = 0.0;
  double dt = 0.05;
};

struct LidarParams {
  double fov = 270.0 * kPi / 180.0;
  double angular_resolution = 0.33 * kPi / 180.0;
  double range_max = 10.0;
  double range_min = 0.05;
  double noise_std = 0.01;

  void validate() const;
};

/// Pedestrians switch to their next waypoint within this distance.
inline constexpr double kWaypointSwitchDistance = 0.2;

/// Advances the robot on the exact arc of `command` for dt, walks every
/// pedestrian toward its current waypoint and advances the clock.
World step(const World& world, const Action& command);

/// Index of the object a lidar ray hit.
inline constexpr int kStaticOwner = -1;

struct TaggedScan {
  std::vector<ScanPoint> points;
  /// kStaticOwner for static shapes, otherwise the pedestrian index.
  std::vector<int> owners;
  std::vector<double> ranges;
  std::vector<double> bearings;  // robot frame
};

/// Rays at k * angular_resolution for |k| <= floor(fov / 2 / resolution);
/// nearest hit within [range_min, range_max] plus Gaussian range noise.
TaggedScan simulate_tagged_scan(const World& world, const LidarParams& params, Rng& rng);
std::vector<ScanPoint> simulate_scan(const World& world, const LidarParams& params, Rng& rng);

/// Range along a ray to the nearest shape or pedestrian boundary (+inf when
/// nothing is hit). Exposed for tests.
double cast_ray(const World& world, Vec2 origin, double bearing, int* owner = nullptr);

/// True iff the robot center lies within robot radius of a static shape or
/// within robot radius + pedestrian radius of a pedestrian center.
bool check_collision(const World& world);

/// Signed gap between the robot disc and the nearest obstacle (negative on
/// overlap); +inf in an empty world.
double clearance(const World& world);

/// Boundary points of the static shapes every `spacing` meters.
kernels::PointCloud rasterize_shapes(const std::vector<Shape>& shapes, double spacing);

}  // namespace gvo_nav

#endif  // GVO_NAV_SIMULATOR_HPP_
