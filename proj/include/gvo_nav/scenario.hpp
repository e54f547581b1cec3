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

#ifndef GVO_NAV_SCENARIO_HPP_
#define GVO_NAV_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "gvo_nav/avoidance.hpp"
#include "gvo_nav/follower.hpp"
#include "gvo_nav/perception.hpp"
#include "gvo_nav/planner.hpp"
#include "gvo_nav/simulator.hpp"
#include "gvo_nav/tracking.hpp"

namespace gvo_nav {

enum class Method { kGvoOnly, kGvoRrt };

std::string_view method_name(Method m);  // "gvo" / "gvo-rrt"
/// Accepts "gvo", "gvo-rrt", "GVO_ONLY", "GVO_RRT". Throws std::invalid_argument.
Method parse_method(std::string_view text);

enum class TrackSeeding { kGroundTruth, kMotion };

/// Every tunable of the navigation stack in one place.
struct NavConfig {
  ActionSpace space;
  AvoidParams avoid;
  PlanParams plan;
  FollowerParams follower;
  TrackingParams tracking;
  ClusteringParams clustering;
  ClassifyParams classify;
  LidarParams lidar;

  double dt = 0.05;
  double goal_tol = 0.3;
  double robot_radius = 0.2;
  /// Goal-directed reference for the GVO-only method.
  double gvo_only_speed_ratio = 0.5;
  double gvo_only_heading_gain = 1.5;
  TrackSeeding track_seeding = TrackSeeding::kGroundTruth;
  /// Largest cluster radius that may seed a track in motion mode.
  double max_person_radius = 0.5;
  /// Cell size used to de-duplicate accumulated static map points.
  double map_cell = 0.05;
  double replan_cooldown = 1.0;
  int max_replans = 20;

  NavConfig();
  void validate() const;
};

struct PedestrianSpec {
  Pedestrian pedestrian;
  /// Per-seed uniform perturbations (half-widths).
  double speed_jitter = 0.0;
  double start_jitter = 0.0;
  double delay_jitter = 0.0;
};

struct Scenario {
  int schema_version = 1;
  std::string name;
  Bounds bounds;
  std::vector<Shape> static_shapes;
  std::vector<PedestrianSpec> pedestrians;
  Pose robot_start;
  Vec2 robot_goal;
  double timeout = 60.0;
  Method method = Method::kGvoRrt;
  std::uint64_t seed = 0;
  NavConfig config;
};

inline constexpr int kScenarioSchemaVersion = 1;

/// Malformed content or a violated invariant; `field` names the offending
/// JSON path when known.
class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(std::string field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// File missing or unreadable.
class ScenarioIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Scenario load_scenario(const std::filesystem::path& path);
Scenario parse_scenario(std::string_view text);
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

/// Throws ScenarioError naming the first violated invariant.
void validate_scenario(const Scenario& s);

}  // namespace gvo_nav

#endif  // GVO_NAV_SCENARIO_HPP_
