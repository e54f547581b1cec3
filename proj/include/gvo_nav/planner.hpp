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

// Two-phase informed RRT* over static obstacle points.
//
// Phase 1 grows an ordinary RRT* (goal-biased uniform samples over the
// planning bounds) at a quarter of the node density and yields the best cost
// c_best. Phase 2 starts a fresh tree seeded with the phase-1 solution chain
// and samples only inside the ellipse with foci start/goal and focal sum
// c_best, at full density. Both phases reject extensions and rewirings that
// fail the clearance or the heading-change test. The cheaper solution is
// splined and resampled into a dense reference trace.

#ifndef GVO_NAV_PLANNER_HPP_
#define GVO_NAV_PLANNER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gvo_nav/core.hpp"
#include "gvo_nav/perception.hpp"
#include "gvo_nav/spline.hpp"

namespace gvo_nav {

struct Bounds {
  Vec2 min;
  Vec2 max;

  double area() const { return (max.x - min.x) * (max.y - min.y); }
  bool contains(Vec2 p) const { return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y; }
};

struct PlanParams {
  double node_density = 8.0;           // nodes / m^2, phase 2
  double phase1_density_ratio = 0.25;  // phase-1 density = ratio * node_density
  double max_edge_len = 0.6;           // m
  double dis_th = 0.3;                 // m, required segment clearance
  double angle_th = kPi / 4.0;         // rad, max heading change at a node
  double goal_tol = 0.3;               // m
  std::uint64_t rng_seed = 0;
  double goal_bias = 0.1;  // phase-1 probability of sampling the goal
  /// Sampling region for phase 1; defaults to the start/goal box padded by 2 m.
  std::optional<Bounds> bounds;
  /// Hard cap on sampling iterations, as a multiple of the node budget.
  int iteration_factor = 30;
  double trace_spacing = 0.05;  // m
  SpeedProfile speed;
  /// Post-smoothing limit on the spline's curvature, 1/m.
  double max_curvature = 3.5;
  /// Heading threshold multiplier and clearance margin for the single retry
  /// after a failed post-smoothing check.
  double retry_angle_scale = 0.75;
  double retry_clearance_margin = 0.05;

  void validate() const;
};

struct PlannedPath {
  std::vector<Vec2> nodes;
  std::vector<TracePoint> spline_trace;
  /// Path length to the final tree node plus its remaining distance to the
  /// goal (the polyline length when the goal itself is the last node).
  double cost = 0.0;
};

enum class PlanStatus { kOk, kNoPath, kInvalidEndpoint, kSmoothingFailed };

std::string_view plan_status_name(PlanStatus s);

struct TreeSnapshot {
  std::vector<Vec2> nodes;
  std::vector<int> parents;  // -1 for the root
  std::vector<double> costs;
};

struct PlanDiagnostics {
  double c_min = 0.0;
  double c_best_phase1 = 0.0;
  double cost_phase2 = 0.0;
  int phase1_nodes = 0;
  int phase2_nodes = 0;
  int retries = 0;
  double angle_th_used = 0.0;
  double dis_th_used = 0.0;
  /// Every raw phase-2 sample (before steering).
  std::vector<Vec2> phase2_samples;
  TreeSnapshot phase1_tree;
  TreeSnapshot phase2_tree;
};

struct PlanResult {
  PlanStatus status = PlanStatus::kNoPath;
  std::optional<PlannedPath> path;
  PlanDiagnostics diagnostics;
  std::string message;

  bool ok() const { return status == PlanStatus::kOk; }
};

PlanResult plan(Vec2 start, Vec2 goal, std::span<const Cluster> statics, const PlanParams& params);

/// Maps a point of the closed unit disc into the informed ellipse:
/// R diag(c_best/2, sqrt(c_best^2 - c_min^2)/2) u + midpoint.
/// Throws std::invalid_argument when c_best < c_min.
Vec2 ellipse_point(Vec2 start, Vec2 goal, double c_best, Vec2 unit_disc_point);

/// ellipse_point of a uniform draw from the unit disc.
Vec2 sample_ellipse(Vec2 start, Vec2 goal, double c_best, Rng& rng);

/// True iff the wrapped heading change between a->b and b->c is below
/// angle_th. Coincident points give false.
bool curvature_ok(Vec2 a, Vec2 b, Vec2 c, double angle_th);

/// True iff every static point is farther than dis_th from the segment a-b.
bool segment_clear(Vec2 a, Vec2 b, std::span<const Cluster> statics, double dis_th);

/// Smallest distance from p to any static point (+inf when none).
double clearance_to(Vec2 p, std::span<const Cluster> statics);

}  // namespace gvo_nav

#endif  // GVO_NAV_PLANNER_HPP_
