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

// Episode orchestration: perceive, track, plan, follow or avoid, step.

#ifndef GVO_NAV_EPISODE_HPP_
#define GVO_NAV_EPISODE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gvo_nav/avoidance.hpp"
#include "gvo_nav/planner.hpp"
#include "gvo_nav/scenario.hpp"

namespace gvo_nav {

enum class ControlMode { kFollow, kAvoid, kStop };

std::string_view control_mode_name(ControlMode m);

/// World state after one control step and the command that produced it.
struct TraceRecord {
  int step = 0;
  double time = 0.0;
  Pose pose;
  Action command;
  ControlMode mode = ControlMode::kFollow;
  /// Verdict of the executed action: true when GVO found it free, or when
  /// avoidance was inactive.
  bool verdict_free = true;
  double clearance = 0.0;
  std::vector<Vec2> pedestrians;
};

struct DecisionRecord {
  int step = 0;
  Decision decision;
};

struct EpisodeOptions {
  bool record_decisions = false;
  bool record_plans = false;
};

struct EpisodeResult {
  bool success = false;
  bool collision = false;
  double completion_time = 0.0;
  /// Smallest signed gap between the robot and any obstacle over the trace.
  double min_clearance = 0.0;
  int replan_count = 0;
  std::string failure_reason;  // empty on success
  std::uint64_t seed = 0;
  Method method = Method::kGvoRrt;
  std::vector<TraceRecord> trace;
  std::vector<DecisionRecord> decisions;
  /// Every planner call (initial plan first), when requested.
  std::vector<PlanResult> plans;
};

/// Runs one episode of `scenario` with its own method and seed.
EpisodeResult run_episode(const Scenario& scenario, const EpisodeOptions& options = {});

/// The world at t = 0 for a given seed (pedestrian jitter applied).
World initial_world(const Scenario& scenario, std::uint64_t seed);

struct BatchSummary {
  int runs = 0;
  double success_rate = 0.0;
  /// Over successful runs only; empty when none succeeded.
  std::optional<double> mean_time;
  std::optional<double> std_time;
  std::vector<EpisodeResult> results;
};

/// Runs seeds seed .. seed + runs - 1. Episodes are independent; `jobs` > 1
/// runs them on that many threads without changing any result.
/// Throws std::invalid_argument when runs < 1.
BatchSummary run_batch(const Scenario& scenario, int runs, const EpisodeOptions& options = {}, int jobs = 1);

/// Aggregates already computed results (population std).
BatchSummary summarize(std::vector<EpisodeResult> results);

}  // namespace gvo_nav

#endif  // GVO_NAV_EPISODE_HPP_
