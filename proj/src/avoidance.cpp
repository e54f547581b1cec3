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

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace gvo_nav {

void AvoidParams::validate() const {
  if (!(delta_t > 0.0)) throw std::invalid_argument("AvoidParams: delta_t must be > 0");
  if (!(delta_t < t_c_th)) throw std::invalid_argument("AvoidParams: delta_t must be < t_c_th");
  if (!(t_c_th <= std::min(t_s_th, t_d_th))) {
    throw std::invalid_argument("AvoidParams: t_c_th must be <= min(t_s_th, t_d_th)");
  }
  if (!(p_th > 0.0 && p_th < 1.0)) throw std::invalid_argument("AvoidParams: p_th must be in (0, 1)");
  if (!(radius_robot > 0.0)) throw std::invalid_argument("AvoidParams: radius_robot must be > 0");
  if (!(dis_sta > 0.0)) throw std::invalid_argument("AvoidParams: dis_sta must be > 0");
  if (n_samples < 1) throw std::invalid_argument("AvoidParams: n_samples must be >= 1");
  if (!(omega_weight >= 0.0)) throw std::invalid_argument("AvoidParams: omega_weight must be >= 0");
  if (hard_floor && !(radius_human >= 0.0)) throw std::invalid_argument("AvoidParams: radius_human must be >= 0");
}

namespace {

std::size_t steps(double horizon, double delta_t) {
  return static_cast<std::size_t>(std::floor(horizon / delta_t + 1e-9));
}

StaticVerdict sweep_static(std::span<const Vec2> centers, std::size_t k_end, kernels::PointsView statics,
                           const AvoidParams& params) {
  StaticVerdict out{false, params.t_s_th, params.t_s_th, std::numeric_limits<double>::infinity()};
  if (statics.empty()) return out;
  std::vector<double> dist(k_end + 1);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_k = 0;
  for (std::size_t k = 0; k <= k_end; ++k) {
    dist[k] = std::sqrt(kernels::min_dist_sq(statics, centers[k].x, centers[k].y));
    if (dist[k] < best) {
      best = dist[k];
      best_k = k;
    }
  }
  out.min_distance = best;
  const double threshold = params.escape_inside ? std::min(params.radius_robot, dist[0]) : params.radius_robot;
  if (best < threshold) {
    out.hit = true;
    out.t_min = static_cast<double>(best_k) * params.delta_t;
    std::size_t first = 0;
    while (!(dist[first] < threshold)) ++first;
    out.t_hit = static_cast<double>(first) * params.delta_t;
  }
  return out;
}

// Predicted pedestrian distribution on the time grid, shared by all candidates.
struct TrackSweep {
  std::vector<Vec2> means;
  std::vector<PredictionEvaluator> evals;
};

TrackSweep make_sweep(const Track& track, std::size_t k_end, const AvoidParams& params) {
  TrackSweep s;
  s.means.reserve(k_end + 1);
  s.evals.reserve(k_end + 1);
  for (std::size_t k = 0; k <= k_end; ++k) {
    const GaussianPrediction g =
        predict_distribution(track, static_cast<double>(k) * params.delta_t, params.velocity_cov_prior);
    s.means.push_back({g.mean(0), g.mean(1)});
    s.evals.emplace_back(g);
  }
  return s;
}

DynamicVerdict sweep_dynamic(std::span<const Vec2> centers, const TrackSweep& sweep, const AvoidParams& params) {
  double p_threshold = params.p_th;
  double floor_dist = params.radius_robot + params.radius_human;
  if (params.escape_inside && !sweep.means.empty()) {
    p_threshold = std::max(p_threshold, sweep.evals[0].normalized_pdf(centers[0]));
    floor_dist = std::min(floor_dist, distance(centers[0], sweep.means[0]));
  }
  for (std::size_t k = 0; k < sweep.means.size(); ++k) {
    const bool prob_hit = sweep.evals[k].normalized_pdf(centers[k]) > p_threshold;
    const bool floor_hit = params.hard_floor && distance(centers[k], sweep.means[k]) < floor_dist;
    if (prob_hit || floor_hit) return {true, static_cast<double>(k) * params.delta_t};
  }
  return {false, params.t_d_th};
}

ActionVerdict combine(const Action& action, const StaticVerdict& sv, std::span<const DynamicVerdict> dvs,
                      const AvoidParams& params) {
  ActionVerdict v{action, true, params.horizon()};
  double t_min = std::numeric_limits<double>::infinity();
  if (sv.hit) t_min = std::min(t_min, sv.t_hit);
  for (const DynamicVerdict& d : dvs) {
    if (d.hit) t_min = std::min(t_min, d.t_hit);
  }
  if (std::isfinite(t_min)) {
    v.free = false;
    v.t_min = t_min;
  }
  return v;
}

// Turn rate that rotates the heading away from the nearest static point or
// track mean; none when there is nothing to turn from.
std::optional<double> turn_away(const Pose& robot, const kernels::PointCloud& statics, std::span<const Track> tracks,
                                double omega_max) {
  const Vec2 p = robot.position();
  std::optional<Vec2> nearest;
  double best = std::numeric_limits<double>::infinity();
  const auto consider = [&](Vec2 q) {
    const double d = distance(q, p);
    if (d < best) {
      best = d;
      nearest = q;
    }
  };
  for (std::size_t i = 0; i < statics.size(); ++i) consider(statics[i]);
  for (const Track& t : tracks) consider(t.position());
  if (!nearest) return std::nullopt;
  const double bearing = wrap_angle(std::atan2(nearest->y - p.y, nearest->x - p.x) - robot.theta);
  return bearing > 0.0 ? -omega_max : omega_max;
}

}  // namespace

std::vector<Vec2> arc_samples(const Pose& robot, const Action& action, double horizon, double delta_t) {
  const std::size_t k_end = steps(horizon, delta_t);
  std::vector<Vec2> out;
  out.reserve(k_end + 1);
  for (std::size_t k = 0; k <= k_end; ++k) {
    out.push_back(propagate_arc(robot, action, static_cast<double>(k) * delta_t).position());
  }
  return out;
}

StaticVerdict static_conflict(const Action& action, const Pose& robot, kernels::PointsView statics,
                              const AvoidParams& params) {
  const std::vector<Vec2> centers = arc_samples(robot, action, params.t_s_th, params.delta_t);
  return sweep_static(centers, centers.size() - 1, statics, params);
}

StaticVerdict static_conflict(const Action& action, const Pose& robot, std::span<const Cluster> statics,
                              const AvoidParams& params) {
  const kernels::PointCloud cloud = merge_clouds(statics);
  return static_conflict(action, robot, cloud.view(), params);
}

DynamicVerdict dynamic_conflict(const Action& action, const Pose& robot, const Track& track,
                                const AvoidParams& params) {
  const std::vector<Vec2> centers = arc_samples(robot, action, params.t_d_th, params.delta_t);
  return sweep_dynamic(centers, make_sweep(track, centers.size() - 1, params), params);
}

ActionVerdict evaluate_action(const Action& action, const Pose& robot, kernels::PointsView statics,
                              std::span<const Track> tracks, const AvoidParams& params) {
  const StaticVerdict sv = static_conflict(action, robot, statics, params);
  std::vector<DynamicVerdict> dvs;
  for (const Track& t : tracks) dvs.push_back(dynamic_conflict(action, robot, t, params));
  return combine(action, sv, dvs, params);
}

Decision select_action(const Action& u_star, const Pose& robot, std::span<const Cluster> statics,
                       std::span<const Track> tracks, const ActionSpace& space, const AvoidParams& params,
                       Rng& rng) {
  params.validate();
  kernels::PointCloud near_cloud;
  for (const Cluster& c : statics) {
    if (c.nearest_distance(robot.position()) > params.dis_sta) continue;
    for (const ScanPoint& p : c.points()) near_cloud.push_back(p.position());
  }

  const std::size_t ks = steps(params.t_s_th, params.delta_t);
  const std::size_t kd = steps(params.t_d_th, params.delta_t);
  std::vector<TrackSweep> sweeps;
  sweeps.reserve(tracks.size());
  for (const Track& t : tracks) sweeps.push_back(make_sweep(t, kd, params));

  Decision d;
  d.candidates.reserve(static_cast<std::size_t>(params.n_samples) + 1);
  std::vector<Action> actions;
  actions.push_back(space.clamp(u_star));
  for (int i = 1; i < params.n_samples; ++i) {
    const double v = rng.uniform(space.v_min, space.v_max);
    const double w = rng.uniform(-space.omega_max, space.omega_max);
    actions.push_back({v, w});
  }
  if (params.turn_in_place) {
    if (const auto w = turn_away(robot, near_cloud, tracks, space.omega_max)) actions.push_back({0.0, *w});
  }

  std::vector<DynamicVerdict> dvs(tracks.size());
  for (const Action& a : actions) {
    const std::vector<Vec2> centers = arc_samples(robot, a, params.horizon(), params.delta_t);
    const StaticVerdict sv = sweep_static(centers, ks, near_cloud.view(), params);
    for (std::size_t j = 0; j < sweeps.size(); ++j) dvs[j] = sweep_dynamic(centers, sweeps[j], params);
    d.candidates.push_back(combine(a, sv, dvs, params));
  }

  // Ordered reductions; the lowest index wins ties.
  std::optional<std::size_t> best_free;
  double best_cost = std::numeric_limits<double>::infinity();
  std::size_t latest = 0;
  for (std::size_t i = 0; i < d.candidates.size(); ++i) {
    const ActionVerdict& c = d.candidates[i];
    if (c.free) {
      const double dv = c.action.v - actions[0].v;
      const double dw = params.omega_weight * (c.action.omega - actions[0].omega);
      const double cost = std::sqrt(dv * dv + dw * dw);
      if (cost < best_cost) {
        best_cost = cost;
        best_free = i;
      }
    } else if (c.t_min > d.candidates[latest].t_min || d.candidates[latest].free) {
      latest = i;
    }
  }
  if (best_free) {
    d.chosen = *best_free;
    d.action = d.candidates[d.chosen].action;
    d.kind = DecisionKind::kAccepted;
  } else if (d.candidates[latest].t_min < params.t_c_th) {
    d.chosen = latest;
    d.action = {0.0, 0.0};
    d.kind = DecisionKind::kStop;
  } else {
    d.chosen = latest;
    d.action = d.candidates[latest].action;
    d.kind = DecisionKind::kFallback;
  }
  return d;
}

}  // namespace gvo_nav
