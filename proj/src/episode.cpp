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

#include "gvo_nav/episode.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <thread>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gvo_nav/follower.hpp"
#include "gvo_nav/kernels.hpp"
#include "gvo_nav/perception.hpp"
#include "gvo_nav/simulator.hpp"
#include "gvo_nav/tracking.hpp"

namespace gvo_nav {

namespace {

// Independent generator streams per episode seed.
enum Stream : std::uint64_t { kJitter = 1, kLidar = 2, kAvoid = 3, kPlan = 16 };

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return seed * 0x9E3779B97F4A7C15ULL + stream * 0xD1B54A32D192ED03ULL;
}

struct PointKeyHash {
  std::size_t operator()(const std::pair<std::uint64_t, std::uint64_t>& k) const {
    return std::hash<std::uint64_t>{}(k.first * 0x9E3779B97F4A7C15ULL ^ k.second);
  }
};

using PointKey = std::pair<std::uint64_t, std::uint64_t>;

PointKey key_of(double x, double y) { return {std::bit_cast<std::uint64_t>(x), std::bit_cast<std::uint64_t>(y)}; }

// Static points seen so far, de-duplicated on a square grid.
class StaticMap {
 public:
  explicit StaticMap(double cell) : cell_(cell) {}

  // Returns the number of points actually added.
  std::size_t add(const Cluster& c) {
    std::size_t added = 0;
    for (const ScanPoint& p : c.points()) {
      const auto ix = static_cast<std::int64_t>(std::floor(p.x / cell_));
      const auto iy = static_cast<std::int64_t>(std::floor(p.y / cell_));
      const auto key = static_cast<std::uint64_t>(ix) * 0x100000001B3ULL ^ static_cast<std::uint64_t>(iy);
      if (!cells_.insert(key).second) continue;
      points_.push_back({p.x, p.y, p.timestamp});
      cloud_.push_back({p.x, p.y});
      ++added;
    }
    return added;
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<ScanPoint>& points() const { return points_; }
  Vec2 operator[](std::size_t i) const { return cloud_[i]; }

 private:
  double cell_;
  std::unordered_set<std::uint64_t> cells_;
  std::vector<ScanPoint> points_;
  kernels::PointCloud cloud_;
};

constexpr double kStalledReference = 1e-3;

Action goal_directed_action(const Pose& pose, Vec2 goal, const NavConfig& cfg) {
  const double bearing = std::atan2(goal.y - pose.y, goal.x - pose.x);
  const double error = wrap_angle(bearing - pose.theta);
  return cfg.space.clamp({cfg.gvo_only_speed_ratio * cfg.space.v_max, cfg.gvo_only_heading_gain * error});
}

bool obstacle_within(const Pose& pose, std::span<const Cluster> clusters, std::span<const Track> tracks,
                     double radius) {
  const Vec2 p = pose.position();
  for (const Track& t : tracks)
    if (distance(t.position(), p) <= radius) return true;
  const double r2 = radius * radius;
  for (const Cluster& c : clusters) {
    if (distance(c.centroid(), p) - c.radius() > radius) continue;
    if (kernels::min_dist_sq(c.cloud(), p.x, p.y) <= r2) return true;
  }
  return false;
}

class Episode {
 public:
  Episode(const Scenario& scenario, const EpisodeOptions& options)
      : scenario_(scenario),
        cfg_(scenario.config),
        options_(options),
        world_(initial_world(scenario, scenario.seed)),
        lidar_rng_(stream_seed(scenario.seed, kLidar)),
        avoid_rng_(stream_seed(scenario.seed, kAvoid)),
        tracker_(cfg_.tracking),
        map_(cfg_.map_cell) {
    result_.seed = scenario.seed;
    result_.method = scenario.method;
  }

  EpisodeResult run() {
    const auto max_steps = static_cast<int>(std::ceil(scenario_.timeout / cfg_.dt - 1e-9));
    result_.min_clearance = clearance(world_);
    bool finished = false;
    for (int step = 0; step < max_steps && !finished; ++step) finished = tick(step);
    if (!finished) fail("timeout");
    return std::move(result_);
  }

 private:
  // One perceive-decide-act cycle. Returns true when the episode ended.
  bool tick(int step) {
    const double now = world_.time;
    const Pose pose = world_.robot.pose;
    const TaggedScan scan = simulate_tagged_scan(world_, cfg_.lidar, lidar_rng_);
    std::vector<Cluster> clusters = cluster_scan(scan.points, cfg_.clustering).clusters;
    const std::vector<bool> person = person_flags(scan, clusters);

    tracker_.advance(now, observations(clusters, person));
    const auto& tracks = tracker_.tracks();
    const ObstacleSet obstacles = split_merged(classify_clusters(clusters, tracks, cfg_.classify), tracks);
    const std::size_t added = update_map(clusters, person, tracks);
    if (spdlog::should_log(spdlog::level::trace)) {
      for (const Cluster& c : obstacles.static_clusters)
        spdlog::trace("step {} static cluster c=({:.2f},{:.2f}) r={:.2f} n={}", step, c.centroid().x, c.centroid().y,
                      c.radius(), c.points().size());
      for (const Cluster& c : obstacles.dynamic_clusters)
        spdlog::trace("step {} dynamic cluster c=({:.2f},{:.2f}) r={:.2f} n={}", step, c.centroid().x,
                      c.centroid().y, c.radius(), c.points().size());
      for (const Track& t : tracks)
        spdlog::trace("step {} track {} p=({:.2f},{:.2f}) v=({:.2f},{:.2f})", step, t.id, t.position().x,
                      t.position().y, t.velocity().x, t.velocity().y);
    }

    Action u_star;
    if (scenario_.method == Method::kGvoRrt) {
      if (!path_ && !replan(now, true)) return true;
      if (added > 0) maybe_replan(now, pose, added);
      const Reference ref = reference_lookup(*path_, pose, cfg_.follower);
      if (ref.index + 1 >= path_->spline_trace.size() || ref.u_r.v < kStalledReference) {
        // At the tail of the trace but outside goal_tol: the reference speed
        // has run out there, so close the remaining gap goal-directed.
        u_star = goal_directed_action(pose, scenario_.robot_goal, cfg_);
      } else {
        u_star = control(pose, ref.pose, ref.u_r, cfg_.follower, cfg_.space);
      }
    } else {
      u_star = goal_directed_action(pose, scenario_.robot_goal, cfg_);
    }

    TraceRecord rec;
    rec.step = step;
    rec.command = u_star;
    rec.mode = ControlMode::kFollow;
    rec.verdict_free = true;
    if (obstacle_within(pose, obstacles.static_clusters, tracks, cfg_.avoid.dis_sta) ||
        obstacle_within(pose, obstacles.dynamic_clusters, {}, cfg_.avoid.dis_sta)) {
      Decision d = select_action(u_star, pose, obstacles.static_clusters, tracks, cfg_.space, cfg_.avoid, avoid_rng_);
      rec.command = d.action;
      rec.mode = d.kind == DecisionKind::kStop ? ControlMode::kStop : ControlMode::kAvoid;
      rec.verdict_free = d.kind == DecisionKind::kAccepted;
      if (options_.record_decisions) result_.decisions.push_back({step, std::move(d)});
    }
    prev_clusters_ = std::move(clusters);

    world_ = step_world(rec.command);
    rec.time = world_.time;
    rec.pose = world_.robot.pose;
    rec.clearance = clearance(world_);
    for (const Pedestrian& p : world_.pedestrians) rec.pedestrians.push_back(p.position);
    result_.min_clearance = std::min(result_.min_clearance, rec.clearance);
    result_.trace.push_back(std::move(rec));

    if (check_collision(world_)) {
      result_.collision = true;
      fail(fmt::format("collision with {} at t={:.2f}", collided_with(), world_.time));
      return true;
    }
    if (distance(world_.robot.pose.position(), scenario_.robot_goal) <= cfg_.goal_tol) {
      result_.success = true;
      result_.completion_time = world_.time;
      return true;
    }
    return false;
  }

  World step_world(const Action& command) const { return step(world_, command); }

  std::string collided_with() const {
    const Vec2 c = world_.robot.pose.position();
    for (std::size_t i = 0; i < world_.pedestrians.size(); ++i) {
      const Pedestrian& p = world_.pedestrians[i];
      if (distance(c, p.position) < world_.robot.radius + p.radius) return fmt::format("pedestrian {}", i);
    }
    for (std::size_t i = 0; i < world_.static_shapes.size(); ++i)
      if (distance_to_shape(c, world_.static_shapes[i]) < world_.robot.radius) return fmt::format("shape {}", i);
    return "unknown";
  }

  // Cluster membership of scan points by simulator ownership, used only to
  // seed tracks in ground-truth mode and to keep people out of the map.
  std::vector<bool> person_flags(const TaggedScan& scan, const std::vector<Cluster>& clusters) const {
    std::vector<bool> flags(clusters.size(), false);
    if (cfg_.track_seeding != TrackSeeding::kGroundTruth) return flags;
    std::unordered_map<PointKey, int, PointKeyHash> owner;
    owner.reserve(scan.points.size());
    for (std::size_t i = 0; i < scan.points.size(); ++i)
      owner.emplace(key_of(scan.points[i].x, scan.points[i].y), scan.owners[i]);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      std::size_t people = 0;
      for (const ScanPoint& p : clusters[c].points()) {
        const auto it = owner.find(key_of(p.x, p.y));
        if (it != owner.end() && it->second != kStaticOwner) ++people;
      }
      flags[c] = 2 * people > clusters[c].points().size();
    }
    return flags;
  }

  // A person walking past a wall can merge with it into one cluster; the
  // points away from the matched track go back to the static set.
  ObstacleSet split_merged(ObstacleSet set, std::span<const Track> tracks) const {
    for (std::size_t i = 0; i < set.dynamic_clusters.size(); ++i) {
      const Cluster& c = set.dynamic_clusters[i];
      if (c.radius() <= cfg_.max_person_radius) continue;
      const Track& t = tracks[set.dynamic_track_index[i]];
      const double lead = std::max(0.0, c.timestamp() - t.last_update);
      const Vec2 at = t.position() + lead * t.velocity();
      std::vector<ScanPoint> person, rest;
      for (const ScanPoint& p : c.points())
        (distance({p.x, p.y}, at) <= cfg_.max_person_radius ? person : rest).push_back(p);
      if (rest.empty()) continue;
      set.static_clusters.push_back(Cluster::from_points(std::move(rest)));
      if (!person.empty()) set.dynamic_clusters[i] = Cluster::from_points(std::move(person));
    }
    return set;
  }

  std::vector<Vec2> observations(const std::vector<Cluster>& clusters, const std::vector<bool>& person) const {
    std::vector<Vec2> obs;
    if (cfg_.track_seeding == TrackSeeding::kGroundTruth) {
      for (std::size_t c = 0; c < clusters.size(); ++c)
        if (person[c]) obs.push_back(clusters[c].centroid());
      return obs;
    }
    std::vector<bool> take(clusters.size(), false);
    for (std::size_t i :
         moving_clusters(prev_clusters_, clusters, cfg_.dt, cfg_.classify, cfg_.max_person_radius))
      take[i] = true;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (clusters[c].radius() > cfg_.max_person_radius) continue;
      for (const Track& t : tracker_.tracks())
        if (distance(t.position(), clusters[c].centroid()) <= cfg_.tracking.gate) take[c] = true;
    }
    for (std::size_t c = 0; c < clusters.size(); ++c)
      if (take[c]) obs.push_back(clusters[c].centroid());
    return obs;
  }

  std::size_t update_map(const std::vector<Cluster>& clusters, const std::vector<bool>& person,
                         std::span<const Track> tracks) {
    std::size_t added = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      if (person[c]) continue;
      bool near_track = false;
      for (const Track& t : tracks)
        if (distance(t.position(), clusters[c].centroid()) <= cfg_.classify.gate) near_track = true;
      if (!near_track) added += map_.add(clusters[c]);
    }
    return added;
  }

  // Re-plans when a static point added this step lies within dis_th of the
  // trace still ahead of the robot.
  void maybe_replan(double now, const Pose& pose, std::size_t added) {
    if (!pending_replan_) {
      const std::size_t from = reference_lookup(*path_, pose, cfg_.follower).index;
      const kernels::PointsView ahead{std::span<const double>(trace_xs_).subspan(from),
                                      std::span<const double>(trace_ys_).subspan(from)};
      const double th2 = cfg_.plan.dis_th * cfg_.plan.dis_th;
      for (std::size_t i = map_.size() - added; i < map_.size() && !pending_replan_; ++i) {
        const Vec2 p = map_[i];
        if (kernels::min_dist_sq(ahead, p.x, p.y) < th2) pending_replan_ = true;
      }
    }
    if (pending_replan_ && now - last_plan_time_ >= cfg_.replan_cooldown &&
        result_.replan_count < cfg_.max_replans)
      replan(now, false);
  }

  // Plans from the current pose over the accumulated map. On the initial call
  // a failure ends the episode.
  bool replan(double now, bool initial) {
    std::vector<Cluster> statics = cluster_scan(map_.points(), cfg_.clustering).clusters;
    PlanParams params = cfg_.plan;
    params.bounds = scenario_.bounds;
    params.rng_seed = stream_seed(scenario_.seed, kPlan + plan_calls_++);
    PlanResult res = plan(world_.robot.pose.position(), scenario_.robot_goal, statics, params);
    last_plan_time_ = now;
    const bool ok = res.ok();
    if (ok) {
      path_ = *res.path;
      trace_xs_.clear();
      trace_ys_.clear();
      for (const TracePoint& tp : path_->spline_trace) {
        trace_xs_.push_back(tp.pose.x);
        trace_ys_.push_back(tp.pose.y);
      }
      pending_replan_ = false;
      if (!initial) ++result_.replan_count;
    } else if (initial) {
      fail(fmt::format("planner: {}: {}", plan_status_name(res.status), res.message));
    } else {
      spdlog::debug("re-plan at t={:.2f} failed ({}); keeping the current path", now,
                    plan_status_name(res.status));
    }
    if (options_.record_plans) result_.plans.push_back(std::move(res));
    return ok;
  }

  void fail(std::string reason) {
    result_.success = false;
    result_.failure_reason = std::move(reason);
  }

  const Scenario& scenario_;
  const NavConfig& cfg_;
  EpisodeOptions options_;
  World world_;
  Rng lidar_rng_;
  Rng avoid_rng_;
  Tracker tracker_;
  StaticMap map_;
  std::vector<Cluster> prev_clusters_;
  std::optional<PlannedPath> path_;
  std::vector<double> trace_xs_;
  std::vector<double> trace_ys_;
  bool pending_replan_ = false;
  double last_plan_time_ = -std::numeric_limits<double>::infinity();
  std::uint64_t plan_calls_ = 0;
  EpisodeResult result_;
};

}  // namespace

std::string_view control_mode_name(ControlMode m) {
  switch (m) {
    case ControlMode::kFollow:
      return "follow";
    case ControlMode::kAvoid:
      return "avoid";
    case ControlMode::kStop:
      return "stop";
  }
  return "unknown";
}

World initial_world(const Scenario& scenario, std::uint64_t seed) {
  World w;
  w.robot.pose = scenario.robot_start;
  w.robot.radius = scenario.config.robot_radius;
  w.static_shapes = scenario.static_shapes;
  w.dt = scenario.config.dt;
  Rng rng(stream_seed(seed, kJitter));
  for (const PedestrianSpec& spec : scenario.pedestrians) {
    Pedestrian p = spec.pedestrian;
    // Four draws per pedestrian whatever the jitter widths, so one
    // pedestrian's settings never shift another's stream.
    const double ds = rng.uniform(-1.0, 1.0);
    const double dx = rng.uniform(-1.0, 1.0);
    const double dy = rng.uniform(-1.0, 1.0);
    const double dd = rng.uniform(-1.0, 1.0);
    p.speed = std::max(0.0, p.speed + spec.speed_jitter * ds);
    p.position = p.position + Vec2{spec.start_jitter * dx, spec.start_jitter * dy};
    p.start_delay = std::max(0.0, p.start_delay + spec.delay_jitter * dd);
    w.pedestrians.push_back(std::move(p));
  }
  return w;
}

EpisodeResult run_episode(const Scenario& scenario, const EpisodeOptions& options) {
  validate_scenario(scenario);
  return Episode(scenario, options).run();
}

BatchSummary summarize(std::vector<EpisodeResult> results) {
  BatchSummary s;
  s.runs = static_cast<int>(results.size());
  std::vector<double> times;
  for (const EpisodeResult& r : results)
    if (r.success) times.push_back(r.completion_time);
  s.success_rate = s.runs > 0 ? static_cast<double>(times.size()) / s.runs : 0.0;
  if (!times.empty()) {
    double mean = 0.0;
    for (double t : times) mean += t;
    mean /= static_cast<double>(times.size());
    double var = 0.0;
    for (double t : times) var += (t - mean) * (t - mean);
    var /= static_cast<double>(times.size());
    s.mean_time = mean;
    s.std_time = std::sqrt(var);
  }
  s.results = std::move(results);
  return s;
}

BatchSummary run_batch(const Scenario& scenario, int runs, const EpisodeOptions& options, int jobs) {
  if (runs < 1) throw std::invalid_argument("run_batch: runs must be >= 1");
  validate_scenario(scenario);
  std::vector<EpisodeResult> results(static_cast<std::size_t>(runs));
  auto run_one = [&](int i) {
    Scenario s = scenario;
    s.seed = scenario.seed + static_cast<std::uint64_t>(i);
    results[static_cast<std::size_t>(i)] = Episode(s, options).run();
    spdlog::info("{} seed {}: {}", method_name(s.method), s.seed,
                 results[static_cast<std::size_t>(i)].success
                     ? fmt::format("success in {:.2f} s", results[static_cast<std::size_t>(i)].completion_time)
                     : results[static_cast<std::size_t>(i)].failure_reason);
  };
  const int workers = std::clamp(jobs, 1, runs);
  if (workers == 1) {
    for (int i = 0; i < runs; ++i) run_one(i);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (int i = next++; i < runs; i = next++) run_one(i);
      });
  }
  return summarize(std::move(results));
}

}  // namespace gvo_nav
