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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "gvo_nav/avoidance.hpp"
#include "gvo_nav/core.hpp"
#include "gvo_nav/episode.hpp"
#include "gvo_nav/follower.hpp"
#include "gvo_nav/planner.hpp"
#include "gvo_nav/scenario.hpp"
#include "gvo_nav/simulator.hpp"
#include "gvo_nav/trace_io.hpp"
#include "gvo_nav/tracking.hpp"
#include "support/oracles.hpp"

namespace gvo_nav {
namespace {

const std::filesystem::path kScenarioDir = GVO_NAV_SCENARIO_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_s;
  std::function<Outcome()> body;
};

int worker_count() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

Outcome kinematics() {
  double pos_err = 0.0, head_err = 0.0;
  for (double v : {0.0, 0.4, 0.8, 1.6}) {
    for (double w : {-kPi, -1.0, -1e-5, 0.0, 1e-5, 1.0, kPi}) {
      for (double t : {0.1, 1.0, 2.0}) {
        const Pose start(0.3, -0.7, 0.9);
        const Pose p = propagate_arc(start, {v, w}, t);
        const oracle::State s = oracle::rk4({start.x, start.y, start.theta}, v, w, t, 20000);
        pos_err = std::max(pos_err, std::hypot(p.x - s.x, p.y - s.y));
        head_err = std::max(head_err, std::abs(oracle::wrap(p.theta - s.theta)));
      }
    }
  }
  return {pos_err < 1e-6 && head_err < 1e-9,
          fmt::format("max position error {:.2e} m (< 1e-6), max heading error {:.2e} rad (< 1e-9)", pos_err,
                      head_err)};
}

Outcome controller() {
  FollowerParams params;
  params.xi = 0.9;
  params.g = 10.0;
  const ActionSpace space;
  const double dt = 0.01, v_ref = 0.5;
  Pose real(0.0, 0.3, 0.0);
  std::vector<double> err;
  for (int k = 0; k <= 1000; ++k) {
    const Pose ref(v_ref * k * dt, 0.0, 0.0);
    const TrackingError e = tracking_error(real, ref);
    err.push_back(std::hypot(e.e1, e.e2));
    real = propagate_arc(real, control(real, ref, {v_ref, 0.0}, params, space), dt);
  }
  std::size_t settled = err.size();
  for (std::size_t k = 0; k < err.size(); ++k) {
    if (err[k] < 0.05) {
      settled = k;
      break;
    }
  }
  const double t_settle = settled < err.size() ? settled * dt : std::numeric_limits<double>::infinity();
  // Non-increasing up to 1 mm of ringing about the running minimum.
  double lowest = settled < err.size() ? err[settled] : 0.0, rise = 0.0;
  for (std::size_t k = settled + 1; k < err.size(); ++k) {
    rise = std::max(rise, err[k] - lowest);
    lowest = std::min(lowest, err[k]);
  }
  bool exact = true;
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> d(-3.0, 3.0);
  for (int i = 0; i < 1000; ++i) {
    const Pose p(d(gen), d(gen), d(gen));
    const Action u{d(gen), d(gen)};
    const Action out = control_unclamped(p, p, u, params);
    exact = exact && out.v == u.v && out.omega == u.omega;
  }
  return {t_settle <= 5.0 && rise <= 1e-3 && exact,
          fmt::format("error < 0.05 m at t={:.2f} s (<= 5), max rise after settling {:.2e} m (<= 1e-3), "
                      "zero-error pass-through {}",
                      t_settle, rise, exact ? "exact" : "NOT exact")};
}

Outcome planner() {
  std::mt19937_64 gen(2024);
  PlanParams params;
  params.bounds = Bounds{{0.0, 0.0}, {8.0, 8.0}};
  const int worlds = 100;
  int solved = 0, audit_failures = 0;
  for (int w = 0; w < worlds; ++w) {
    const oracle::DiscWorld world = oracle::random_disc_world(gen, 8.0, 10, 0.3, 0.6, params.dis_th + 0.05);
    std::vector<Cluster> clusters;
    std::vector<Vec2> all;
    for (const Disc& disc : world.discs) {
      std::vector<ScanPoint> pts;
      for (const Vec2& p : oracle::disc_boundary(disc, 0.05)) {
        pts.push_back({p.x, p.y, 0.0});
        all.push_back(p);
      }
      clusters.push_back(Cluster::from_points(std::move(pts)));
    }
    params.rng_seed = static_cast<std::uint64_t>(w);
    const PlanResult r = plan(world.start, world.goal, clusters, params);
    if (!r.ok()) {
      spdlog::info("planner world {}: {} ({})", w, plan_status_name(r.status), r.message);
      continue;
    }
    ++solved;
    const oracle::PathAudit a = oracle::audit_path(r, world.start, world.goal, all, params);
    if (!a.ok()) {
      ++audit_failures;
      spdlog::warn("planner world {} audit: clearance {} heading {} edge {} cost {} focal {} endpoints {}", w,
                   a.clearance, a.heading, a.edge_length, a.cost, a.focal_sum, a.endpoints);
    }
  }
  const double rate = static_cast<double>(solved) / worlds;
  return {rate >= 0.95 && audit_failures == 0,
          fmt::format("solved {}/{} ({:.0f}% >= 95%), post-hoc audit failures {}", solved, worlds, 100.0 * rate,
                      audit_failures)};
}

Track pedestrian_track() {
  Track t;
  t.mean << 2.5, -1.0, -0.6, 0.5;
  t.covariance = Eigen::Matrix4d::Zero();
  t.covariance.topLeftCorner<2, 2>() << 0.01, 0.002, 0.002, 0.008;
  t.covariance.bottomRightCorner<2, 2>() << 0.004, -0.001, -0.001, 0.005;
  return t;
}

Outcome gvo_oracle() {
  const Pose robot(0.0, 0.0, 0.0);
  std::vector<Vec2> cluster;
  for (double y = 0.3; y <= 1.5 + 1e-9; y += 0.05) cluster.push_back({1.6, y});
  for (double x = 1.6; x <= 2.4 + 1e-9; x += 0.05) cluster.push_back({x, 1.5});
  kernels::PointCloud cloud;
  for (const Vec2& p : cluster) cloud.push_back(p);
  const std::vector<Track> tracks{pedestrian_track()};
  const ActionSpace space;
  std::string detail;
  bool pass = true;
  for (bool floor : {true, false}) {
    AvoidParams params;
    params.radius_robot = 0.3;
    params.hard_floor = floor;
    oracle::FineRules rules;
    rules.t_s_th = params.t_s_th;
    rules.t_d_th = params.t_d_th;
    rules.radius_robot = params.radius_robot;
    rules.p_th = params.p_th;
    rules.hard_floor = floor;
    rules.radius_human = params.radius_human;
    int compared = 0, banded = 0, mismatched = 0, free_count = 0;
    for (int i = 0; i <= 20; ++i) {
      for (int j = 0; j <= 20; ++j) {
        const Action a{space.v_min + (space.v_max - space.v_min) * i / 20.0,
                       -space.omega_max + 2.0 * space.omega_max * j / 20.0};
        const oracle::FineVerdict f = oracle::fine_verdict(robot, a, cluster, tracks, rules);
        const bool in_band =
            std::abs(f.min_static - rules.radius_robot) < 1e-2 || std::abs(f.peak_fd - rules.p_th) < 1e-3 ||
            (floor && std::abs(f.min_center - rules.radius_robot - rules.radius_human) < 1e-2);
        if (in_band) {
          ++banded;
          continue;
        }
        ++compared;
        const ActionVerdict v = evaluate_action(a, robot, cloud.view(), tracks, params);
        if (v.free) ++free_count;
        if (v.free != f.free) ++mismatched;
      }
    }
    pass = pass && mismatched == 0 && compared > 0;
    detail += fmt::format("{}hard_floor={}: {}/{} match, {} in bands, {} free", detail.empty() ? "" : "; ",
                          floor ? "on" : "off", compared - mismatched, compared, banded, free_count);
  }
  return {pass, detail};
}

Outcome prediction() {
  Track t;
  t.mean << 1.0, -2.0, 0.7, 0.4;
  t.covariance = Eigen::Matrix4d::Zero();
  t.covariance.topLeftCorner<2, 2>() << 0.04, 0.01, 0.01, 0.02;
  t.covariance.bottomRightCorner<2, 2>() << 0.3, -0.1, -0.1, 0.2;
  const Eigen::Matrix2d model = predict_distribution(t, 1.0).covariance;
  const Eigen::Matrix2d mc = oracle::monte_carlo_position_cov(t, 1.0, 100000, 77);
  const double rel = (model - mc).norm() / mc.norm();
  return {rel < 0.05, fmt::format("relative Frobenius error {:.4f} (< 0.05) against 1e5 samples", rel)};
}

struct SafetyAudit {
  int collisions = 0;
  double min_center_margin = std::numeric_limits<double>::infinity();
};

// Recomputes contact from the exported trace, independent of the simulator.
SafetyAudit audit_safety(const Scenario& s, const BatchSummary& b) {
  SafetyAudit a;
  for (const EpisodeResult& r : b.results) {
    bool hit = r.collision;
    for (const TraceRecord& rec : r.trace) {
      const Vec2 c = rec.pose.position();
      for (std::size_t i = 0; i < rec.pedestrians.size(); ++i) {
        const double margin =
            distance(c, rec.pedestrians[i]) - s.config.robot_radius - s.pedestrians[i].pedestrian.radius;
        a.min_center_margin = std::min(a.min_center_margin, margin);
        hit = hit || margin <= 0.0;
      }
      for (const Shape& sh : s.static_shapes) hit = hit || oracle::shape_distance(c, sh) <= s.config.robot_radius;
    }
    if (hit) ++a.collisions;
  }
  return a;
}

Outcome safety() {
  bool pass = true;
  std::string detail;
  for (const char* file : {"scene1_headon_analog.json", "scene2_crossing_analog.json"}) {
    Scenario s = load_scenario(kScenarioDir / file);
    s.method = Method::kGvoRrt;
    const BatchSummary b = run_batch(s, 50, {}, worker_count());
    const SafetyAudit a = audit_safety(s, b);
    pass = pass && a.collisions == 0 && b.success_rate >= 0.9;
    detail += fmt::format("{}{}: collisions {}, success {:.0f}% (>= 90%), min center margin {:.3f} m",
                          detail.empty() ? "" : "; ", s.name, a.collisions, 100.0 * b.success_rate,
                          a.min_center_margin);
  }
  return {pass, detail};
}

Outcome clutter() {
  Scenario clutter = load_scenario(kScenarioDir / "scene4_clutter_analog.json");
  Scenario empty = clutter;
  empty.static_shapes.clear();
  empty.pedestrians.clear();
  const auto batch = [](Scenario s, Method m) {
    s.method = m;
    return run_batch(s, 10, {}, worker_count());
  };
  const BatchSummary rrt = batch(clutter, Method::kGvoRrt);
  const BatchSummary gvo = batch(clutter, Method::kGvoOnly);
  const BatchSummary gvo_empty = batch(empty, Method::kGvoOnly);
  if (!rrt.std_time || !gvo.std_time || !gvo_empty.mean_time) return {false, "a method had no successful run"};
  const double ratio = *gvo.mean_time / *gvo_empty.mean_time;
  const bool pass = *rrt.std_time <= *gvo.std_time && ratio >= 1.2;
  return {pass, fmt::format("std GVO_RRT {:.2f} s <= std GVO_ONLY {:.2f} s; GVO_ONLY clutter/empty mean "
                            "{:.2f}/{:.2f} s = {:.2f} (>= 1.2); success {:.0f}%/{:.0f}%",
                            *rrt.std_time, *gvo.std_time, *gvo.mean_time, *gvo_empty.mean_time, ratio,
                            100.0 * rrt.success_rate, 100.0 * gvo.success_rate)};
}

Outcome replay() {
  int episodes = 0, differing = 0;
  for (const char* file : {"scene1_headon_analog.json", "scene2_crossing_analog.json", "scene3_mixed_analog.json",
                           "scene4_clutter_analog.json"}) {
    Scenario s = load_scenario(kScenarioDir / file);
    for (Method m : {Method::kGvoRrt, Method::kGvoOnly}) {
      s.method = m;
      const std::string a = trace_csv(run_episode(s));
      const std::string b = trace_csv(run_episode(s));
      ++episodes;
      if (a != b) ++differing;
    }
  }
  // Threaded batches must reproduce sequential runs too.
  Scenario s = load_scenario(kScenarioDir / "scene2_crossing_analog.json");
  const BatchSummary seq = run_batch(s, 3, {}, 1);
  const BatchSummary par = run_batch(s, 3, {}, 3);
  for (std::size_t i = 0; i < seq.results.size(); ++i) {
    ++episodes;
    if (trace_csv(seq.results[i]) != trace_csv(par.results[i])) ++differing;
  }
  return {differing == 0, fmt::format("{}/{} re-runs byte-identical", episodes - differing, episodes)};
}

}  // namespace
}  // namespace gvo_nav

int main(int argc, char** argv) {
  using namespace gvo_nav;
  spdlog::set_level(spdlog::level::warn);
  const std::vector<Criterion> all{
      {1, "kinematics vs RK4", 1.0, kinematics},
      {2, "controller convergence", 1.0, controller},
      {3, "planner soundness", 60.0, planner},
      {4, "GVO vs brute-force oracle", 30.0, gvo_oracle},
      {5, "prediction covariance vs Monte Carlo", 5.0, prediction},
      {6, "safety, head-on and crossing", std::numeric_limits<double>::infinity(), safety},
      {7, "clutter trend", std::numeric_limits<double>::infinity(), clutter},
      {8, "deterministic replay", std::numeric_limits<double>::infinity(), replay},
  };
  // Optional arguments select criteria by number.
  std::vector<Criterion> criteria;
  for (const Criterion& c : all) {
    bool wanted = argc < 2;
    for (int i = 1; i < argc; ++i) wanted = wanted || std::atoi(argv[i]) == c.id;
    if (wanted) criteria.push_back(c);
  }
  int failed = 0;
  for (const Criterion& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = elapsed < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    const std::string budget = std::isfinite(c.budget_s) ? fmt::format(" (< {:g} s)", c.budget_s) : "";
    std::printf("%s\n", fmt::format("{} criterion {} {}: {}; runtime {:.2f} s{}", pass ? "PASS" : "FAIL", c.id,
                                    c.name, o.detail, elapsed, budget)
                            .c_str());
    std::fflush(stdout);
  }
  std::printf("%s\n", fmt::format("{}/{} criteria passed", criteria.size() - failed, criteria.size()).c_str());
  return failed == 0 ? 0 : 1;
}
