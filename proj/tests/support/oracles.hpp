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

// Independent reference computations for tests. Nothing here calls into the
// library's numerics; only its plain data types are shared.

#ifndef GVO_NAV_TESTS_ORACLES_HPP_
#define GVO_NAV_TESTS_ORACLES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <random>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gvo_nav/core.hpp"
#include "gvo_nav/planner.hpp"
#include "gvo_nav/simulator.hpp"
#include "gvo_nav/tracking.hpp"

namespace gvo_nav::oracle {

inline double wrap(double a) { return std::remainder(a, 2.0 * std::numbers::pi); }

struct State {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // not wrapped
};

/// Classic fourth-order Runge-Kutta on x' = v cos th, y' = v sin th, th' = w.
inline State rk4(State s, double v, double w, double t, int steps) {
  if (t <= 0.0) return s;
  const double h = t / steps;
  const auto f = [&](const State& q) { return State{v * std::cos(q.theta), v * std::sin(q.theta), w}; };
  const auto add = [](const State& q, const State& d, double c) {
    return State{q.x + c * d.x, q.y + c * d.y, q.theta + c * d.theta};
  };
  for (int i = 0; i < steps; ++i) {
    const State k1 = f(s);
    const State k2 = f(add(s, k1, 0.5 * h));
    const State k3 = f(add(s, k2, 0.5 * h));
    const State k4 = f(add(s, k3, h));
    s.x += h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    s.y += h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    s.theta += h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta);
  }
  return s;
}

/// Robot centers every `dt` from 0 to `horizon` (inclusive), integrated with
/// rk4 between samples.
inline std::vector<Vec2> fine_centers(const Pose& start, const Action& a, double horizon, double dt,
                                      int substeps = 4) {
  const auto n = static_cast<std::size_t>(std::llround(horizon / dt));
  std::vector<Vec2> out;
  out.reserve(n + 1);
  State s{start.x, start.y, start.theta};
  out.push_back({s.x, s.y});
  for (std::size_t k = 0; k < n; ++k) {
    s = rk4(s, a.v, a.omega, dt, substeps);
    out.push_back({s.x, s.y});
  }
  return out;
}

inline double min_point_distance(const std::vector<Vec2>& pts, Vec2 q) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec2& p : pts) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
  return best;
}

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double dx = b.x - a.x;
  const double dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double u = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  u = std::clamp(u, 0.0, 1.0);
  return std::hypot(p.x - (a.x + u * dx), p.y - (a.y + u * dy));
}

/// Exact distance from p to a box or disc (0 inside).
inline double shape_distance(Vec2 p, const Shape& s) {
  if (const Box* b = std::get_if<Box>(&s)) {
    const double dx = std::max({b->min.x - p.x, 0.0, p.x - b->max.x});
    const double dy = std::max({b->min.y - p.y, 0.0, p.y - b->max.y});
    return std::hypot(dx, dy);
  }
  const Disc& d = std::get<Disc>(s);
  return std::max(0.0, std::hypot(p.x - d.center.x, p.y - d.center.y) - d.radius);
}

/// Position mean and covariance of a track after t seconds, dropping the
/// position-velocity cross terms.
struct Gaussian2 {
  Eigen::Vector2d mean;
  Eigen::Matrix2d cov;
};

inline Gaussian2 predicted(const Track& tr, double t) {
  Gaussian2 g;
  g.mean = tr.mean.head<2>() + t * tr.mean.tail<2>();
  g.cov = tr.covariance.topLeftCorner<2, 2>() + t * t * tr.covariance.bottomRightCorner<2, 2>();
  return g;
}

inline double peak_normalized_pdf(const Gaussian2& g, Vec2 p) {
  const Eigen::Vector2d d(p.x - g.mean(0), p.y - g.mean(1));
  // Explicit 2x2 inverse, independent of Eigen's solvers.
  const double a = g.cov(0, 0), b = g.cov(0, 1), c = g.cov(1, 0), e = g.cov(1, 1);
  const double det = a * e - b * c;
  const double m2 = (e * d(0) * d(0) - (b + c) * d(0) * d(1) + a * d(1) * d(1)) / det;
  return std::exp(-0.5 * m2);
}

/// Fine-step verdict of one action under the accept/reject rules, plus the
/// margins used to decide whether the action sits in a discretization band.
struct FineVerdict {
  bool free = true;
  double min_static = std::numeric_limits<double>::infinity();
  double peak_fd = 0.0;
  double min_center = std::numeric_limits<double>::infinity();
};

struct FineRules {
  double t_s_th = 4.0;
  double t_d_th = 4.0;
  double radius_robot = 0.3;
  double p_th = std::exp(-4.5);
  bool hard_floor = true;
  double radius_human = 0.3;
  double dt = 1e-3;
};

inline FineVerdict fine_verdict(const Pose& robot, const Action& a, const std::vector<Vec2>& statics,
                                const std::vector<Track>& tracks, const FineRules& r) {
  FineVerdict out;
  const std::vector<Vec2> centers = fine_centers(robot, a, std::max(r.t_s_th, r.t_d_th), r.dt);
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const double t = static_cast<double>(k) * r.dt;
    if (t <= r.t_s_th + 1e-12 && !statics.empty()) {
      out.min_static = std::min(out.min_static, min_point_distance(statics, centers[k]));
    }
    if (t <= r.t_d_th + 1e-12) {
      for (const Track& tr : tracks) {
        const Gaussian2 g = predicted(tr, t);
        out.peak_fd = std::max(out.peak_fd, peak_normalized_pdf(g, centers[k]));
        out.min_center = std::min(out.min_center, std::hypot(centers[k].x - g.mean(0), centers[k].y - g.mean(1)));
      }
    }
  }
  const bool static_hit = out.min_static < r.radius_robot;
  const bool prob_hit = out.peak_fd > r.p_th;
  const bool floor_hit = r.hard_floor && out.min_center < r.radius_robot + r.radius_human;
  out.free = !(static_hit || prob_hit || floor_hit);
  return out;
}

/// Sample covariance of positions propagated by t from draws of the track's
/// full 4D Gaussian.
inline Eigen::Matrix2d monte_carlo_position_cov(const Track& tr, double t, int n, std::uint64_t seed) {
  const Eigen::LLT<Eigen::Matrix4d> llt(tr.covariance);
  const Eigen::Matrix4d l = llt.matrixL();
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::Vector2d sum = Eigen::Vector2d::Zero();
  Eigen::Matrix2d sum_sq = Eigen::Matrix2d::Zero();
  for (int i = 0; i < n; ++i) {
    Eigen::Vector4d z;
    for (int j = 0; j < 4; ++j) z(j) = nd(gen);
    const Eigen::Vector4d s = tr.mean + l * z;
    const Eigen::Vector2d p = s.head<2>() + t * s.tail<2>();
    sum += p;
    sum_sq += p * p.transpose();
  }
  const Eigen::Vector2d mean = sum / n;
  return (sum_sq - n * mean * mean.transpose()) / (n - 1);
}

/// Random world of discs inside [0, size]^2 with start and goal in opposite
/// corners, kept only when a grid search finds a corridor of the required
/// clearance.
struct DiscWorld {
  std::vector<Disc> discs;
  Vec2 start;
  Vec2 goal;
};

/// 8-connected grid search over cells whose centers keep `clearance` from
/// every disc.
inline bool grid_reachable(const DiscWorld& w, double size, double clearance, double cell) {
  const int n = static_cast<int>(std::ceil(size / cell));
  const auto free_cell = [&](int i, int j) {
    const Vec2 c{(i + 0.5) * cell, (j + 0.5) * cell};
    for (const Disc& d : w.discs) {
      if (std::hypot(c.x - d.center.x, c.y - d.center.y) - d.radius < clearance) return false;
    }
    return true;
  };
  const auto index = [&](Vec2 p) {
    return std::array<int, 2>{std::clamp(static_cast<int>(p.x / cell), 0, n - 1),
                              std::clamp(static_cast<int>(p.y / cell), 0, n - 1)};
  };
  const auto s = index(w.start);
  const auto g = index(w.goal);
  if (!free_cell(s[0], s[1]) || !free_cell(g[0], g[1])) return false;
  std::vector<char> seen(static_cast<std::size_t>(n * n), 0);
  std::deque<std::array<int, 2>> queue{s};
  seen[static_cast<std::size_t>(s[0] * n + s[1])] = 1;
  while (!queue.empty()) {
    const auto c = queue.front();
    queue.pop_front();
    if (c == g) return true;
    for (int di = -1; di <= 1; ++di) {
      for (int dj = -1; dj <= 1; ++dj) {
        const int i = c[0] + di;
        const int j = c[1] + dj;
        if (i < 0 || j < 0 || i >= n || j >= n) continue;
        auto& flag = seen[static_cast<std::size_t>(i * n + j)];
        if (flag || !free_cell(i, j)) continue;
        flag = 1;
        queue.push_back({i, j});
      }
    }
  }
  return false;
}

inline DiscWorld random_disc_world(std::mt19937_64& gen, double size, int n_discs, double r_min, double r_max,
                                   double clearance) {
  std::uniform_real_distribution<double> pos(0.0, size);
  std::uniform_real_distribution<double> rad(r_min, r_max);
  for (;;) {
    DiscWorld w;
    w.start = {0.5, 0.5};
    w.goal = {size - 0.5, size - 0.5};
    for (int i = 0; i < n_discs; ++i) w.discs.push_back({{pos(gen), pos(gen)}, rad(gen)});
    if (grid_reachable(w, size, clearance, 0.1)) return w;
  }
}

/// Boundary points of a disc every `spacing` meters of arc.
inline std::vector<Vec2> disc_boundary(const Disc& d, double spacing) {
  const int n = std::max(8, static_cast<int>(std::ceil(2.0 * std::numbers::pi * d.radius / spacing)));
  std::vector<Vec2> out;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    out.push_back({d.center.x + d.radius * std::cos(a), d.center.y + d.radius * std::sin(a)});
  }
  return out;
}

/// Independent re-check of a returned path against the planner's stated
/// guarantees. Each field counts violations.
struct PathAudit {
  int clearance = 0;       // trace points closer than dis_th to a static point
  int heading = 0;         // node triples turning by more than angle_th
  int edge_length = 0;     // node gaps longer than max_edge_len
  int cost = 0;            // final cost above phase-1 c_best, or cost inconsistent with the nodes
  int focal_sum = 0;       // phase-2 samples outside the ellipse
  int endpoints = 0;       // path not starting at start or ending away from goal
  double min_clearance = std::numeric_limits<double>::infinity();

  bool ok() const { return clearance + heading + edge_length + cost + focal_sum + endpoints == 0; }
};

inline PathAudit audit_path(const PlanResult& r, Vec2 start, Vec2 goal, const std::vector<Vec2>& statics,
                            const PlanParams& params) {
  PathAudit a;
  const PlannedPath& path = *r.path;
  const auto& n = path.nodes;
  if (n.empty() || std::hypot(n.front().x - start.x, n.front().y - start.y) > 1e-12 ||
      std::hypot(n.back().x - goal.x, n.back().y - goal.y) > params.goal_tol + 1e-12) {
    ++a.endpoints;
  }
  for (const TracePoint& tp : path.spline_trace) {
    const double d = min_point_distance(statics, tp.pose.position());
    a.min_clearance = std::min(a.min_clearance, d);
    if (d < params.dis_th) ++a.clearance;
  }
  double length = 0.0;
  for (std::size_t i = 0; i + 1 < n.size(); ++i) {
    const double e = std::hypot(n[i + 1].x - n[i].x, n[i + 1].y - n[i].y);
    length += e;
    if (e > params.max_edge_len + 1e-12) ++a.edge_length;
  }
  for (std::size_t i = 0; i + 2 < n.size(); ++i) {
    const double h1 = std::atan2(n[i + 1].y - n[i].y, n[i + 1].x - n[i].x);
    const double h2 = std::atan2(n[i + 2].y - n[i + 1].y, n[i + 2].x - n[i + 1].x);
    if (std::abs(wrap(h2 - h1)) > params.angle_th + 1e-12) ++a.heading;
  }
  const double to_goal = std::hypot(n.back().x - goal.x, n.back().y - goal.y);
  if (std::abs(length + to_goal - path.cost) > 1e-9) ++a.cost;
  if (path.cost > r.diagnostics.c_best_phase1 + 1e-9) ++a.cost;
  const double c_best = r.diagnostics.c_best_phase1;
  for (const Vec2& p : r.diagnostics.phase2_samples) {
    const double f = std::hypot(p.x - start.x, p.y - start.y) + std::hypot(p.x - goal.x, p.y - goal.y);
    if (f > c_best + 1e-9) ++a.focal_sum;
  }
  return a;
}

}  // namespace gvo_nav::oracle

#endif  // GVO_NAV_TESTS_ORACLES_HPP_
