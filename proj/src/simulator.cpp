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

#include "gvo_nav/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gvo_nav {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

double ray_box(Vec2 o, Vec2 d, const Box& b) {
  double t0 = -kInf;
  double t1 = kInf;
  const double os[2] = {o.x, o.y};
  const double ds[2] = {d.x, d.y};
  const double lo[2] = {b.min.x, b.min.y};
  const double hi[2] = {b.max.x, b.max.y};
  for (int i = 0; i < 2; ++i) {
    if (ds[i] == 0.0) {
      if (os[i] < lo[i] || os[i] > hi[i]) return kInf;
      continue;
    }
    double ta = (lo[i] - os[i]) / ds[i];
    double tb = (hi[i] - os[i]) / ds[i];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
  }
  if (t0 > t1) return kInf;
  if (t0 > 0.0) return t0;
  if (t1 > 0.0) return t1;
  return kInf;
}

double ray_disc(Vec2 o, Vec2 d, Vec2 c, double r) {
  const Vec2 w = o - c;
  const double b = dot(d, w);
  const double cc = dot(w, w) - r * r;
  const double disc = b * b - cc;
  if (disc < 0.0) return kInf;
  const double sq = std::sqrt(disc);
  const double t_near = -b - sq;
  if (t_near > 0.0) return t_near;
  const double t_far = -b + sq;
  return t_far > 0.0 ? t_far : kInf;
}

}  // namespace

double distance_to_shape(Vec2 p, const Shape& shape) {
  return std::visit(Overloaded{[&](const Box& b) {
                                 const double dx = std::max({b.min.x - p.x, 0.0, p.x - b.max.x});
                                 const double dy = std::max({b.min.y - p.y, 0.0, p.y - b.max.y});
                                 return std::hypot(dx, dy);
                               },
                               [&](const Disc& d) { return std::max(0.0, distance(p, d.center) - d.radius); }},
                    shape);
}

bool shape_valid(const Shape& shape) {
  return std::visit(Overloaded{[](const Box& b) { return b.max.x > b.min.x && b.max.y > b.min.y; },
                               [](const Disc& d) { return d.radius > 0.0; }},
                    shape);
}

void LidarParams::validate() const {
  if (!(fov > 0.0)) throw std::invalid_argument("LidarParams: fov must be > 0");
  if (!(angular_resolution > 0.0)) throw std::invalid_argument("LidarParams: angular_resolution must be > 0");
  if (!(range_min >= 0.0 && range_min < range_max)) {
    throw std::invalid_argument("LidarParams: need 0 <= range_min < range_max");
  }
  if (!(noise_std >= 0.0)) throw std::invalid_argument("LidarParams: noise_std must be >= 0");
}

World step(const World& world, const Action& command) {
  World next = world;
  next.robot.pose = propagate_arc(world.robot.pose, command, world.dt);
  for (Pedestrian& p : next.pedestrians) {
    if (world.time < p.start_delay || p.waypoints.empty() || p.speed <= 0.0) continue;
    if (distance(p.position, p.waypoints[p.next_waypoint]) <= kWaypointSwitchDistance) {
      if (p.next_waypoint + 1 < p.waypoints.size()) {
        ++p.next_waypoint;
      } else if (p.loop) {
        p.next_waypoint = 0;
      }
    }
    const Vec2 target = p.waypoints[p.next_waypoint];
    const double dist = distance(p.position, target);
    if (dist == 0.0) continue;
    const double stride = std::min(p.speed * world.dt, dist);
    p.position = p.position + (stride / dist) * (target - p.position);
  }
  next.time = world.time + world.dt;
  return next;
}

double cast_ray(const World& world, Vec2 origin, double bearing, int* owner) {
  const Vec2 d{std::cos(bearing), std::sin(bearing)};
  double best = kInf;
  int who = kStaticOwner;
  for (const Shape& s : world.static_shapes) {
    const double t = std::visit(Overloaded{[&](const Box& b) { return ray_box(origin, d, b); },
                                           [&](const Disc& c) { return ray_disc(origin, d, c.center, c.radius); }},
                                s);
    if (t < best) {
      best = t;
      who = kStaticOwner;
    }
  }
  for (std::size_t i = 0; i < world.pedestrians.size(); ++i) {
    const Pedestrian& p = world.pedestrians[i];
    const double t = ray_disc(origin, d, p.position, p.radius);
    if (t < best) {
      best = t;
      who = static_cast<int>(i);
    }
  }
  if (owner != nullptr) *owner = who;
  return best;
}

TaggedScan simulate_tagged_scan(const World& world, const LidarParams& params, Rng& rng) {
  params.validate();
  TaggedScan scan;
  const Pose& pose = world.robot.pose;
  const auto half = static_cast<int>(std::floor(0.5 * params.fov / params.angular_resolution + 1e-9));
  for (int k = -half; k <= half; ++k) {
    const double rel = k * params.angular_resolution;
    const double bearing = pose.theta + rel;
    int owner = kStaticOwner;
    const double range = cast_ray(world, pose.position(), bearing, &owner);
    if (!(range >= params.range_min && range <= params.range_max)) continue;
    const double measured = params.noise_std > 0.0 ? range + params.noise_std * rng.normal() : range;
    scan.points.push_back({pose.x + measured * std::cos(bearing), pose.y + measured * std::sin(bearing), world.time});
    scan.owners.push_back(owner);
    scan.ranges.push_back(measured);
    scan.bearings.push_back(rel);
  }
  return scan;
}

std::vector<ScanPoint> simulate_scan(const World& world, const LidarParams& params, Rng& rng) {
  return simulate_tagged_scan(world, params, rng).points;
}

bool check_collision(const World& world) {
  const Vec2 c = world.robot.pose.position();
  for (const Shape& s : world.static_shapes) {
    if (distance_to_shape(c, s) < world.robot.radius) return true;
  }
  for (const Pedestrian& p : world.pedestrians) {
    if (distance(c, p.position) < world.robot.radius + p.radius) return true;
  }
  return false;
}

double clearance(const World& world) {
  const Vec2 c = world.robot.pose.position();
  double best = kInf;
  for (const Shape& s : world.static_shapes) best = std::min(best, distance_to_shape(c, s) - world.robot.radius);
  for (const Pedestrian& p : world.pedestrians) {
    best = std::min(best, distance(c, p.position) - world.robot.radius - p.radius);
  }
  return best;
}

kernels::PointCloud rasterize_shapes(const std::vector<Shape>& shapes, double spacing) {
  if (!(spacing > 0.0)) throw std::invalid_argument("rasterize_shapes: spacing must be > 0");
  kernels::PointCloud cloud;
  auto edge = [&](Vec2 a, Vec2 b) {
    const double len = distance(a, b);
    const int n = std::max(1, static_cast<int>(std::ceil(len / spacing)));
    for (int i = 0; i < n; ++i) cloud.push_back(a + (static_cast<double>(i) / n) * (b - a));
  };
  for (const Shape& s : shapes) {
    std::visit(Overloaded{[&](const Box& b) {
                            const Vec2 c0 = b.min;
                            const Vec2 c1{b.max.x, b.min.y};
                            const Vec2 c2 = b.max;
                            const Vec2 c3{b.min.x, b.max.y};
                            edge(c0, c1);
                            edge(c1, c2);
                            edge(c2, c3);
                            edge(c3, c0);
                          },
                          [&](const Disc& d) {
                            const int n = std::max(8, static_cast<int>(std::ceil(2.0 * kPi * d.radius / spacing)));
                            for (int i = 0; i < n; ++i) {
                              const double a = 2.0 * kPi * i / n;
                              cloud.push_back({d.center.x + d.radius * std::cos(a), d.center.y + d.radius * std::sin(a)});
                            }
                          }},
               s);
  }
  return cloud;
}

}  // namespace gvo_nav
