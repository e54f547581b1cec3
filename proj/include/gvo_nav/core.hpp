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

#ifndef GVO_NAV_CORE_HPP_
#define GVO_NAV_CORE_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace gvo_nav {

inline constexpr double kPi = std::numbers::pi;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double angle);

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2 a, Vec2 b) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double distance(Vec2 a, Vec2 b) { return norm(a - b); }

/// Distance from point p to the closed segment [a, b].
double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);

/// Planar robot configuration in the world frame. The heading is kept in
/// (-pi, pi] by every constructor.
struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;

  constexpr Pose() = default;
  Pose(double x_in, double y_in, double theta_in)
      : x(x_in), y(y_in), theta(wrap_angle(theta_in)) {}

  Vec2 position() const { return {x, y}; }
};

/// Forward and angular velocity command.
struct Action {
  double v = 0.0;
  double omega = 0.0;

  friend constexpr bool operator==(const Action&, const Action&) = default;
};

/// Velocity bounds of the platform. The number of candidates drawn per
/// avoidance decision lives in AvoidParams::n_samples.
struct ActionSpace {
  double v_max = 1.6;
  double omega_max = kPi;
  double v_min = 0.0;

  /// Throws std::invalid_argument when a bound is inconsistent.
  void validate() const;
  bool contains(const Action& a) const;
  Action clamp(const Action& a) const;
};

/// Pose reached after holding `action` for `t` seconds from `pose` on the
/// unicycle model. Exact constant-curvature arc; straight-line expansion near
/// omega = 0.
Pose propagate_arc(const Pose& pose, const Action& action, double t);

struct PoseRate {
  double dx = 0.0;
  double dy = 0.0;
  double dtheta = 0.0;
};

/// Right-hand side of the unicycle model.
PoseRate unicycle_derivative(const Pose& pose, const Action& action);

/// Seeded generator shared by planner, avoidance and simulator. The engine
/// sequence is fixed by the standard; the std distributions are not, so the
/// uniform and normal transforms live here to keep traces reproducible
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1).
  double uniform();
  double uniform(double lo, double hi);
  /// Standard normal via Box-Muller.
  double normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gvo_nav

#endif  // GVO_NAV_CORE_HPP_
