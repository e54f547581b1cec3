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

#include "gvo_nav/core.hpp"

#include <algorithm>
#include <stdexcept>

namespace gvo_nav {

double wrap_angle(double angle) {
  double r = std::remainder(angle, 2.0 * kPi);  // [-pi, pi]
  if (r <= -kPi) r += 2.0 * kPi;
  return r;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const Vec2 d = b - a;
  const double len2 = dot(d, d);
  if (len2 == 0.0) return distance(p, a);
  const double s = std::clamp(dot(p - a, d) / len2, 0.0, 1.0);
  return distance(p, a + s * d);
}

void ActionSpace::validate() const {
  if (!(v_max > 0.0)) throw std::invalid_argument("ActionSpace: v_max must be > 0");
  if (!(omega_max > 0.0)) throw std::invalid_argument("ActionSpace: omega_max must be > 0");
  if (v_min < 0.0 || v_min > v_max) {
    throw std::invalid_argument("ActionSpace: v_min must lie in [0, v_max]");
  }
}

bool ActionSpace::contains(const Action& a) const {
  return a.v >= v_min && a.v <= v_max && std::abs(a.omega) <= omega_max;
}

Action ActionSpace::clamp(const Action& a) const {
  return {std::clamp(a.v, v_min, v_max), std::clamp(a.omega, -omega_max, omega_max)};
}

Pose propagate_arc(const Pose& pose, const Action& action, double t) {
  // The closed-form arc  x = v/w (sin(th + w t) - sin th),
  //                      y = -v/w (cos(th + w t) - cos th)
  // rewritten with sum-to-product identities as a chord of length
  // v t sinc(w t / 2) along the mid-arc heading th + w t / 2. Same values,
  // but no cancellation for small w.
  const double half = 0.5 * action.omega * t;
  double sinc = 0.0;
  // The series also covers t = 0, where sin(half) / half would be 0 / 0.
  if (std::abs(action.omega) < 1e-6 || std::abs(half) < 1e-6) {
    sinc = 1.0 - half * half / 6.0;
  } else {
    sinc = std::sin(half) / half;
  }
  const double chord = action.v * t * sinc;
  const double mid = pose.theta + half;
  return Pose(pose.x + chord * std::cos(mid), pose.y + chord * std::sin(mid),
              pose.theta + action.omega * t);
}

PoseRate unicycle_derivative(const Pose& pose, const Action& action) {
  return {action.v * std::cos(pose.theta), action.v * std::sin(pose.theta), action.omega};
}

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double mag = std::sqrt(-2.0 * std::log(u1));
  spare_ = mag * std::sin(2.0 * kPi * u2);
  has_spare_ = true;
  return mag * std::cos(2.0 * kPi * u2);
}

}  // namespace gvo_nav
