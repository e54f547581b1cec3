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

#include "gvo_nav/follower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gvo_nav {

void FollowerParams::validate() const {
  if (!(xi > 0.0 && xi <= 1.0)) throw std::invalid_argument("FollowerParams: xi must be in (0, 1]");
  if (!(g > 0.0)) throw std::invalid_argument("FollowerParams: g must be > 0");
  if (lookahead_steps < 1) throw std::invalid_argument("FollowerParams: lookahead_steps must be >= 1");
  if (!(trace_spacing > 0.0)) throw std::invalid_argument("FollowerParams: trace_spacing must be > 0");
}

TrackingError tracking_error(const Pose& real, const Pose& ref) {
  const double dx = real.x - ref.x;
  const double dy = real.y - ref.y;
  const double c = std::cos(real.theta);
  const double s = std::sin(real.theta);
  return {-c * dx - s * dy, s * dx - c * dy, wrap_angle(-(real.theta - ref.theta))};
}

Gains gains(const Action& u_r, const FollowerParams& params) {
  const double k = 2.0 * params.xi * std::sqrt(u_r.omega * u_r.omega + params.g * u_r.v * u_r.v);
  return {k, params.g * std::abs(u_r.v), k};
}

Action control_unclamped(const Pose& real, const Pose& ref, const Action& u_r, const FollowerParams& params) {
  const TrackingError e = tracking_error(real, ref);
  const Gains k = gains(u_r, params);
  const double sign_v = u_r.v > 0.0 ? 1.0 : (u_r.v < 0.0 ? -1.0 : 0.0);
  const double ue1 = -k.k1 * e.e1;
  const double ue2 = -sign_v * k.k2 * e.e2 - k.k3 * e.e3;
  return {u_r.v * std::cos(e.e3) - ue1, u_r.omega - ue2};
}

Action control(const Pose& real, const Pose& ref, const Action& u_r, const FollowerParams& params,
               const ActionSpace& space) {
  return space.clamp(control_unclamped(real, ref, u_r, params));
}

Reference reference_lookup(std::span<const TracePoint> trace, const Pose& real, const FollowerParams& params) {
  if (trace.empty()) throw std::invalid_argument("reference_lookup: empty trace");
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const Vec2 d = trace[i].pose.position() - real.position();
    const double d2 = dot(d, d);
    if (d2 < best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  Reference r;
  r.index = best;
  r.pose = trace[best].pose;
  const std::size_t last = trace.size() - 1;
  if (best == last) {
    const Vec2 heading{std::cos(r.pose.theta), std::sin(r.pose.theta)};
    if (trace.size() == 1 || dot(real.position() - r.pose.position(), heading) > 0.0) {
      r.u_r = {};
      return r;
    }
  }
  r.u_r = trace[std::min(best + static_cast<std::size_t>(params.lookahead_steps), last)].ref_action;
  return r;
}

Reference reference_lookup(const PlannedPath& path, const Pose& real, const FollowerParams& params) {
  return reference_lookup(std::span<const TracePoint>(path.spline_trace), real, params);
}

}  // namespace gvo_nav
