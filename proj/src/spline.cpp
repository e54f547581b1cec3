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

#include "gvo_nav/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gvo_nav {

CubicSpline2D::CubicSpline2D(std::span<const Vec2> nodes) : values_(nodes.begin(), nodes.end()) {
  const std::size_t n = nodes.size();
  if (n < 2) throw std::invalid_argument("CubicSpline2D: need at least 2 nodes");
  knots_.resize(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    const double h = distance(nodes[i], nodes[i - 1]);
    if (!(h > 0.0)) throw std::invalid_argument("CubicSpline2D: coincident consecutive nodes");
    knots_[i] = knots_[i - 1] + h;
  }
  second_.assign(n, Vec2{});
  if (n == 2) return;

  // Natural end conditions; Thomas algorithm on the interior system
  //   h[i-1] M[i-1] + 2 (h[i-1] + h[i]) M[i] + h[i] M[i+1] = 6 (d[i] - d[i-1]).
  const std::size_t m = n - 2;
  std::vector<double> diag(m), upper(m), lower(m);
  std::vector<Vec2> rhs(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = k + 1;
    const double h0 = knots_[i] - knots_[i - 1];
    const double h1 = knots_[i + 1] - knots_[i];
    lower[k] = h0;
    diag[k] = 2.0 * (h0 + h1);
    upper[k] = h1;
    const Vec2 d0 = (1.0 / h0) * (values_[i] - values_[i - 1]);
    const Vec2 d1 = (1.0 / h1) * (values_[i + 1] - values_[i]);
    rhs[k] = 6.0 * (d1 - d0);
  }
  for (std::size_t k = 1; k < m; ++k) {
    const double w = lower[k] / diag[k - 1];
    diag[k] -= w * upper[k - 1];
    rhs[k] = rhs[k] - w * rhs[k - 1];
  }
  std::vector<Vec2> sol(m);
  sol[m - 1] = (1.0 / diag[m - 1]) * rhs[m - 1];
  for (std::size_t k = m - 1; k-- > 0;) sol[k] = (1.0 / diag[k]) * (rhs[k] - upper[k] * sol[k + 1]);
  for (std::size_t k = 0; k < m; ++k) second_[k + 1] = sol[k];
}

std::size_t CubicSpline2D::segment(double u) const {
  if (u <= knots_.front()) return 0;
  if (u >= knots_.back()) return knots_.size() - 2;
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
  return static_cast<std::size_t>(it - knots_.begin()) - 1;
}

Vec2 CubicSpline2D::position(double u) const {
  const std::size_t i = segment(u);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - u) / h;
  const double b = (u - knots_[i]) / h;
  const double c = (a * a * a - a) * h * h / 6.0;
  const double d = (b * b * b - b) * h * h / 6.0;
  return a * values_[i] + b * values_[i + 1] + c * second_[i] + d * second_[i + 1];
}

Vec2 CubicSpline2D::first_derivative(double u) const {
  const std::size_t i = segment(u);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - u) / h;
  const double b = (u - knots_[i]) / h;
  return (1.0 / h) * (values_[i + 1] - values_[i]) - ((3.0 * a * a - 1.0) * h / 6.0) * second_[i] +
         ((3.0 * b * b - 1.0) * h / 6.0) * second_[i + 1];
}

Vec2 CubicSpline2D::second_derivative(double u) const {
  const std::size_t i = segment(u);
  const double h = knots_[i + 1] - knots_[i];
  const double a = (knots_[i + 1] - u) / h;
  const double b = (u - knots_[i]) / h;
  return a * second_[i] + b * second_[i + 1];
}

double CubicSpline2D::curvature(double u) const {
  const Vec2 d1 = first_derivative(u);
  const Vec2 d2 = second_derivative(u);
  const double speed2 = dot(d1, d1);
  if (speed2 == 0.0) return 0.0;
  return cross(d1, d2) / (speed2 * std::sqrt(speed2));
}

double SpeedProfile::speed_at(double s, double length) const {
  const double up = std::sqrt(v_start * v_start + 2.0 * accel * std::max(0.0, s));
  const double down = std::sqrt(2.0 * accel * std::max(0.0, length - s));
  return std::min({v_cruise, up, down});
}

std::vector<TracePoint> smooth(std::span<const Vec2> nodes, double spacing, const SpeedProfile& profile) {
  if (!(spacing > 0.0)) throw std::invalid_argument("smooth: spacing must be > 0");
  const CubicSpline2D spline(nodes);

  // Arc-length table by dense chord sampling of every segment.
  constexpr int kSub = 32;
  const auto& knots = spline.knots();
  std::vector<double> params;
  std::vector<double> lengths;
  params.push_back(0.0);
  lengths.push_back(0.0);
  Vec2 prev = spline.position(0.0);
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    for (int k = 1; k <= kSub; ++k) {
      const double u = knots[i] + (knots[i + 1] - knots[i]) * k / kSub;
      const Vec2 p = spline.position(u);
      params.push_back(u);
      lengths.push_back(lengths.back() + distance(p, prev));
      prev = p;
    }
  }
  const double total = lengths.back();

  auto param_at = [&](double s) {
    const auto it = std::lower_bound(lengths.begin(), lengths.end(), s);
    if (it == lengths.begin()) return params.front();
    if (it == lengths.end()) return params.back();
    const std::size_t j = static_cast<std::size_t>(it - lengths.begin());
    const double span = lengths[j] - lengths[j - 1];
    const double w = span > 0.0 ? (s - lengths[j - 1]) / span : 0.0;
    return params[j - 1] + w * (params[j] - params[j - 1]);
  };

  std::vector<double> stations;
  for (int k = 0;; ++k) {
    const double s = k * spacing;
    if (s >= total - 1e-9) break;
    stations.push_back(s);
  }
  stations.push_back(total);

  std::vector<TracePoint> trace;
  trace.reserve(stations.size());
  for (double s : stations) {
    const double u = param_at(s);
    const Vec2 p = spline.position(u);
    const Vec2 d = spline.first_derivative(u);
    const double kappa = spline.curvature(u);
    const double v = profile.speed_at(s, total);
    TracePoint tp;
    tp.pose = Pose(p.x, p.y, std::atan2(d.y, d.x));
    tp.ref_action = {v, v * kappa};
    tp.s = s;
    tp.curvature = kappa;
    trace.push_back(tp);
  }
  return trace;
}

}  // namespace gvo_nav
