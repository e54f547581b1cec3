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

#include <algorithm>
#include <limits>

#include "gvo_nav/kernels.hpp"

namespace gvo_nav::kernels::scalar {

double min_dist_sq(PointsView pts, double qx, double qy) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = pts.xs[i] - qx;
    const double dy = pts.ys[i] - qy;
    const double d2 = dx * dx + dy * dy;
    best = std::min(best, d2);
  }
  return best;
}

double min_segment_dist_sq(PointsView pts, double ax, double ay, double bx, double by) {
  const double sx = bx - ax;
  const double sy = by - ay;
  const double len2 = sx * sx + sy * sy;
  if (len2 == 0.0) return scalar::min_dist_sq(pts, ax, ay);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double wx = pts.xs[i] - ax;
    const double wy = pts.ys[i] - ay;
    double t = (wx * sx + wy * sy) / len2;
    t = std::min(std::max(t, 0.0), 1.0);
    const double ex = wx - t * sx;
    const double ey = wy - t * sy;
    const double d2 = ex * ex + ey * ey;
    best = std::min(best, d2);
  }
  return best;
}

}  // namespace gvo_nav::kernels::scalar
