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

#include <arm_neon.h>

#include <algorithm>
#include <limits>

#include "gvo_nav/kernels.hpp"

namespace gvo_nav::kernels::neon {

double min_dist_sq(PointsView pts, double qx, double qy) {
  const std::size_t n = pts.size();
  const double* xs = pts.xs.data();
  const double* ys = pts.ys.data();
  const float64x2_t vqx = vdupq_n_f64(qx);
  const float64x2_t vqy = vdupq_n_f64(qy);
  float64x2_t vbest = vdupq_n_f64(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(vld1q_f64(xs + i), vqx);
    const float64x2_t dy = vsubq_f64(vld1q_f64(ys + i), vqy);
    const float64x2_t d2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    vbest = vminq_f64(vbest, d2);
  }
  double best = vminvq_f64(vbest);
  for (; i < n; ++i) {
    const double dx = xs[i] - qx;
    const double dy = ys[i] - qy;
    best = std::min(best, dx * dx + dy * dy);
  }
  return best;
}

double min_segment_dist_sq(PointsView pts, double ax, double ay, double bx, double by) {
  const double sx = bx - ax;
  const double sy = by - ay;
  const double len2 = sx * sx + sy * sy;
  if (len2 == 0.0) return neon::min_dist_sq(pts, ax, ay);
  const std::size_t n = pts.size();
  const double* xs = pts.xs.data();
  const double* ys = pts.ys.data();
  const float64x2_t vax = vdupq_n_f64(ax);
  const float64x2_t vay = vdupq_n_f64(ay);
  const float64x2_t vsx = vdupq_n_f64(sx);
  const float64x2_t vsy = vdupq_n_f64(sy);
  const float64x2_t vlen2 = vdupq_n_f64(len2);
  const float64x2_t zero = vdupq_n_f64(0.0);
  const float64x2_t one = vdupq_n_f64(1.0);
  float64x2_t vbest = vdupq_n_f64(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t wx = vsubq_f64(vld1q_f64(xs + i), vax);
    const float64x2_t wy = vsubq_f64(vld1q_f64(ys + i), vay);
    float64x2_t t = vdivq_f64(vaddq_f64(vmulq_f64(wx, vsx), vmulq_f64(wy, vsy)), vlen2);
    t = vminq_f64(vmaxq_f64(t, zero), one);
    const float64x2_t ex = vsubq_f64(wx, vmulq_f64(t, vsx));
    const float64x2_t ey = vsubq_f64(wy, vmulq_f64(t, vsy));
    const float64x2_t d2 = vaddq_f64(vmulq_f64(ex, ex), vmulq_f64(ey, ey));
    vbest = vminq_f64(vbest, d2);
  }
  double best = vminvq_f64(vbest);
  for (; i < n; ++i) {
    const double wx = xs[i] - ax;
    const double wy = ys[i] - ay;
    double t = (wx * sx + wy * sy) / len2;
    t = std::min(std::max(t, 0.0), 1.0);
    const double ex = wx - t * sx;
    const double ey = wy - t * sy;
    best = std::min(best, ex * ex + ey * ey);
  }
  return best;
}

}  // namespace gvo_nav::kernels::neon
