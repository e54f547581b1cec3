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

// Built with -mavx2; only reached after a runtime CPU check.

#include <immintrin.h>

#include <algorithm>
#include <limits>

#include "gvo_nav/kernels.hpp"

namespace gvo_nav::kernels::avx2 {
namespace {

double hmin(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d m = _mm_min_pd(lo, hi);
  return std::min(_mm_cvtsd_f64(m), _mm_cvtsd_f64(_mm_unpackhi_pd(m, m)));
}

}  // namespace

double min_dist_sq(PointsView pts, double qx, double qy) {
  const std::size_t n = pts.size();
  const double* xs = pts.xs.data();
  const double* ys = pts.ys.data();
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  __m256d vbest = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vqy);
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    vbest = _mm256_min_pd(vbest, d2);
  }
  double best = hmin(vbest);
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
  if (len2 == 0.0) return avx2::min_dist_sq(pts, ax, ay);
  const std::size_t n = pts.size();
  const double* xs = pts.xs.data();
  const double* ys = pts.ys.data();
  const __m256d vax = _mm256_set1_pd(ax);
  const __m256d vay = _mm256_set1_pd(ay);
  const __m256d vsx = _mm256_set1_pd(sx);
  const __m256d vsy = _mm256_set1_pd(sy);
  const __m256d vlen2 = _mm256_set1_pd(len2);
  const __m256d zero = _mm256_setzero_pd();
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d vbest = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d wx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), vax);
    const __m256d wy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), vay);
    __m256d t = _mm256_div_pd(_mm256_add_pd(_mm256_mul_pd(wx, vsx), _mm256_mul_pd(wy, vsy)), vlen2);
    // max(t, 0) then min(., 1) with t as the first operand, matching std::max/std::min.
    t = _mm256_min_pd(_mm256_max_pd(t, zero), one);
    const __m256d ex = _mm256_sub_pd(wx, _mm256_mul_pd(t, vsx));
    const __m256d ey = _mm256_sub_pd(wy, _mm256_mul_pd(t, vsy));
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(ex, ex), _mm256_mul_pd(ey, ey));
    vbest = _mm256_min_pd(vbest, d2);
  }
  double best = hmin(vbest);
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

}  // namespace gvo_nav::kernels::avx2
