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

// Point-set distance kernels. These are the inner loops of the static
// collision sweep (avoidance), the segment clearance test (planner) and the
// clearance queries (perception, harness).
//
// Every kernel has a scalar reference and SIMD variants. Variants perform the
// same IEEE operations in the same order per lane (no FMA), and min() is
// exact, so all variants return bit-identical results. The active variant is
// picked once at startup from CPU features; GVO_NAV_KERNELS=scalar forces the
// reference path.

#ifndef GVO_NAV_KERNELS_HPP_
#define GVO_NAV_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "gvo_nav/core.hpp"

namespace gvo_nav::kernels {

/// Structure-of-arrays view over 2D points.
struct PointsView {
  std::span<const double> xs;
  std::span<const double> ys;

  std::size_t size() const { return xs.size(); }
  bool empty() const { return xs.empty(); }
};

/// Owning structure-of-arrays point set.
class PointCloud {
 public:
  PointCloud() = default;

  void reserve(std::size_t n) {
    xs_.reserve(n);
    ys_.reserve(n);
  }
  void push_back(Vec2 p) {
    xs_.push_back(p.x);
    ys_.push_back(p.y);
  }
  void clear() {
    xs_.clear();
    ys_.clear();
  }
  std::size_t size() const { return xs_.size(); }
  bool empty() const { return xs_.empty(); }
  Vec2 operator[](std::size_t i) const { return {xs_[i], ys_[i]}; }
  PointsView view() const { return {xs_, ys_}; }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

enum class Isa { kScalar, kAvx2, kNeon };

std::string_view isa_name(Isa isa);
bool isa_available(Isa isa);
/// Variant used by the dispatched entry points below.
Isa active_isa();
/// Overrides the dispatch choice; throws std::invalid_argument when the
/// variant is not available on this CPU. Intended for tests and benchmarks.
void force_isa(Isa isa);

/// Minimum squared distance from (qx, qy) to any point; +inf when empty.
double min_dist_sq(PointsView pts, double qx, double qy);

/// Minimum squared distance from any point to the closed segment a-b;
/// +inf when empty.
double min_segment_dist_sq(PointsView pts, double ax, double ay, double bx, double by);

namespace scalar {
double min_dist_sq(PointsView pts, double qx, double qy);
double min_segment_dist_sq(PointsView pts, double ax, double ay, double bx, double by);
}  // namespace scalar

namespace avx2 {
double min_dist_sq(PointsView pts, double qx, double qy);
double min_segment_dist_sq(PointsView pts, double ax, double ay, double bx, double by);
}  // namespace avx2

namespace neon {
double min_dist_sq(PointsView pts, double qx, double qy);
double min_segment_dist_sq(PointsView pts, double ax, double ay, double bx, double by);
}  // namespace neon

}  // namespace gvo_nav::kernels

#endif  // GVO_NAV_KERNELS_HPP_
