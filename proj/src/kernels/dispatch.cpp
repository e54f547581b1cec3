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

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "gvo_nav/kernels.hpp"

namespace gvo_nav::kernels {
namespace {

#if defined(__x86_64__) || defined(_M_X64)
constexpr bool kHasAvx2Build = true;
#else
constexpr bool kHasAvx2Build = false;
#endif

#if defined(__aarch64__)
constexpr bool kHasNeonBuild = true;
#else
constexpr bool kHasNeonBuild = false;
#endif

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa detect() {
  if (const char* env = std::getenv("GVO_NAV_KERNELS"); env != nullptr && std::string(env) == "scalar") {
    return Isa::kScalar;
  }
  if (kHasAvx2Build && cpu_has_avx2()) return Isa::kAvx2;
  if (kHasNeonBuild) return Isa::kNeon;
  return Isa::kScalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

// Symbols for variants not compiled on this architecture. Never selected,
// since isa_available() reports them missing.
#if !(defined(__x86_64__) || defined(_M_X64))
namespace avx2 {
double min_dist_sq(PointsView pts, double qx, double qy) { return scalar::min_dist_sq(pts, qx, qy); }
double min_segment_dist_sq(PointsView pts, double ax, double ay, double bx, double by) {
  return scalar::min_segment_dist_sq(pts, ax, ay, bx, by);
}
}  // namespace avx2
#endif
#if !defined(__aarch64__)
namespace neon {
double min_dist_sq(PointsView pts, double qx, double qy) { return scalar::min_dist_sq(pts, qx, qy); }
double min_segment_dist_sq(PointsView pts, double ax, double ay, double bx, double by) {
  return scalar::min_segment_dist_sq(pts, ax, ay, bx, by);
}
}  // namespace neon
#endif

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return "scalar";
    case Isa::kAvx2:
      return "avx2";
    case Isa::kNeon:
      return "neon";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  switch (isa) {
    case Isa::kScalar:
      return true;
    case Isa::kAvx2:
      return kHasAvx2Build && cpu_has_avx2();
    case Isa::kNeon:
      return kHasNeonBuild;
  }
  return false;
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
  if (!isa_available(isa)) {
    throw std::invalid_argument("kernel variant not available: " + std::string(isa_name(isa)));
  }
  current().store(isa, std::memory_order_relaxed);
}

double min_dist_sq(PointsView pts, double qx, double qy) {
  switch (active_isa()) {
    case Isa::kAvx2:
      return avx2::min_dist_sq(pts, qx, qy);
    case Isa::kNeon:
      return neon::min_dist_sq(pts, qx, qy);
    case Isa::kScalar:
      break;
  }
  return scalar::min_dist_sq(pts, qx, qy);
}

double min_segment_dist_sq(PointsView pts, double ax, double ay, double bx, double by) {
  switch (active_isa()) {
    case Isa::kAvx2:
      return avx2::min_segment_dist_sq(pts, ax, ay, bx, by);
    case Isa::kNeon:
      return neon::min_segment_dist_sq(pts, ax, ay, bx, by);
    case Isa::kScalar:
      break;
  }
  return scalar::min_segment_dist_sq(pts, ax, ay, bx, by);
}

}  // namespace gvo_nav::kernels
