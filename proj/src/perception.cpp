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

#include "gvo_nav/perception.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "gvo_nav/tracking.hpp"

namespace gvo_nav {

Cluster Cluster::from_points(std::vector<ScanPoint> points) {
  if (points.empty()) throw std::invalid_argument("Cluster: empty point list");
  Cluster c;
  double sx = 0.0;
  double sy = 0.0;
  c.timestamp_ = -std::numeric_limits<double>::infinity();
  c.cloud_.reserve(points.size());
  for (const ScanPoint& p : points) {
    sx += p.x;
    sy += p.y;
    c.timestamp_ = std::max(c.timestamp_, p.timestamp);
    c.cloud_.push_back(p.position());
  }
  const double n = static_cast<double>(points.size());
  c.centroid_ = {sx / n, sy / n};
  for (const ScanPoint& p : points) c.radius_ = std::max(c.radius_, distance(p.position(), c.centroid_));
  c.points_ = std::move(points);
  return c;
}

double Cluster::nearest_distance(Vec2 p) const {
  return std::sqrt(kernels::min_dist_sq(cloud_.view(), p.x, p.y));
}

namespace {

// Uniform grid with cell size eps; a closed eps-ball touches at most the
// 3x3 block of cells around the query cell.
class GridIndex {
 public:
  GridIndex(std::span<const ScanPoint> pts, std::span<const std::size_t> order, double cell)
      : pts_(pts), cell_(cell) {
    for (std::size_t idx : order) cells_[key(cell_of(pts[idx].x), cell_of(pts[idx].y))].push_back(idx);
  }

  void neighbors(std::size_t i, double eps, std::vector<std::size_t>& out) const {
    out.clear();
    const std::int64_t cx = cell_of(pts_[i].x);
    const std::int64_t cy = cell_of(pts_[i].y);
    const double eps2 = eps * eps;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        const auto it = cells_.find(key(cx + dx, cy + dy));
        if (it == cells_.end()) continue;
        for (std::size_t j : it->second) {
          const double ex = pts_[j].x - pts_[i].x;
          const double ey = pts_[j].y - pts_[i].y;
          if (ex * ex + ey * ey <= eps2) out.push_back(j);
        }
      }
    }
  }

 private:
  std::int64_t cell_of(double v) const { return static_cast<std::int64_t>(std::floor(v / cell_)); }
  static std::uint64_t key(std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^ (static_cast<std::uint64_t>(cy) & 0xffffffffULL);
  }

  std::span<const ScanPoint> pts_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;
};

constexpr int kUnvisited = -2;
constexpr int kNoise = -1;

}  // namespace

ClusterResult cluster_scan(std::span<const ScanPoint> points, const ClusteringParams& params) {
  if (!(params.eps > 0.0)) throw std::invalid_argument("cluster_scan: eps must be > 0");
  if (params.min_pts < 1) throw std::invalid_argument("cluster_scan: min_pts must be >= 1");
  ClusterResult result;
  if (points.empty()) return result;

  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const ScanPoint& p = points[a];
    const ScanPoint& q = points[b];
    if (p.x != q.x) return p.x < q.x;
    if (p.y != q.y) return p.y < q.y;
    return p.timestamp < q.timestamp;
  });
  const GridIndex grid(points, order, params.eps);
  std::vector<int> label(points.size(), kUnvisited);
  std::vector<std::size_t> hood;
  std::vector<std::size_t> inner;
  const auto min_pts = static_cast<std::size_t>(params.min_pts);
  int next_cluster = 0;

  for (std::size_t i : order) {
    if (label[i] != kUnvisited) continue;
    grid.neighbors(i, params.eps, hood);
    if (hood.size() < min_pts) {
      label[i] = kNoise;
      continue;
    }
    const int c = next_cluster++;
    label[i] = c;
    std::deque<std::size_t> frontier(hood.begin(), hood.end());
    while (!frontier.empty()) {
      const std::size_t q = frontier.front();
      frontier.pop_front();
      if (label[q] == kNoise) label[q] = c;  // border point
      if (label[q] != kUnvisited) continue;
      label[q] = c;
      grid.neighbors(q, params.eps, inner);
      if (inner.size() >= min_pts) frontier.insert(frontier.end(), inner.begin(), inner.end());
    }
  }

  std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(next_cluster));
  for (std::size_t i : order) {
    if (label[i] >= 0) {
      members[static_cast<std::size_t>(label[i])].push_back(i);
    } else {
      result.noise.push_back(points[i]);
    }
  }
  result.clusters.reserve(members.size());
  for (const auto& m : members) {
    std::vector<ScanPoint> pts;
    pts.reserve(m.size());
    for (std::size_t i : m) pts.push_back(points[i]);
    result.clusters.push_back(Cluster::from_points(std::move(pts)));
  }
  return result;
}

ObstacleSet classify_clusters(std::span<const Cluster> clusters, std::span<const Track> tracks,
                              const ClassifyParams& params) {
  if (!(params.v_dyn_th > 0.0)) throw std::invalid_argument("classify_clusters: v_dyn_th must be > 0");
  // Gated cluster-track pairs, matched one-to-one closest first.
  struct Pair {
    double d;
    std::size_t cluster;
    std::size_t track;
  };
  std::vector<Pair> pairs;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (std::size_t k = 0; k < tracks.size(); ++k) {
      const Track& tr = tracks[k];
      const double lead = std::max(0.0, clusters[c].timestamp() - tr.last_update);
      const Vec2 predicted = tr.position() + lead * tr.velocity();
      const double d = distance(predicted, clusters[c].centroid());
      if (d <= params.gate) pairs.push_back({d, c, k});
    }
  }
  std::stable_sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.d < b.d; });
  std::vector<std::size_t> match(clusters.size(), tracks.size());
  std::vector<bool> track_used(tracks.size(), false);
  for (const Pair& p : pairs) {
    if (match[p.cluster] < tracks.size() || track_used[p.track]) continue;
    match[p.cluster] = p.track;
    track_used[p.track] = true;
  }

  ObstacleSet out;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const std::size_t k = match[c];
    if (k < tracks.size() && tracks[k].speed() > params.v_dyn_th) {
      out.dynamic_clusters.push_back(clusters[c]);
      out.dynamic_track_index.push_back(k);
    } else {
      out.static_clusters.push_back(clusters[c]);
    }
  }
  return out;
}

std::vector<Cluster> statics_within(const ObstacleSet& obstacles, const Pose& robot, double dis_sta) {
  if (!(dis_sta > 0.0)) throw std::invalid_argument("statics_within: dis_sta must be > 0");
  std::vector<Cluster> out;
  for (const Cluster& c : obstacles.static_clusters) {
    if (c.nearest_distance(robot.position()) <= dis_sta) out.push_back(c);
  }
  return out;
}

kernels::PointCloud merge_clouds(std::span<const Cluster> clusters) {
  kernels::PointCloud cloud;
  std::size_t n = 0;
  for (const Cluster& c : clusters) n += c.points().size();
  cloud.reserve(n);
  for (const Cluster& c : clusters) {
    for (const ScanPoint& p : c.points()) cloud.push_back(p.position());
  }
  return cloud;
}

std::vector<std::size_t> moving_clusters(std::span<const Cluster> previous,
                                         std::span<const Cluster> current, double dt,
                                         const ClassifyParams& params, double max_radius) {
  std::vector<std::size_t> out;
  if (!(dt > 0.0)) return out;
  for (std::size_t i = 0; i < current.size(); ++i) {
    if (current[i].radius() > max_radius) continue;
    double best = std::numeric_limits<double>::infinity();
    for (const Cluster& p : previous) best = std::min(best, distance(p.centroid(), current[i].centroid()));
    if (best <= params.gate && best / dt > params.v_dyn_th) out.push_back(i);
  }
  return out;
}

}  // namespace gvo_nav
