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

#ifndef GVO_NAV_PERCEPTION_HPP_
#define GVO_NAV_PERCEPTION_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "gvo_nav/core.hpp"
#include "gvo_nav/kernels.hpp"

namespace gvo_nav {

struct Track;

/// A laser return in the world frame.
struct ScanPoint {
  double x = 0.0;
  double y = 0.0;
  double timestamp = 0.0;

  Vec2 position() const { return {x, y}; }
};

/// A non-empty group of laser points. Built through Cluster::from_points so
/// the centroid, radius and SoA copy stay consistent with the points.
class Cluster {
 public:
  /// Throws std::invalid_argument on an empty point list.
  static Cluster from_points(std::vector<ScanPoint> points);

  const std::vector<ScanPoint>& points() const { return points_; }
  Vec2 centroid() const { return centroid_; }
  /// Largest centroid-to-point distance.
  double radius() const { return radius_; }
  /// Latest timestamp among the points.
  double timestamp() const { return timestamp_; }
  kernels::PointsView cloud() const { return cloud_.view(); }

  /// Distance from p to the nearest point of the cluster.
  double nearest_distance(Vec2 p) const;

 private:
  Cluster() = default;

  std::vector<ScanPoint> points_;
  kernels::PointCloud cloud_;
  Vec2 centroid_;
  double radius_ = 0.0;
  double timestamp_ = 0.0;
};

struct ClusteringParams {
  double eps = 0.3;
  int min_pts = 3;
};

struct ClusterResult {
  std::vector<Cluster> clusters;
  std::vector<ScanPoint> noise;
};

/// Density-based clustering (DBSCAN). Points are visited in a canonical
/// (x, y, timestamp) order, so the partition does not depend on input order;
/// clusters are listed in the order of their smallest point.
ClusterResult cluster_scan(std::span<const ScanPoint> points, const ClusteringParams& params);

struct ObstacleSet {
  std::vector<Cluster> static_clusters;
  std::vector<Cluster> dynamic_clusters;
  /// Index into the track list of the track matched to each dynamic cluster.
  std::vector<std::size_t> dynamic_track_index;
};

struct ClassifyParams {
  double v_dyn_th = 0.3;
  double gate = 0.8;
};

/// Splits clusters into static and dynamic ones. Clusters and tracks are
/// matched one-to-one, closest pairs first, on the distance from the track's
/// predicted position (mean advanced to the cluster timestamp) to the
/// centroid, within the gate. A cluster is dynamic when its track moves
/// faster than v_dyn_th.
ObstacleSet classify_clusters(std::span<const Cluster> clusters, std::span<const Track> tracks,
                              const ClassifyParams& params);

/// Static clusters whose nearest point lies within dis_sta (inclusive) of
/// the robot position.
std::vector<Cluster> statics_within(const ObstacleSet& obstacles, const Pose& robot, double dis_sta);

/// Concatenates the points of several clusters into one SoA set.
kernels::PointCloud merge_clouds(std::span<const Cluster> clusters);

/// Indices of clusters in `current` that look like moving objects: the
/// nearest centroid in `previous` lies within `gate` and the implied speed
/// exceeds v_dyn_th, and the cluster is no larger than max_radius. Used to
/// seed tracks when no ground-truth labels are available.
std::vector<std::size_t> moving_clusters(std::span<const Cluster> previous,
                                         std::span<const Cluster> current, double dt,
                                         const ClassifyParams& params, double max_radius);

}  // namespace gvo_nav

#endif  // GVO_NAV_PERCEPTION_HPP_
