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

#ifndef GVO_NAV_TRACKING_HPP_
#define GVO_NAV_TRACKING_HPP_

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gvo_nav/core.hpp"

namespace gvo_nav {

/// Constant-velocity Kalman state [px, py, vx, vy].
struct Track {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d covariance = Eigen::Matrix4d::Identity();
  /// Time at which mean/covariance are valid.
  double last_update = 0.0;
  /// Time of the last accepted observation.
  double last_observed = 0.0;
  int id = 0;

  Vec2 position() const { return {mean(0), mean(1)}; }
  Vec2 velocity() const { return {mean(2), mean(3)}; }
  double speed() const { return std::hypot(mean(2), mean(3)); }
};

/// Position distribution of a track at a future time.
struct GaussianPrediction {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Identity();
  double horizon = 0.0;
};

struct TrackingParams {
  double measurement_std = 0.05;  // r, m
  double process_noise = 0.5;     // q, m^2/s^3
  double initial_velocity_var = 1.0;
  double stale_after = 1.0;  // s
  double gate = 0.8;         // m
  /// When set, replaces the filter's velocity block in predictions.
  std::optional<Eigen::Matrix2d> velocity_cov_prior;
};

/// Track from a first observation: position = observation, zero velocity,
/// position variance r^2, velocity variance initial_velocity_var.
Track init_track(Vec2 observation, double time, int id, const TrackingParams& params);

/// Time update over dt >= 0 with white-acceleration process noise of
/// intensity q. Throws std::invalid_argument on negative dt.
Track kf_predict(const Track& track, double dt, double q);

/// Position measurement update (Joseph form). Throws std::invalid_argument
/// on a non-finite observation or r <= 0.
Track kf_update(const Track& track, Vec2 observation, double r);

/// N(mu_p + mu_v t, Sigma_p + t^2 Sigma_v) from the position and velocity
/// blocks of the track; position-velocity cross terms are not carried over.
GaussianPrediction predict_distribution(const Track& track, double t,
                                        const std::optional<Eigen::Matrix2d>& velocity_cov_prior = {});

/// Gaussian density at `point` divided by its peak value, exp(-d^2 / 2) for
/// Mahalanobis distance d. Throws std::domain_error when the covariance is
/// not positive definite.
double normalized_pdf_at(const GaussianPrediction& pred, Vec2 point);

/// Precomputed inverse for evaluating many points against one prediction.
class PredictionEvaluator {
 public:
  explicit PredictionEvaluator(const GaussianPrediction& pred);
  double normalized_pdf(Vec2 point) const;
  double mahalanobis_sq(Vec2 point) const;

 private:
  Eigen::Vector2d mean_;
  Eigen::Matrix2d inverse_;
};

bool is_spd(const Eigen::Matrix4d& m);

/// Owns the live tracks. Single writer: call advance() once per cycle with
/// the cycle's observations.
class Tracker {
 public:
  explicit Tracker(TrackingParams params);

  /// Predicts every track to `now`, associates observations to tracks by
  /// nearest predicted position within the gate (greedy, closest pairs first),
  /// updates matched tracks, spawns tracks for unmatched observations and
  /// drops tracks unobserved for longer than stale_after.
  void advance(double now, std::span<const Vec2> observations);

  const std::vector<Track>& tracks() const { return tracks_; }
  const TrackingParams& params() const { return params_; }

 private:
  TrackingParams params_;
  std::vector<Track> tracks_;
  int next_id_ = 0;
};

}  // namespace gvo_nav

#endif  // GVO_NAV_TRACKING_HPP_
