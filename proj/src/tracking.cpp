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

#include "gvo_nav/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

namespace gvo_nav {

Track init_track(Vec2 observation, double time, int id, const TrackingParams& params) {
  Track t;
  t.mean << observation.x, observation.y, 0.0, 0.0;
  const double pos_var = params.measurement_std * params.measurement_std;
  t.covariance = Eigen::Vector4d(pos_var, pos_var, params.initial_velocity_var, params.initial_velocity_var)
                     .asDiagonal();
  t.last_update = time;
  t.last_observed = time;
  t.id = id;
  return t;
}

Track kf_predict(const Track& track, double dt, double q) {
  if (dt < 0.0) throw std::invalid_argument("kf_predict: dt must be >= 0");
  Eigen::Matrix4d f = Eigen::Matrix4d::Identity();
  f(0, 2) = dt;
  f(1, 3) = dt;
  // Continuous white-acceleration noise, integrated over dt, per axis.
  const double dt2 = dt * dt;
  const double dt3 = dt2 * dt;
  Eigen::Matrix4d noise = Eigen::Matrix4d::Zero();
  noise(0, 0) = noise(1, 1) = q * dt3 / 3.0;
  noise(0, 2) = noise(2, 0) = noise(1, 3) = noise(3, 1) = q * dt2 / 2.0;
  noise(2, 2) = noise(3, 3) = q * dt;

  Track out = track;
  out.mean = f * track.mean;
  out.covariance = f * track.covariance * f.transpose() + noise;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  out.last_update = track.last_update + dt;
  return out;
}

Track kf_update(const Track& track, Vec2 observation, double r) {
  if (!std::isfinite(observation.x) || !std::isfinite(observation.y)) {
    throw std::invalid_argument("kf_update: non-finite observation");
  }
  if (!(r > 0.0)) throw std::invalid_argument("kf_update: r must be > 0");
  Eigen::Matrix<double, 2, 4> h = Eigen::Matrix<double, 2, 4>::Zero();
  h(0, 0) = 1.0;
  h(1, 1) = 1.0;
  const Eigen::Matrix2d meas_cov = (r * r) * Eigen::Matrix2d::Identity();
  const Eigen::Matrix4d& p = track.covariance;
  const Eigen::Matrix2d s = h * p * h.transpose() + meas_cov;
  const Eigen::Matrix<double, 4, 2> gain = p * h.transpose() * s.inverse();
  const Eigen::Vector2d innovation = Eigen::Vector2d(observation.x, observation.y) - h * track.mean;

  Track out = track;
  out.mean = track.mean + gain * innovation;
  const Eigen::Matrix4d a = Eigen::Matrix4d::Identity() - gain * h;
  out.covariance = a * p * a.transpose() + gain * meas_cov * gain.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  out.last_observed = track.last_update;
  return out;
}

GaussianPrediction predict_distribution(const Track& track, double t,
                                        const std::optional<Eigen::Matrix2d>& velocity_cov_prior) {
  if (t < 0.0) throw std::invalid_argument("predict_distribution: t must be >= 0");
  GaussianPrediction g;
  g.mean = track.mean.head<2>() + t * track.mean.tail<2>();
  const Eigen::Matrix2d sigma_v = velocity_cov_prior ? *velocity_cov_prior : track.covariance.block<2, 2>(2, 2);
  g.covariance = track.covariance.block<2, 2>(0, 0) + (t * t) * sigma_v;
  g.horizon = t;
  return g;
}

PredictionEvaluator::PredictionEvaluator(const GaussianPrediction& pred) : mean_(pred.mean) {
  const Eigen::Matrix2d& c = pred.covariance;
  const double det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
  if (!(c(0, 0) > 0.0) || !(det > 0.0) || !std::isfinite(det)) {
    throw std::domain_error("prediction covariance is not positive definite");
  }
  inverse_ << c(1, 1) / det, -c(0, 1) / det, -c(1, 0) / det, c(0, 0) / det;
}

double PredictionEvaluator::mahalanobis_sq(Vec2 point) const {
  const Eigen::Vector2d d(point.x - mean_(0), point.y - mean_(1));
  return d.dot(inverse_ * d);
}

double PredictionEvaluator::normalized_pdf(Vec2 point) const { return std::exp(-0.5 * mahalanobis_sq(point)); }

double normalized_pdf_at(const GaussianPrediction& pred, Vec2 point) {
  return PredictionEvaluator(pred).normalized_pdf(point);
}

bool is_spd(const Eigen::Matrix4d& m) {
  if ((m - m.transpose()).norm() >= 1e-12) return false;
  return Eigen::LLT<Eigen::Matrix4d>(m).info() == Eigen::Success;
}

Tracker::Tracker(TrackingParams params) : params_(std::move(params)) {}

void Tracker::advance(double now, std::span<const Vec2> observations) {
  for (Track& t : tracks_) {
    if (now > t.last_update) t = kf_predict(t, now - t.last_update, params_.process_noise);
  }

  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t k = 0; k < tracks_.size(); ++k) {
    for (std::size_t j = 0; j < observations.size(); ++j) {
      const double d = distance(tracks_[k].position(), observations[j]);
      if (d <= params_.gate) pairs.emplace_back(d, k, j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  std::vector<bool> track_used(tracks_.size(), false);
  std::vector<bool> obs_used(observations.size(), false);
  for (const auto& [d, k, j] : pairs) {
    if (track_used[k] || obs_used[j]) continue;
    track_used[k] = true;
    obs_used[j] = true;
    tracks_[k] = kf_update(tracks_[k], observations[j], params_.measurement_std);
  }

  std::erase_if(tracks_, [&](const Track& t) { return now - t.last_observed > params_.stale_after; });
  for (std::size_t j = 0; j < observations.size(); ++j) {
    if (!obs_used[j]) tracks_.push_back(init_track(observations[j], now, next_id_++, params_));
  }
}

}  // namespace gvo_nav
