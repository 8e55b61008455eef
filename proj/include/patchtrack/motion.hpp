#pragma once

#include <Eigen/Dense>

#include "patchtrack/geometry.hpp"

namespace patchtrack {

/// Height-proportional noise scales: measurement/process position stds are
/// position_weight * h, velocity stds velocity_weight * h.
struct MotionNoise {
  double position_weight = 1.0 / 20.0;
  double velocity_weight = 1.0 / 160.0;
};

/// Constant-velocity state (cx, cy, a, h, v_cx, v_cy, v_a, v_h) with a = w/h.
struct KalmanState {
  Eigen::Matrix<double, 8, 1> mean = Eigen::Matrix<double, 8, 1>::Zero();
  Eigen::Matrix<double, 8, 8> covariance = Eigen::Matrix<double, 8, 8>::Zero();
};

/// Position and size from the box, zero velocities, diagonal covariance.
KalmanState kf_init(const BBox& box, const MotionNoise& noise = {});

/// One-frame constant-velocity transition (dt = 1): x' = Fx, P' = FPF^T + Q.
KalmanState kf_predict(const KalmanState& s, const MotionNoise& noise = {});

/// Kalman correction against the (cx, cy, a, h) measurement of obs.
KalmanState kf_update(const KalmanState& s, const BBox& obs,
                      const MotionNoise& noise = {});

/// Inverse of the (cx, cy, a, h) encoding; w = a*h.
/// Throws DegenerateStateError when the height or width is at or below the
/// representable floor.
BBox state_to_bbox(const KalmanState& s);

}  // namespace patchtrack
