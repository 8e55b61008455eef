#include "patchtrack/motion.hpp"

#include <algorithm>

#include "patchtrack/errors.hpp"

namespace patchtrack {

namespace {

using Vec4 = Eigen::Matrix<double, 4, 1>;
using Vec8 = Eigen::Matrix<double, 8, 1>;
using Mat4 = Eigen::Matrix<double, 4, 4>;
using Mat8 = Eigen::Matrix<double, 8, 8>;
using Mat48 = Eigen::Matrix<double, 4, 8>;

// Aspect ratio is near-constant and unitless, so its noise is fixed rather
// than height-scaled.
constexpr double kAspectInitStd = 1e-2;
constexpr double kAspectProcessStd = 1e-2;
constexpr double kAspectVelocityStd = 1e-5;
constexpr double kAspectMeasureStd = 1e-1;

// Floor keeping a and h usable after adverse updates.
constexpr double kStateFloor = 1e-6;
// Below this, state_to_bbox refuses to produce a box.
constexpr double kDegenerateEps = 1e-9;

Vec4 box_to_measurement(const BBox& b) {
  Vec4 z;
  z << b.cx(), b.cy(), b.w / b.h, b.h;
  return z;
}

void clamp_shape(Vec8& mean) {
  mean(2) = std::max(mean(2), kStateFloor);
  mean(3) = std::max(mean(3), kStateFloor);
}

void symmetrize(Mat8& p) { p = 0.5 * (p + p.transpose()).eval(); }

}  // namespace

KalmanState kf_init(const BBox& box, const MotionNoise& noise) {
  KalmanState s;
  s.mean.head<4>() = box_to_measurement(box);
  const double h = box.h;
  Vec8 std;
  std << 2.0 * noise.position_weight * h, 2.0 * noise.position_weight * h,
      kAspectInitStd, 2.0 * noise.position_weight * h,
      10.0 * noise.velocity_weight * h, 10.0 * noise.velocity_weight * h,
      kAspectVelocityStd, 10.0 * noise.velocity_weight * h;
  s.covariance = std.array().square().matrix().asDiagonal();
  return s;
}

KalmanState kf_predict(const KalmanState& s, const MotionNoise& noise) {
  Mat8 f = Mat8::Identity();
  f.topRightCorner<4, 4>() = Mat4::Identity();  // dt = 1 frame

  const double h = s.mean(3);
  Vec8 std;
  std << noise.position_weight * h, noise.position_weight * h, kAspectProcessStd,
      noise.position_weight * h, noise.velocity_weight * h,
      noise.velocity_weight * h, kAspectVelocityStd, noise.velocity_weight * h;
  const Mat8 q = std.array().square().matrix().asDiagonal();

  KalmanState out;
  out.mean = f * s.mean;
  out.covariance = f * s.covariance * f.transpose() + q;
  symmetrize(out.covariance);
  clamp_shape(out.mean);
  return out;
}

KalmanState kf_update(const KalmanState& s, const BBox& obs,
                      const MotionNoise& noise) {
  Mat48 hm = Mat48::Zero();
  hm.leftCols<4>() = Mat4::Identity();

  const double h = s.mean(3);
  Vec4 std;
  std << noise.position_weight * h, noise.position_weight * h, kAspectMeasureStd,
      noise.position_weight * h;
  const Mat4 r = std.array().square().matrix().asDiagonal();

  const Mat4 innovation_cov = hm * s.covariance * hm.transpose() + r;
  // K = P H^T S^-1, via the Cholesky solve of S (S is SPD by construction).
  const Eigen::Matrix<double, 8, 4> gain =
      innovation_cov.llt().solve(hm * s.covariance).transpose();

  const Vec4 innovation = box_to_measurement(obs) - hm * s.mean;

  KalmanState out;
  out.mean = s.mean + gain * innovation;
  out.covariance = (Mat8::Identity() - gain * hm) * s.covariance;
  symmetrize(out.covariance);
  clamp_shape(out.mean);
  return out;
}

BBox state_to_bbox(const KalmanState& s) {
  const double a = s.mean(2);
  const double h = s.mean(3);
  if (!(h > kDegenerateEps) || !(a * h > kDegenerateEps)) {
    throw DegenerateStateError("state height/width below epsilon");
  }
  const double w = a * h;
  return BBox{s.mean(0) - 0.5 * w, s.mean(1) - 0.5 * h, w, h};
}

}  // namespace patchtrack
