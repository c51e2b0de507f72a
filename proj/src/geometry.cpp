#include "smmvs/geometry.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace smmvs {

namespace {

constexpr double kOrthoTol = 1e-9;

double orthonormality_drift(const Eigen::Matrix3d& R) {
  return (R.transpose() * R - Eigen::Matrix3d::Identity())
      .cwiseAbs()
      .maxCoeff();
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& R) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(
      R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d Q = svd.matrixU() * svd.matrixV().transpose();
  if (Q.determinant() < 0.0) {
    Eigen::Matrix3d flip = Eigen::Matrix3d::Identity();
    flip(2, 2) = -1.0;
    Q = svd.matrixU() * flip * svd.matrixV().transpose();
  }
  return Q;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& w) {
  Eigen::Matrix3d m;
  m << 0.0, -w.z(), w.y(), w.z(), 0.0, -w.x(), -w.y(), w.x(), 0.0;
  return m;
}

}  // namespace

CameraPose::CameraPose(const Eigen::Matrix3d& rotation,
                       const Eigen::Vector3d& translation)
    : rotation_(rotation), translation_(translation) {
  if (!rotation_.allFinite() || !translation_.allFinite()) {
    throw std::invalid_argument("CameraPose: non-finite entries");
  }
  if (orthonormality_drift(rotation_) > kOrthoTol ||
      std::abs(rotation_.determinant() - 1.0) > kOrthoTol) {
    throw std::invalid_argument("CameraPose: rotation is not orthonormal");
  }
}

CameraPose CameraPose::inverse() const {
  return CameraPose(rotation_.transpose(),
                    -(rotation_.transpose() * translation_));
}

CameraPose CameraPose::operator*(const CameraPose& rhs) const {
  return CameraPose(rotation_ * rhs.rotation_,
                    rotation_ * rhs.translation_ + translation_);
}

Eigen::Vector3d CameraPose::to_camera(const Eigen::Vector3d& p_world) const {
  return rotation_.transpose() * (p_world - translation_);
}

Eigen::Vector3d CameraPose::to_world(const Eigen::Vector3d& p_camera) const {
  return rotation_ * p_camera + translation_;
}

Vector6d Twist::vector() const {
  Vector6d v;
  v << linear, angular;
  return v;
}

Twist Twist::from_vector(const Vector6d& v) {
  return Twist{v.head<3>(), v.tail<3>()};
}

bool Twist::is_zero() const {
  return linear.isZero(0.0) && angular.isZero(0.0);
}

void Intrinsics::validate() const {
  if (width <= 0 || height <= 0) {
    throw std::invalid_argument("Intrinsics: image dimensions must be positive");
  }
  if (!(focal_u > 0.0) || !(focal_v > 0.0)) {
    throw std::invalid_argument("Intrinsics: focal lengths must be positive");
  }
  if (center_u < 0.0 || center_u >= width || center_v < 0.0 ||
      center_v >= height) {
    throw std::invalid_argument(
        "Intrinsics: principal point must lie inside the image");
  }
}

CameraPose pose_from_euler(double tx, double ty, double tz, double alpha,
                           double beta, double gamma) {
  const Eigen::Matrix3d R =
      (Eigen::AngleAxisd(alpha, Eigen::Vector3d::UnitX()) *
       Eigen::AngleAxisd(beta, Eigen::Vector3d::UnitY()) *
       Eigen::AngleAxisd(gamma, Eigen::Vector3d::UnitZ()))
          .toRotationMatrix();
  return CameraPose(R, Eigen::Vector3d(tx, ty, tz));
}

Eigen::Vector3d euler_from_rotation(const Eigen::Matrix3d& R) {
  const double sb = std::clamp(R(0, 2), -1.0, 1.0);
  const double beta = std::asin(sb);
  if (std::abs(sb) > 1.0 - 1e-12) {
    // Gimbal lock: alpha and gamma are coupled, report gamma = 0.
    return {std::atan2(R(2, 1), R(1, 1)), beta, 0.0};
  }
  return {std::atan2(-R(1, 2), R(2, 2)), beta, std::atan2(-R(0, 1), R(0, 0))};
}

Eigen::Vector2d pixel_to_normalized(double u, double v, const Intrinsics& K) {
  return {(u - K.center_u) / K.focal_u, (v - K.center_v) / K.focal_v};
}

Eigen::Vector2d normalized_to_pixel(double x, double y, const Intrinsics& K) {
  return {x * K.focal_u + K.center_u, y * K.focal_v + K.center_v};
}

double rotation_angle(const Eigen::Matrix3d& R) {
  const double c = std::clamp((R.trace() - 1.0) / 2.0, -1.0, 1.0);
  return std::acos(c);
}

CameraPose integrate_twist(const CameraPose& pose, const Twist& twist,
                           double dt) {
  if (!twist.linear.allFinite() || !twist.angular.allFinite()) {
    throw std::invalid_argument("integrate_twist: non-finite twist");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("integrate_twist: dt must be positive");
  }
  if (twist.is_zero()) {
    return pose;
  }

  const Eigen::Vector3d w = twist.angular * dt;
  const Eigen::Vector3d u = twist.linear * dt;
  const double theta = w.norm();

  // Rodrigues coefficients with series fallback near theta = 0.
  double a, b, c;
  if (theta < 1e-8) {
    const double t2 = theta * theta;
    a = 1.0 - t2 / 6.0;
    b = 0.5 - t2 / 24.0;
    c = 1.0 / 6.0 - t2 / 120.0;
  } else {
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / (theta * theta);
    c = (theta - std::sin(theta)) / (theta * theta * theta);
  }

  const Eigen::Matrix3d W = skew(w);
  const Eigen::Matrix3d W2 = W * W;
  const Eigen::Matrix3d dR = Eigen::Matrix3d::Identity() + a * W + b * W2;
  const Eigen::Matrix3d V = Eigen::Matrix3d::Identity() + b * W + c * W2;

  Eigen::Matrix3d R = pose.rotation() * dR;
  if (orthonormality_drift(R) > kOrthoTol) {
    R = nearest_rotation(R);
  }
  return CameraPose(R, pose.rotation() * (V * u) + pose.translation());
}

}  // namespace smmvs
