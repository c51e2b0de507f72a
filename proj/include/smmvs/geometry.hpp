#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace smmvs {

using Vector6d = Eigen::Matrix<double, 6, 1>;

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

/// Rigid camera-to-world transform: p_world = R * p_camera + T.
/// The rotation is kept orthonormal (checked to 1e-9 on construction).
class CameraPose {
 public:
  CameraPose()
      : rotation_(Eigen::Matrix3d::Identity()),
        translation_(Eigen::Vector3d::Zero()) {}
  CameraPose(const Eigen::Matrix3d& rotation,
             const Eigen::Vector3d& translation);

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  CameraPose inverse() const;
  CameraPose operator*(const CameraPose& rhs) const;

  Eigen::Vector3d to_camera(const Eigen::Vector3d& p_world) const;
  Eigen::Vector3d to_world(const Eigen::Vector3d& p_camera) const;

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

/// Camera velocity in the camera frame.
struct Twist {
  Eigen::Vector3d linear = Eigen::Vector3d::Zero();   // m/s
  Eigen::Vector3d angular = Eigen::Vector3d::Zero();  // rad/s

  Vector6d vector() const;
  static Twist from_vector(const Vector6d& v);
  bool is_zero() const;
};

/// Pinhole camera parameters, pixel units.
struct Intrinsics {
  double focal_u = 0.0;
  double focal_v = 0.0;
  double center_u = 0.0;
  double center_v = 0.0;
  int width = 0;
  int height = 0;

  void validate() const;  // throws std::invalid_argument
};

/// Builds a pose from translation and Euler angles, R = Rx(alpha) * Ry(beta) * Rz(gamma).
/// This convention is fixed project-wide; conversions elsewhere assume it.
CameraPose pose_from_euler(double tx, double ty, double tz, double alpha,
                           double beta, double gamma);

/// Inverse of the Rx*Ry*Rz factorization; returns (alpha, beta, gamma) in radians.
Eigen::Vector3d euler_from_rotation(const Eigen::Matrix3d& R);

Eigen::Vector2d pixel_to_normalized(double u, double v, const Intrinsics& K);
Eigen::Vector2d normalized_to_pixel(double x, double y, const Intrinsics& K);

/// Rotation angle of R (radians, in [0, pi]).
double rotation_angle(const Eigen::Matrix3d& R);

/// Advances the pose by a camera-frame twist over dt seconds: pose * exp(dt * twist).
/// Throws on non-finite twist or dt <= 0. Zero twist returns the input pose exactly.
CameraPose integrate_twist(const CameraPose& pose, const Twist& twist, double dt);

}  // namespace smmvs
