#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "smmvs/geometry.hpp"
#include "smmvs/scene.hpp"
#include "smmvs/smm.hpp"

namespace smmvs {

using InteractionMatrix = Eigen::MatrixXd;  // k x 6
using ErrorVector = Eigen::VectorXd;        // k

/// Active twist components, ordered (vx, vy, vz, wx, wy, wz).
struct DofMask {
  std::array<bool, 6> active{true, true, true, true, true, true};

  static DofMask all();
  static DofMask planar();  // vx, vy, wz — the fixed-depth 2D task
  static DofMask from_string(const std::string& spec);  // "all" or "vx,vy,wz"
  std::string to_string() const;
  int count() const;
};

struct ControllerConfig {
  double lambda = 0.8;             // 1/s
  double dt = 1.0;                 // s
  int max_iters = 300;
  double convergence_ratio = 0.01;  // on |e| / |e0|
  DofMask dof_mask;

  enum class InteractionSource { kDesired, kCurrent };
  InteractionSource interaction_source = InteractionSource::kDesired;

  void validate() const;  // throws std::invalid_argument
};

enum class ServoStatus { kConverged, kMaxIters, kDiverged };

std::string to_string(ServoStatus status);

struct ServoRecord {
  int iter = 0;
  CameraPose pose;
  Twist twist;
  double err_norm = 0.0;
};

struct ServoTrace {
  std::vector<ServoRecord> records;
  ServoStatus status = ServoStatus::kMaxIters;
  double initial_err = 0.0;
  double final_err = 0.0;

  const CameraPose& final_pose() const { return records.back().pose; }
  int iterations() const { return static_cast<int>(records.size()); }
};

/// Interaction matrix of a normalized image point at depth Z:
///   row 1: [-1/Z, 0, x/Z, x*y, -(1 + x^2), y]
///   row 2: [0, -1/Z, y/Z, 1 + y^2, -x*y, -x]
/// Throws when Z = 0.
Eigen::Matrix<double, 2, 6> point_interaction_matrix(double x, double y,
                                                     double Z);

/// One stacked row of the SMM interaction matrix: -grad(S)^T * L_x.
Eigen::Matrix<double, 1, 6> smm_interaction_row(double grad_x, double grad_y,
                                                double x, double y, double Z);

/// Stacks one row per pixel in row-major order; columns of inactive twist
/// components are zeroed.
InteractionMatrix build_interaction_matrix(const SmmGradient& grad,
                                           const Intrinsics& K, double Z,
                                           const DofMask& mask);

/// Moore-Penrose pseudoinverse by SVD; singular values below 1e-6 times the
/// largest are treated as zero.
Eigen::MatrixXd pseudo_inverse(const InteractionMatrix& L);

/// Control law: twist = -lambda * L_pinv * e, masked components forced to zero.
Twist control_step(const Eigen::MatrixXd& L_pinv, const ErrorVector& e,
                   double lambda, const DofMask& mask);

/// Least-squares cost 0.5 * |e|^2.
double cost_value(const ErrorVector& e);

ErrorVector smm_error(const SmmImage& current, const SmmImage& desired);

using ProgressFn = std::function<void(const ServoRecord&)>;

/// Closed loop: render, SMM-transform, error, control, integrate — until the
/// error norm falls to convergence_ratio * |e0|, exceeds 10 * |e0| (diverged),
/// or max_iters is reached. The interaction matrix comes from the desired
/// image and is reused across iterations unless interaction_source is
/// kCurrent. An occlusion patch, when given, corrupts current views only.
ServoTrace run_servo(const PlanarScene& scene, const CameraPose& initial,
                     const CameraPose& desired, const Intrinsics& K,
                     const SmmConfig& smm_cfg, const ControllerConfig& ctrl_cfg,
                     const std::optional<OcclusionPatch>& occlusion = {},
                     const ProgressFn& progress = {});

/// Trace CSV: header iter,tx,ty,tz,alpha_deg,beta_deg,gamma_deg,vx,vy,vz,
/// wx,wy,wz,err_norm; one row per iteration, the terminal row repeated, and
/// the termination status in a trailing comment line.
void write_trace_csv(const ServoTrace& trace, const std::string& path);

/// Error-norm column of a trace CSV (terminal repeat row dropped).
std::vector<double> read_trace_err_norms(const std::string& path);

}  // namespace smmvs
