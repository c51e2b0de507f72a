#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smmvs/servo.hpp"

namespace smmvs {

/// Shared world layout for the scripted studies: plane at the world origin
/// facing the camera, desired camera on the optical axis at desired_depth.
struct StudyGeometry {
  int resolution = 50;
  double desired_depth = 0.5;   // m between desired camera and plane
  double plane_span = 0.4;      // m covered by the texture width
  double background = 0.0;
  double focal_ratio = 0.7;     // focal = focal_ratio * resolution
};

Intrinsics intrinsics_for(const StudyGeometry& g);
PlanarScene scene_for(const Image& texture, const StudyGeometry& g);
CameraPose desired_pose_for(const StudyGeometry& g);

/// One scripted servo run. initial_offset is (tx, ty, tz) in meters and
/// (alpha, beta, gamma) in degrees, relative to the desired pose.
struct ExperimentCase {
  std::string name;
  Vector6d initial_offset = Vector6d::Zero();
  DofMask dof_mask;
  StudyGeometry geometry;
  SmmConfig smm;
  ControllerConfig ctrl;
  std::optional<OcclusionPatch> occlusion;
};

struct CaseResult {
  std::string name;
  Vector6d final_error = Vector6d::Zero();  // m / deg
  int iterations = 0;
  ServoStatus status = ServoStatus::kMaxIters;
  bool degenerate = false;
  std::string trace_path;
  double initial_err_norm = 0.0;
  double terminal_err_norm = 0.0;
  double smoothness = 0.0;    // mean |second difference| of twist components
  double smm_time_ms = 0.0;   // one desired-image SMM transform
};

struct ExperimentReport {
  std::vector<CaseResult> cases;
  std::string report_path;

  bool all_converged() const;
  int converged_count() const;
};

struct ExperimentEnv {
  std::string data_dir = "data";
  std::string out_dir = "out";
  int progress_every = 0;  // stderr log cadence, 0 = silent
};

/// The initial pose offsets of the scripted positioning studies.
std::vector<Vector6d> table1_offsets();
std::vector<Vector6d> table2_offsets();

/// 2D positioning: 5 planar cases (vx, vy, wz) at fixed depth.
ExperimentReport run_table1(const ExperimentEnv& env);

/// 3D positioning: 10 full 6-DOF cases at ~0.5 m working depth.
ExperimentReport run_table2(const ExperimentEnv& env);

/// The 3D case `res4` at 50x50 and 100x100, with twist-smoothness metrics.
ExperimentReport run_resolution_study(const ExperimentEnv& env);

/// Occluded run (view-space patch on current images) plus a clean control run.
ExperimentReport run_occlusion_study(const ExperimentEnv& env);

/// One case per texture plus an all-constant degenerate scene.
ExperimentReport run_content_study(const ExperimentEnv& env,
                                   const std::vector<std::string>& textures);

/// Cost 0.5*|e|^2 over an n x n lattice of (tx, ty) displacements spanning
/// [-extent, extent] around the desired pose. Row index = ty, column = tx.
Eigen::MatrixXd sample_cost_landscape(const PlanarScene& scene,
                                      const CameraPose& desired,
                                      const Intrinsics& K,
                                      const SmmConfig& smm_cfg, int n,
                                      double extent);

void write_landscape_csv(const Eigen::MatrixXd& grid, const std::string& path);

/// Runs one explicit case end to end and writes its artifacts
/// (trace.csv, initial/final/desired/diff.pgm) under out_dir/<case name>.
CaseResult run_experiment_case(const ExperimentCase& c, const Image& texture,
                               const ExperimentEnv& env,
                               const std::string& out_dir);

void write_report_csv(const ExperimentReport& report, const std::string& path);

}  // namespace smmvs
