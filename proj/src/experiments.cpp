#include "smmvs/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace smmvs {

namespace fs = std::filesystem;

namespace {

CameraPose offset_pose(const Vector6d& off) {
  return pose_from_euler(off(0), off(1), off(2), deg2rad(off(3)),
                         deg2rad(off(4)), deg2rad(off(5)));
}

Vector6d relative_error(const CameraPose& desired, const CameraPose& final) {
  const CameraPose rel = desired.inverse() * final;
  const Eigen::Vector3d e = euler_from_rotation(rel.rotation());
  Vector6d out;
  out << rel.translation(), rad2deg(e.x()), rad2deg(e.y()), rad2deg(e.z());
  return out;
}

double twist_smoothness(const ServoTrace& trace) {
  // The terminal record carries a placeholder zero twist; drop it.
  const int n = trace.iterations() - 1;
  if (n < 3) return 0.0;
  double total = 0.0;
  for (int j = 0; j < 6; ++j) {
    double acc = 0.0;
    for (int k = 1; k + 1 < n; ++k) {
      const double a = trace.records[k - 1].twist.vector()(j);
      const double b = trace.records[k].twist.vector()(j);
      const double c = trace.records[k + 1].twist.vector()(j);
      acc += std::abs(c - 2.0 * b + a);
    }
    total += acc / (n - 2);
  }
  return total / 6.0;
}

ProgressFn make_progress(const std::string& name, int every) {
  if (every <= 0) return {};
  return [name, every](const ServoRecord& rec) {
    if (rec.iter % every == 0) {
      std::fprintf(stderr, "[%s] iter %d err %.6g\n", name.c_str(), rec.iter,
                   rec.err_norm);
    }
  };
}

Image constant_texture(int size, double value) {
  return Image(size, size, value);
}

std::string texture_stem(const std::string& path) {
  return fs::path(path).stem().string();
}

}  // namespace

Intrinsics intrinsics_for(const StudyGeometry& g) {
  Intrinsics K;
  K.width = g.resolution;
  K.height = g.resolution;
  K.focal_u = g.focal_ratio * g.resolution;
  K.focal_v = g.focal_ratio * g.resolution;
  K.center_u = (g.resolution - 1) / 2.0;
  K.center_v = (g.resolution - 1) / 2.0;
  return K;
}

PlanarScene scene_for(const Image& texture, const StudyGeometry& g) {
  PlanarScene scene;
  scene.texture = texture;
  scene.plane_pose = CameraPose();  // plane at the world origin
  scene.plane_scale = g.plane_span / texture.width();
  scene.background = g.background;
  return scene;
}

CameraPose desired_pose_for(const StudyGeometry& g) {
  return pose_from_euler(0.0, 0.0, -g.desired_depth, 0.0, 0.0, 0.0);
}

bool ExperimentReport::all_converged() const {
  return converged_count() == static_cast<int>(cases.size());
}

int ExperimentReport::converged_count() const {
  int n = 0;
  for (const auto& c : cases) {
    if (c.status == ServoStatus::kConverged) ++n;
  }
  return n;
}

std::vector<Vector6d> table1_offsets() {
  std::vector<Vector6d> offs(5);
  offs[0] << 0.30, 0.30, 0, 0, 0, 0;
  offs[1] << 0.25, 0.25, 0, 0, 0, -15;
  offs[2] << 0.25, 0.25, 0, 0, 0, 10;
  offs[3] << -0.30, 0.25, 0, 0, 0, -18;
  offs[4] << 0.40, 0.35, 0, 0, 0, 5;
  return offs;
}

std::vector<Vector6d> table2_offsets() {
  std::vector<Vector6d> offs(10);
  offs[0] << -0.40, -0.40, -0.50, 0.5, 1.0, -10;
  offs[1] << -0.40, -0.40, -0.53, 1.0, 0.3, -20;
  offs[2] << 0.36, 0.38, -0.48, 0.0, 0.3, -12;
  offs[3] << 0.35, 0.37, -0.55, 0.0, 0.0, 8;
  offs[4] << 0.22, -0.32, -0.51, 0.1, 1.2, 20;
  offs[5] << 0.37, 0.42, -0.46, 0.8, 0.5, 8;
  offs[6] << 0.30, -0.45, -0.48, 1.0, 0.5, -20;
  offs[7] << -0.37, 0.28, -0.52, -0.6, -0.1, -20;
  offs[8] << 0.35, 0.38, -0.53, 0.4, 0.3, -20;
  offs[9] << 0.27, -0.35, -0.49, 0.4, 1.0, 14;
  return offs;
}

CaseResult run_experiment_case(const ExperimentCase& c, const Image& texture,
                               const ExperimentEnv& env,
                               const std::string& out_dir) {
  const fs::path case_dir = fs::path(out_dir) / c.name;
  fs::create_directories(case_dir);

  const Intrinsics K = intrinsics_for(c.geometry);
  const PlanarScene scene = scene_for(texture, c.geometry);
  const CameraPose desired = desired_pose_for(c.geometry);
  const CameraPose initial = desired * offset_pose(c.initial_offset);

  ControllerConfig ctrl = c.ctrl;
  ctrl.dof_mask = c.dof_mask;

  // Time one desired-image transform for the resolution comparison.
  const Image desired_img = render_view(scene, desired, K).image;
  const auto comps = components_from_image(desired_img, K, c.smm);
  const auto t0 = std::chrono::steady_clock::now();
  const SmmImage desired_smm = smm_transform(comps, K, c.smm);
  const auto t1 = std::chrono::steady_clock::now();

  const ServoTrace trace =
      run_servo(scene, initial, desired, K, c.smm, ctrl, c.occlusion,
                make_progress(c.name, env.progress_every));

  CaseResult res;
  res.name = c.name;
  res.final_error = relative_error(desired, trace.final_pose());
  res.iterations = trace.iterations();
  res.status = trace.status;
  res.initial_err_norm = trace.initial_err;
  res.terminal_err_norm = trace.final_err;
  res.smoothness = twist_smoothness(trace);
  res.smm_time_ms =
      std::chrono::duration<double, std::milli>(t1 - t0).count();
  // A featureless scene leaves the error signal empty at any pose.
  res.degenerate = trace.initial_err <=
                   1e-9 * static_cast<double>(desired_smm.values.size());

  res.trace_path = (case_dir / "trace.csv").string();
  write_trace_csv(trace, res.trace_path);
  write_pgm(render_view(scene, initial, K).image,
            (case_dir / "initial.pgm").string());
  const Image final_img = render_view(scene, trace.final_pose(), K).image;
  write_pgm(final_img, (case_dir / "final.pgm").string());
  write_pgm(desired_img, (case_dir / "desired.pgm").string());
  Image diff(K.width, K.height, 0.0);
  for (int i = 0; i < diff.size(); ++i) {
    diff.pixels()[i] =
        std::abs(final_img.pixels()[i] - desired_img.pixels()[i]);
  }
  write_pgm(diff, (case_dir / "diff.pgm").string());
  return res;
}

void write_report_csv(const ExperimentReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_report_csv: cannot write " + path);
  }
  out << "case,status,degenerate,iterations,ex_m,ey_m,ez_m,ealpha_deg,"
         "ebeta_deg,egamma_deg,initial_err,terminal_err,smoothness,smm_ms,"
         "trace\n";
  char buf[512];
  for (const auto& c : report.cases) {
    std::snprintf(buf, sizeof(buf),
                  "%s,%s,%d,%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,"
                  "%.12g,%.12g,%.12g,%s\n",
                  c.name.c_str(), to_string(c.status).c_str(),
                  c.degenerate ? 1 : 0, c.iterations, c.final_error(0),
                  c.final_error(1), c.final_error(2), c.final_error(3),
                  c.final_error(4), c.final_error(5), c.initial_err_norm,
                  c.terminal_err_norm, c.smoothness, c.smm_time_ms,
                  c.trace_path.c_str());
    out << buf;
  }
}

namespace {

ExperimentReport run_study(const std::string& study,
                           const std::vector<ExperimentCase>& cases,
                           const std::vector<Image>& textures,
                           const ExperimentEnv& env) {
  const fs::path study_dir = fs::path(env.out_dir) / study;
  fs::create_directories(study_dir);

  ExperimentReport report;
  for (size_t i = 0; i < cases.size(); ++i) {
    try {
      report.cases.push_back(run_experiment_case(cases[i], textures[i], env,
                                                 study_dir.string()));
    } catch (const std::exception& ex) {
      // A failed case is reported, never dropped; the study continues.
      CaseResult res;
      res.name = cases[i].name;
      res.status = ServoStatus::kDiverged;
      std::fprintf(stderr, "[%s] case %s failed: %s\n", study.c_str(),
                   cases[i].name.c_str(), ex.what());
      report.cases.push_back(res);
    }
  }
  report.report_path = (study_dir / "report.csv").string();
  write_report_csv(report, report.report_path);
  return report;
}

}  // namespace

ExperimentReport run_table1(const ExperimentEnv& env) {
  const Image tex = read_pgm(env.data_dir + "/texture.pgm");
  StudyGeometry geom;
  geom.resolution = 50;
  geom.desired_depth = 1.0;  // fixed planar working depth
  geom.plane_span = 0.8;

  std::vector<ExperimentCase> cases;
  std::vector<Image> textures;
  const auto offs = table1_offsets();
  for (size_t i = 0; i < offs.size(); ++i) {
    ExperimentCase c;
    c.name = "exp" + std::to_string(i + 1);
    c.initial_offset = offs[i];
    c.dof_mask = DofMask::planar();
    c.geometry = geom;
    cases.push_back(c);
    textures.push_back(tex);
  }
  return run_study("table1", cases, textures, env);
}

ExperimentReport run_table2(const ExperimentEnv& env) {
  const Image tex = read_pgm(env.data_dir + "/texture.pgm");
  const StudyGeometry geom;  // 0.5 m working depth

  std::vector<ExperimentCase> cases;
  std::vector<Image> textures;
  const auto offs = table2_offsets();
  for (size_t i = 0; i < offs.size(); ++i) {
    ExperimentCase c;
    c.name = "exp" + std::to_string(i + 1);
    c.initial_offset = offs[i];
    c.geometry = geom;
    cases.push_back(c);
    textures.push_back(tex);
  }
  return run_study("table2", cases, textures, env);
}

ExperimentReport run_resolution_study(const ExperimentEnv& env) {
  const Image tex = read_pgm(env.data_dir + "/texture.pgm");
  const Vector6d offset = table2_offsets()[3];  // the res4 pose pair

  std::vector<ExperimentCase> cases;
  std::vector<Image> textures;
  for (int res : {50, 100}) {
    ExperimentCase c;
    c.name = "res" + std::to_string(res);
    c.initial_offset = offset;
    c.geometry.resolution = res;
    cases.push_back(c);
    textures.push_back(tex);
  }
  return run_study("resolution", cases, textures, env);
}

ExperimentReport run_occlusion_study(const ExperimentEnv& env) {
  const Image tex = read_pgm(env.data_dir + "/texture.pgm");
  const Vector6d offset = table2_offsets()[4];  // exp5 start pose
  const StudyGeometry geom;

  OcclusionPatch patch;  // 0.5 * 0.3 = 15% of the view
  patch.x = static_cast<int>(std::lround(0.25 * geom.resolution));
  patch.y = static_cast<int>(std::lround(0.35 * geom.resolution));
  patch.width = static_cast<int>(std::lround(0.50 * geom.resolution));
  patch.height = static_cast<int>(std::lround(0.30 * geom.resolution));
  patch.fill = 220.0;

  std::vector<ExperimentCase> cases(2);
  cases[0].name = "occluded";
  cases[0].initial_offset = offset;
  cases[0].geometry = geom;
  cases[0].occlusion = patch;
  cases[1].name = "control";
  cases[1].initial_offset = offset;
  cases[1].geometry = geom;

  return run_study("occlusion", cases, {tex, tex}, env);
}

ExperimentReport run_content_study(const ExperimentEnv& env,
                                   const std::vector<std::string>& textures) {
  if (textures.size() < 2) {
    throw std::invalid_argument(
        "run_content_study: needs at least two textures");
  }
  const Vector6d offset = table2_offsets()[3];
  const StudyGeometry geom;

  std::vector<ExperimentCase> cases;
  std::vector<Image> images;
  for (const auto& path : textures) {
    ExperimentCase c;
    c.name = texture_stem(path);
    c.initial_offset = offset;
    c.geometry = geom;
    cases.push_back(c);
    images.push_back(read_pgm(path));
  }
  // Featureless control scene: constant texture over an equal background.
  ExperimentCase c;
  c.name = "constant";
  c.initial_offset = offset;
  c.geometry = geom;
  c.geometry.background = 128.0;
  cases.push_back(c);
  images.push_back(constant_texture(128, 128.0));

  return run_study("content", cases, images, env);
}

Eigen::MatrixXd sample_cost_landscape(const PlanarScene& scene,
                                      const CameraPose& desired,
                                      const Intrinsics& K,
                                      const SmmConfig& smm_cfg, int n,
                                      double extent) {
  if (n < 3 || n % 2 == 0) {
    throw std::invalid_argument(
        "sample_cost_landscape: lattice size must be odd and >= 3");
  }
  const SmmImage S_star = smm_transform(
      components_from_image(render_view(scene, desired, K).image, K, smm_cfg),
      K, smm_cfg);

  const double step = 2.0 * extent / (n - 1);
  const int mid = (n - 1) / 2;
  Eigen::MatrixXd grid(n, n);
  for (int i = 0; i < n; ++i) {
    const double dy = (i - mid) * step;
    for (int j = 0; j < n; ++j) {
      const double dx = (j - mid) * step;
      const CameraPose pose =
          desired * pose_from_euler(dx, dy, 0.0, 0.0, 0.0, 0.0);
      const SmmImage S = smm_transform(
          components_from_image(render_view(scene, pose, K).image, K, smm_cfg),
          K, smm_cfg);
      grid(i, j) = cost_value(smm_error(S, S_star));
    }
  }
  return grid;
}

void write_landscape_csv(const Eigen::MatrixXd& grid, const std::string& path) {
  std::vector<double> values(grid.rows() * grid.cols());
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    for (Eigen::Index j = 0; j < grid.cols(); ++j) {
      values[i * grid.cols() + j] = grid(i, j);
    }
  }
  write_csv_grid(static_cast<int>(grid.cols()), static_cast<int>(grid.rows()),
                 values, path);
}

}  // namespace smmvs
