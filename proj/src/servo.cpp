#include "smmvs/servo.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "smmvs/parallel.hpp"

namespace smmvs {

namespace {

const char* kDofNames[6] = {"vx", "vy", "vz", "wx", "wy", "wz"};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

DofMask DofMask::all() { return DofMask{}; }

DofMask DofMask::planar() {
  DofMask m;
  m.active = {true, true, false, false, false, true};
  return m;
}

DofMask DofMask::from_string(const std::string& spec) {
  const std::string s = trim(spec);
  if (s == "all") return all();
  DofMask m;
  m.active.fill(false);
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    bool found = false;
    for (int i = 0; i < 6; ++i) {
      if (tok == kDofNames[i]) {
        m.active[i] = true;
        found = true;
        break;
      }
    }
    if (!found) {
      throw std::invalid_argument("DofMask: unknown component '" + tok + "'");
    }
  }
  if (m.count() == 0) {
    throw std::invalid_argument("DofMask: no active components");
  }
  return m;
}

std::string DofMask::to_string() const {
  if (count() == 6) return "all";
  std::string s;
  for (int i = 0; i < 6; ++i) {
    if (active[i]) {
      if (!s.empty()) s += ",";
      s += kDofNames[i];
    }
  }
  return s;
}

int DofMask::count() const {
  int n = 0;
  for (bool b : active) n += b ? 1 : 0;
  return n;
}

void ControllerConfig::validate() const {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("ControllerConfig: lambda must be positive");
  }
  if (!(dt > 0.0)) {
    throw std::invalid_argument("ControllerConfig: dt must be positive");
  }
  if (max_iters < 1) {
    throw std::invalid_argument("ControllerConfig: max_iters must be >= 1");
  }
  if (!(convergence_ratio > 0.0 && convergence_ratio < 1.0)) {
    throw std::invalid_argument(
        "ControllerConfig: convergence_ratio must be in (0, 1)");
  }
  if (dof_mask.count() == 0) {
    throw std::invalid_argument("ControllerConfig: empty dof_mask");
  }
}

std::string to_string(ServoStatus status) {
  switch (status) {
    case ServoStatus::kConverged: return "converged";
    case ServoStatus::kMaxIters: return "max_iters";
    case ServoStatus::kDiverged: return "diverged";
  }
  return "unknown";
}

Eigen::Matrix<double, 2, 6> point_interaction_matrix(double x, double y,
                                                     double Z) {
  if (Z == 0.0) {
    throw std::invalid_argument("point_interaction_matrix: Z must be nonzero");
  }
  Eigen::Matrix<double, 2, 6> L;
  L << -1.0 / Z, 0.0, x / Z, x * y, -(1.0 + x * x), y,
       0.0, -1.0 / Z, y / Z, 1.0 + y * y, -x * y, -x;
  return L;
}

Eigen::Matrix<double, 1, 6> smm_interaction_row(double grad_x, double grad_y,
                                                double x, double y, double Z) {
  if (!std::isfinite(grad_x) || !std::isfinite(grad_y)) {
    throw std::invalid_argument("smm_interaction_row: non-finite gradient");
  }
  const Eigen::Matrix<double, 1, 2> g(grad_x, grad_y);
  return -g * point_interaction_matrix(x, y, Z);
}

InteractionMatrix build_interaction_matrix(const SmmGradient& grad,
                                           const Intrinsics& K, double Z,
                                           const DofMask& mask) {
  K.validate();
  if (grad.width != K.width || grad.height != K.height) {
    throw std::invalid_argument(
        "build_interaction_matrix: gradient grid does not match intrinsics");
  }
  if (grad.width <= 0 || grad.height <= 0) {
    throw std::invalid_argument("build_interaction_matrix: empty gradient");
  }

  InteractionMatrix L(static_cast<Eigen::Index>(grad.width) * grad.height, 6);
  parallel_for(grad.height, [&](int r) {
    for (int c = 0; c < grad.width; ++c) {
      const int i = r * grad.width + c;
      const Eigen::Vector2d n = pixel_to_normalized(c, r, K);
      L.row(i) =
          smm_interaction_row(grad.du[i], grad.dv[i], n.x(), n.y(), Z);
    }
  });
  for (int j = 0; j < 6; ++j) {
    if (!mask.active[j]) L.col(j).setZero();
  }
  return L;
}

Eigen::MatrixXd pseudo_inverse(const InteractionMatrix& L) {
  if (!L.allFinite()) {
    throw std::invalid_argument("pseudo_inverse: non-finite entries");
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(
      L, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double cutoff = sv.size() > 0 ? 1e-6 * sv(0) : 0.0;
  Eigen::VectorXd inv_sv = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff && sv(i) > 0.0) inv_sv(i) = 1.0 / sv(i);
  }
  return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Twist control_step(const Eigen::MatrixXd& L_pinv, const ErrorVector& e,
                   double lambda, const DofMask& mask) {
  if (L_pinv.rows() != 6 || L_pinv.cols() != e.size()) {
    throw std::invalid_argument("control_step: dimension mismatch");
  }
  Vector6d t = -lambda * (L_pinv * e);
  for (int j = 0; j < 6; ++j) {
    if (!mask.active[j]) t(j) = 0.0;
  }
  return Twist::from_vector(t);
}

double cost_value(const ErrorVector& e) { return 0.5 * e.squaredNorm(); }

ErrorVector smm_error(const SmmImage& current, const SmmImage& desired) {
  if (current.width != desired.width || current.height != desired.height) {
    throw std::invalid_argument("smm_error: dimension mismatch");
  }
  const Eigen::Index k = static_cast<Eigen::Index>(current.values.size());
  ErrorVector e(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    e(i) = current.values[i] - desired.values[i];
  }
  return e;
}

ServoTrace run_servo(const PlanarScene& scene, const CameraPose& initial,
                     const CameraPose& desired, const Intrinsics& K,
                     const SmmConfig& smm_cfg, const ControllerConfig& ctrl_cfg,
                     const std::optional<OcclusionPatch>& occlusion,
                     const ProgressFn& progress) {
  smm_cfg.validate();
  ctrl_cfg.validate();

  const RenderResult desired_render = render_view(scene, desired, K);
  if (desired_render.empty()) {
    throw std::runtime_error("run_servo: scene renders empty at the desired pose");
  }
  const SmmImage S_star = smm_transform(
      components_from_image(desired_render.image, K, smm_cfg), K, smm_cfg);

  const double Z = axial_depth(scene, desired);
  const SmmGradient grad_star =
      smm_cfg.gradient_mode == SmmConfig::GradientMode::kAnalytic
          ? smm_gradient_analytic(S_star.components, K, smm_cfg)
          : smm_gradient_filter(S_star, K);
  const InteractionMatrix L =
      build_interaction_matrix(grad_star, K, Z, ctrl_cfg.dof_mask);
  Eigen::MatrixXd L_pinv = pseudo_inverse(L);

  double feature_scale = 1.0;
  if (smm_cfg.normalize) {
    double peak = 0.0;
    for (double v : S_star.values) peak = std::max(peak, v);
    if (peak > 0.0) feature_scale = 1.0 / peak;
  }

  ServoTrace trace;
  CameraPose pose = initial;
  double e0 = 0.0;

  auto record = [&](int iter, const Twist& twist, double err) {
    trace.records.push_back({iter, pose, twist, err});
    if (progress) progress(trace.records.back());
  };

  for (int iter = 0; iter <= ctrl_cfg.max_iters; ++iter) {
    const RenderResult rr = render_view(scene, pose, K);
    if (iter == 0 && rr.empty()) {
      throw std::runtime_error(
          "run_servo: scene renders empty at the initial pose");
    }
    const Image& img =
        occlusion ? apply_occlusion(rr.image, *occlusion) : rr.image;
    const SmmImage S =
        smm_transform(components_from_image(img, K, smm_cfg), K, smm_cfg);
    ErrorVector e = smm_error(S, S_star) * feature_scale;
    const double err = e.norm();
    if (iter == 0) e0 = err;

    if (err <= ctrl_cfg.convergence_ratio * e0) {
      trace.status = ServoStatus::kConverged;
      record(iter, Twist{}, err);
      break;
    }
    if (err > 10.0 * e0) {
      trace.status = ServoStatus::kDiverged;
      record(iter, Twist{}, err);
      break;
    }
    if (iter == ctrl_cfg.max_iters) {
      trace.status = ServoStatus::kMaxIters;
      record(iter, Twist{}, err);
      break;
    }

    if (ctrl_cfg.interaction_source ==
        ControllerConfig::InteractionSource::kCurrent) {
      const SmmGradient g =
          smm_cfg.gradient_mode == SmmConfig::GradientMode::kAnalytic
              ? smm_gradient_analytic(S.components, K, smm_cfg)
              : smm_gradient_filter(S, K);
      L_pinv = pseudo_inverse(
          build_interaction_matrix(g, K, Z, ctrl_cfg.dof_mask));
    }

    const Twist twist = control_step(L_pinv, e, ctrl_cfg.lambda,
                                     ctrl_cfg.dof_mask);
    record(iter, twist, err);
    pose = integrate_twist(pose, twist, ctrl_cfg.dt);
  }

  trace.initial_err = e0;
  trace.final_err = trace.records.back().err_norm;
  return trace;
}

namespace {

void write_record(std::ofstream& out, const ServoRecord& rec) {
  const Eigen::Vector3d t = rec.pose.translation();
  const Eigen::Vector3d ypr = euler_from_rotation(rec.pose.rotation());
  const Vector6d tw = rec.twist.vector();
  char buf[512];
  std::snprintf(buf, sizeof(buf),
                "%d,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,%.12g,"
                "%.12g,%.12g,%.12g,%.12g\n",
                rec.iter, t.x(), t.y(), t.z(), rad2deg(ypr.x()),
                rad2deg(ypr.y()), rad2deg(ypr.z()), tw(0), tw(1), tw(2), tw(3),
                tw(4), tw(5), rec.err_norm);
  out << buf;
}

}  // namespace

void write_trace_csv(const ServoTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("write_trace_csv: cannot write " + path);
  }
  out << "iter,tx,ty,tz,alpha_deg,beta_deg,gamma_deg,vx,vy,vz,wx,wy,wz,"
         "err_norm\n";
  for (const auto& rec : trace.records) {
    write_record(out, rec);
  }
  write_record(out, trace.records.back());
  out << "# status: " << to_string(trace.status) << "\n";
}

std::vector<double> read_trace_err_norms(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("read_trace_err_norms: cannot open " + path);
  }
  std::vector<double> errs;
  std::vector<int> iters;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto last_comma = line.find_last_of(',');
    const auto first_comma = line.find(',');
    const int iter = std::stoi(line.substr(0, first_comma));
    if (!iters.empty() && iter == iters.back()) continue;  // terminal repeat
    iters.push_back(iter);
    errs.push_back(std::stod(line.substr(last_comma + 1)));
  }
  return errs;
}

}  // namespace smmvs
