#include "smmvs/scene.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "smmvs/parallel.hpp"

namespace smmvs {

namespace {

constexpr double kRayEps = 1e-12;

double bilinear(const Image& tex, double px, double py) {
  const int x0 = static_cast<int>(std::floor(px));
  const int y0 = static_cast<int>(std::floor(py));
  const int x1 = std::min(x0 + 1, tex.width() - 1);
  const int y1 = std::min(y0 + 1, tex.height() - 1);
  const double fx = px - x0;
  const double fy = py - y0;
  const double top = (1.0 - fx) * tex.at(y0, x0) + fx * tex.at(y0, x1);
  const double bot = (1.0 - fx) * tex.at(y1, x0) + fx * tex.at(y1, x1);
  return (1.0 - fy) * top + fy * bot;
}

}  // namespace

void PlanarScene::validate() const {
  if (texture.empty()) {
    throw std::invalid_argument("PlanarScene: empty texture");
  }
  if (!(plane_scale > 0.0)) {
    throw std::invalid_argument("PlanarScene: plane_scale must be positive");
  }
  if (!(background >= 0.0 && background <= 255.0)) {
    throw std::invalid_argument("PlanarScene: background outside [0, 255]");
  }
}

RenderResult render_view(const PlanarScene& scene, const CameraPose& camera,
                         const Intrinsics& K) {
  scene.validate();
  K.validate();

  // Camera ray in plane coordinates: origin o, direction D * (x, y, 1).
  const Eigen::Matrix3d D =
      scene.plane_pose.rotation().transpose() * camera.rotation();
  const Eigen::Vector3d o = scene.plane_pose.rotation().transpose() *
                            (camera.translation() - scene.plane_pose.translation());

  const double half_u = (scene.texture.width() - 1) / 2.0;
  const double half_v = (scene.texture.height() - 1) / 2.0;

  Image out(K.width, K.height, scene.background);
  std::atomic<long> hits{0};

  parallel_for(K.height, [&](int r) {
    long row_hits = 0;
    for (int c = 0; c < K.width; ++c) {
      const Eigen::Vector2d n = pixel_to_normalized(c, r, K);
      const Eigen::Vector3d d = D * Eigen::Vector3d(n.x(), n.y(), 1.0);
      if (std::abs(d.z()) < kRayEps) continue;
      const double t = -o.z() / d.z();
      if (t <= kRayEps) continue;  // plane behind the camera
      const double px = (o.x() + t * d.x()) / scene.plane_scale + half_u;
      const double py = (o.y() + t * d.y()) / scene.plane_scale + half_v;
      if (px < 0.0 || px > scene.texture.width() - 1 || py < 0.0 ||
          py > scene.texture.height() - 1) {
        continue;
      }
      out.at(r, c) = std::clamp(bilinear(scene.texture, px, py), 0.0, 255.0);
      ++row_hits;
    }
    hits += row_hits;
  });

  RenderResult result;
  result.image = std::move(out);
  result.texture_fraction =
      static_cast<double>(hits.load()) / (static_cast<double>(K.width) * K.height);
  return result;
}

double axial_depth(const PlanarScene& scene, const CameraPose& camera) {
  const Eigen::Vector3d d = scene.plane_pose.rotation().transpose() *
                            camera.rotation() * Eigen::Vector3d(0.0, 0.0, 1.0);
  const Eigen::Vector3d o = scene.plane_pose.rotation().transpose() *
                            (camera.translation() - scene.plane_pose.translation());
  if (std::abs(d.z()) < kRayEps) {
    throw std::runtime_error("axial_depth: optical axis parallel to the plane");
  }
  const double t = -o.z() / d.z();
  if (t <= 0.0) {
    throw std::runtime_error("axial_depth: plane behind the camera");
  }
  return t;
}

Image apply_occlusion(const Image& img, const OcclusionPatch& patch) {
  if (patch.width <= 0 || patch.height <= 0) {
    throw std::invalid_argument("apply_occlusion: empty patch rect");
  }
  const int x0 = std::max(0, patch.x);
  const int y0 = std::max(0, patch.y);
  const int x1 = std::min(img.width(), patch.x + patch.width);
  const int y1 = std::min(img.height(), patch.y + patch.height);
  if (x0 >= x1 || y0 >= y1) {
    throw std::invalid_argument(
        "apply_occlusion: patch does not intersect the image");
  }
  if (patch.patch &&
      (patch.patch->width() != patch.width ||
       patch.patch->height() != patch.height)) {
    throw std::invalid_argument(
        "apply_occlusion: patch image size does not match rect");
  }
  if (!patch.patch && !(patch.fill >= 0.0 && patch.fill <= 255.0)) {
    throw std::invalid_argument("apply_occlusion: fill outside [0, 255]");
  }

  Image out = img;
  for (int r = y0; r < y1; ++r) {
    for (int c = x0; c < x1; ++c) {
      out.at(r, c) = patch.patch
                         ? patch.patch->at(r - patch.y, c - patch.x)
                         : patch.fill;
    }
  }
  return out;
}

}  // namespace smmvs
