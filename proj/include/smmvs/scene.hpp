#pragma once

#include <optional>

#include "smmvs/geometry.hpp"
#include "smmvs/image.hpp"

namespace smmvs {

/// Textured plane in the world. The texture lies in the z = 0 plane of
/// plane_pose, centered at its origin, plane_scale meters per texel.
struct PlanarScene {
  Image texture;
  CameraPose plane_pose;
  double plane_scale = 0.0;
  double background = 0.0;

  void validate() const;  // throws std::invalid_argument
};

struct RenderResult {
  Image image;
  double texture_fraction = 0.0;  // pixels that sampled the texture
  bool empty() const { return texture_fraction == 0.0; }
};

/// Renders the scene through a pinhole camera: back-project each pixel,
/// intersect the plane, bilinearly sample the texture. Rays that miss the
/// texture (or the plane) return the background intensity.
RenderResult render_view(const PlanarScene& scene, const CameraPose& camera,
                         const Intrinsics& K);

/// Distance along the camera optical axis to the scene plane.
/// Throws if the axis never meets the plane in front of the camera.
double axial_depth(const PlanarScene& scene, const CameraPose& camera);

/// Synthetic view-space occluder: pixels inside rect are replaced by a
/// constant fill or by a patch image of the same size.
struct OcclusionPatch {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  double fill = 0.0;
  std::optional<Image> patch;
};

/// Replaces pixels inside the patch rect; everything else is bit-identical.
/// Throws if the rect does not intersect the image.
Image apply_occlusion(const Image& img, const OcclusionPatch& patch);

}  // namespace smmvs
