#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "smmvs/experiments.hpp"
#include "smmvs/scene.hpp"
#include "smmvs/servo.hpp"
#include "smmvs/smm.hpp"

namespace smmvs {

/// Raised for malformed or invalid configuration files; the message names
/// the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A single servo run, fully specified. Parsed from a flat key = value file
/// (see docs/config.md); every field has a default except the texture path.
struct RunConfig {
  std::string texture;           // resolved relative to the config file
  double plane_scale = 0.003125; // m per texel
  double background = 0.0;

  Intrinsics intrinsics;         // defaults: 50x50, focal 0.7*width

  Vector6d desired_pose;         // (tx,ty,tz) m, (alpha,beta,gamma) deg
  Vector6d initial_pose;         // defaults to desired_pose

  SmmConfig smm;
  ControllerConfig ctrl;
  std::optional<OcclusionPatch> occlusion;

  std::string output_dir = "out";

  void validate() const;  // throws ConfigError
};

/// Parses and validates a config file. Unknown keys are rejected.
RunConfig parse_config(const std::string& path);

PlanarScene scene_from_config(const RunConfig& cfg);
CameraPose pose_from_vector(const Vector6d& v);  // m / deg

}  // namespace smmvs
