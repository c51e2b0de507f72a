#pragma once

#include <vector>

#include <Eigen/Core>

#include "smmvs/geometry.hpp"
#include "smmvs/image.hpp"

namespace smmvs {

/// Parameters of the Student-mixture image representation.
struct SmmConfig {
  // Intensity-to-variance map: sigma = sigma_min + I/255 * (sigma_max - sigma_min).
  // sigma_min must stay above 1: nu = 2*sigma/(sigma-1) has a pole at sigma = 1.
  double sigma_min = 1.5;
  double sigma_max = 5.0;

  // Pixel-variance per unit sigma; a component with sigma = 1.5 spreads with a
  // 1.5 px standard deviation under the default. The evaluation covariance in
  // normalized coordinates is sigma * unit_scale / (focal_u * focal_v).
  double unit_scale = 1.5;

  // Component contributions with delta/nu > truncation_radius^2 are dropped
  // when truncate is on; the full sum stays available as the reference mode.
  bool truncate = true;
  double truncation_radius = 6.0;
  double truncation_tolerance = 1e-6;

  enum class GradientMode { kAnalytic, kFilter };
  GradientMode gradient_mode = GradientMode::kAnalytic;

  // Divide servo features by the desired-image SMM maximum (affects gain
  // tuning only). Off by default.
  bool normalize = false;

  void validate() const;  // throws std::invalid_argument
};

/// One bivariate t-distribution, anchored at a pixel.
struct StudentComponent {
  Eigen::Vector2d mean;  // normalized image coordinates of the pixel center
  double sigma;          // intensity-derived variance parameter, > 1
  double nu;             // 2*sigma/(sigma - 1)
  double weight;         // mixing proportion
  double variance;       // sigma mapped to squared normalized units
};

/// Per-pixel values of the mixture density.
struct SmmImage {
  int width = 0;
  int height = 0;
  std::vector<double> values;                  // row-major
  std::vector<StudentComponent> components;    // the generating mixture
};

/// Spatial gradient of an SmmImage, per normalized coordinate.
struct SmmGradient {
  int width = 0;
  int height = 0;
  std::vector<double> du;  // dS/dx
  std::vector<double> dv;  // dS/dy
};

/// Bivariate Student t density with covariance sigma * I2 and nu degrees of
/// freedom. For d = 2 the gamma-function ratio collapses to nu/2, giving
///   phi(x) = 1 / (2 pi sigma) * (1 + delta/nu)^-((nu+2)/2),
/// delta = |x - mean|^2 / sigma. Throws on non-positive sigma or nu.
double student_t_pdf(const Eigen::Vector2d& x, const Eigen::Vector2d& mean,
                     double sigma, double nu);

/// Gradient of student_t_pdf in x:
///   grad = -phi(x) * (nu + 2) / (nu + delta) * (x - mean) / sigma.
Eigen::Vector2d student_t_grad(const Eigen::Vector2d& x,
                               const Eigen::Vector2d& mean, double sigma,
                               double nu);

/// Bivariate normal density with covariance sigma * I2 (the nu -> inf limit).
double gaussian_pdf(const Eigen::Vector2d& x, const Eigen::Vector2d& mean,
                    double sigma);

/// Degrees of freedom from the variance parameter: nu = 2*sigma/(sigma - 1).
/// Throws for sigma <= 1 (pole of the relation; degenerate component).
double nu_from_sigma(double sigma);

/// One component per pixel: mean at the pixel center (normalized coordinates),
/// sigma affine in intensity, uniform weights summing to one.
std::vector<StudentComponent> components_from_image(const Image& img,
                                                    const Intrinsics& K,
                                                    const SmmConfig& cfg);

/// Evaluates the mixture on the pixel grid of K. Truncation per cfg.
SmmImage smm_transform(const std::vector<StudentComponent>& components,
                       const Intrinsics& K, const SmmConfig& cfg);

/// Mixture value at an arbitrary normalized point (same truncation rule).
double smm_value_at(const std::vector<StudentComponent>& components,
                    const Eigen::Vector2d& x, const SmmConfig& cfg);

/// Analytic mixture gradient at an arbitrary normalized point.
Eigen::Vector2d smm_gradient_at(const std::vector<StudentComponent>& components,
                                const Eigen::Vector2d& x, const SmmConfig& cfg);

/// Analytic gradient of the mixture on the pixel grid.
SmmGradient smm_gradient_analytic(const std::vector<StudentComponent>& components,
                                  const Intrinsics& K, const SmmConfig& cfg);

/// Central-difference gradient of an SmmImage (one-sided at borders),
/// scaled to per-normalized-coordinate units. Requires at least 3x3.
SmmGradient smm_gradient_filter(const SmmImage& smm, const Intrinsics& K);

}  // namespace smmvs
