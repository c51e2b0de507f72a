#include "smmvs/smm.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "smmvs/parallel.hpp"

namespace smmvs {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

// Flattened per-component constants for the evaluation loops.
struct EvalTerm {
  double mx, my;
  double inv_var;
  double coef;     // weight / (2 pi variance)
  double nu;
  double inv_nu;
  double expo;     // -(nu + 2) / 2
  double nup2;     // nu + 2
  double reach2;   // squared support radius in normalized units
};

std::vector<EvalTerm> make_terms(const std::vector<StudentComponent>& comps,
                                 const SmmConfig& cfg) {
  std::vector<EvalTerm> terms;
  terms.reserve(comps.size());
  const double r2 = cfg.truncation_radius * cfg.truncation_radius;
  for (const auto& c : comps) {
    EvalTerm t;
    t.mx = c.mean.x();
    t.my = c.mean.y();
    t.inv_var = 1.0 / c.variance;
    t.coef = c.weight / (kTwoPi * c.variance);
    t.nu = c.nu;
    t.inv_nu = 1.0 / c.nu;
    t.expo = -0.5 * (c.nu + 2.0);
    t.nup2 = c.nu + 2.0;
    // delta/nu <= r^2  <=>  squared distance <= r^2 * nu * variance.
    t.reach2 = cfg.truncate ? r2 * c.nu * c.variance
                            : std::numeric_limits<double>::infinity();
    terms.push_back(t);
  }
  return terms;
}

double eval_value(const std::vector<EvalTerm>& terms, double x, double y) {
  double sum = 0.0;
  for (const auto& t : terms) {
    const double dx = x - t.mx;
    const double dy = y - t.my;
    const double d2 = dx * dx + dy * dy;
    if (d2 > t.reach2) continue;
    const double delta = d2 * t.inv_var;
    sum += t.coef * std::exp(t.expo * std::log1p(delta * t.inv_nu));
  }
  return sum;
}

void eval_gradient(const std::vector<EvalTerm>& terms, double x, double y,
                   double& gx, double& gy) {
  gx = 0.0;
  gy = 0.0;
  for (const auto& t : terms) {
    const double dx = x - t.mx;
    const double dy = y - t.my;
    const double d2 = dx * dx + dy * dy;
    if (d2 > t.reach2) continue;
    const double delta = d2 * t.inv_var;
    const double val = t.coef * std::exp(t.expo * std::log1p(delta * t.inv_nu));
    const double s = val * t.nup2 / (t.nu + delta) * t.inv_var;
    gx -= s * dx;
    gy -= s * dy;
  }
}

}  // namespace

void SmmConfig::validate() const {
  if (!(sigma_min > 1.0)) {
    throw std::invalid_argument(
        "SmmConfig: sigma_min must exceed 1; nu = 2*sigma/(sigma-1) has a "
        "pole at sigma = 1");
  }
  if (!(sigma_max >= sigma_min)) {
    throw std::invalid_argument("SmmConfig: sigma_max must be >= sigma_min");
  }
  if (!(unit_scale > 0.0)) {
    throw std::invalid_argument("SmmConfig: unit_scale must be positive");
  }
  if (!(truncation_radius > 0.0)) {
    throw std::invalid_argument("SmmConfig: truncation_radius must be positive");
  }
  if (!(truncation_tolerance > 0.0)) {
    throw std::invalid_argument(
        "SmmConfig: truncation_tolerance must be positive");
  }
}

double student_t_pdf(const Eigen::Vector2d& x, const Eigen::Vector2d& mean,
                     double sigma, double nu) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("student_t_pdf: sigma must be positive");
  }
  if (!(nu > 0.0)) {
    throw std::invalid_argument("student_t_pdf: nu must be positive");
  }
  const double delta = (x - mean).squaredNorm() / sigma;
  return std::exp(-0.5 * (nu + 2.0) * std::log1p(delta / nu)) /
         (kTwoPi * sigma);
}

Eigen::Vector2d student_t_grad(const Eigen::Vector2d& x,
                               const Eigen::Vector2d& mean, double sigma,
                               double nu) {
  const double delta = (x - mean).squaredNorm() / sigma;
  const double phi = student_t_pdf(x, mean, sigma, nu);
  return -phi * (nu + 2.0) / (nu + delta) / sigma * (x - mean);
}

double gaussian_pdf(const Eigen::Vector2d& x, const Eigen::Vector2d& mean,
                    double sigma) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("gaussian_pdf: sigma must be positive");
  }
  const double delta = (x - mean).squaredNorm() / sigma;
  return std::exp(-0.5 * delta) / (kTwoPi * sigma);
}

double nu_from_sigma(double sigma) {
  if (!(sigma > 1.0)) {
    throw std::invalid_argument(
        "nu_from_sigma: sigma must exceed 1 (pole of nu = 2*sigma/(sigma-1))");
  }
  return 2.0 * sigma / (sigma - 1.0);
}

std::vector<StudentComponent> components_from_image(const Image& img,
                                                    const Intrinsics& K,
                                                    const SmmConfig& cfg) {
  cfg.validate();
  K.validate();
  if (img.empty()) {
    throw std::invalid_argument("components_from_image: empty image");
  }
  if (img.width() != K.width || img.height() != K.height) {
    throw std::invalid_argument(
        "components_from_image: image dimensions do not match intrinsics");
  }
  const int n = img.size();
  const double weight = 1.0 / n;
  const double var_scale = cfg.unit_scale / (K.focal_u * K.focal_v);

  std::vector<StudentComponent> comps;
  comps.reserve(n);
  for (int r = 0; r < img.height(); ++r) {
    for (int c = 0; c < img.width(); ++c) {
      StudentComponent sc;
      sc.mean = pixel_to_normalized(c, r, K);
      sc.sigma = cfg.sigma_min +
                 img.at(r, c) / 255.0 * (cfg.sigma_max - cfg.sigma_min);
      sc.nu = nu_from_sigma(sc.sigma);
      sc.weight = weight;
      sc.variance = sc.sigma * var_scale;
      comps.push_back(sc);
    }
  }
  return comps;
}

SmmImage smm_transform(const std::vector<StudentComponent>& components,
                       const Intrinsics& K, const SmmConfig& cfg) {
  cfg.validate();
  K.validate();
  if (components.empty()) {
    throw std::invalid_argument("smm_transform: empty component list");
  }
  const auto terms = make_terms(components, cfg);

  SmmImage out;
  out.width = K.width;
  out.height = K.height;
  out.values.assign(static_cast<size_t>(K.width) * K.height, 0.0);
  out.components = components;

  parallel_for(K.height, [&](int r) {
    for (int c = 0; c < K.width; ++c) {
      const Eigen::Vector2d x = pixel_to_normalized(c, r, K);
      out.values[r * K.width + c] = eval_value(terms, x.x(), x.y());
    }
  });
  return out;
}

double smm_value_at(const std::vector<StudentComponent>& components,
                    const Eigen::Vector2d& x, const SmmConfig& cfg) {
  const auto terms = make_terms(components, cfg);
  return eval_value(terms, x.x(), x.y());
}

Eigen::Vector2d smm_gradient_at(const std::vector<StudentComponent>& components,
                                const Eigen::Vector2d& x,
                                const SmmConfig& cfg) {
  const auto terms = make_terms(components, cfg);
  double gx, gy;
  eval_gradient(terms, x.x(), x.y(), gx, gy);
  return {gx, gy};
}

SmmGradient smm_gradient_analytic(
    const std::vector<StudentComponent>& components, const Intrinsics& K,
    const SmmConfig& cfg) {
  cfg.validate();
  K.validate();
  if (components.empty()) {
    throw std::invalid_argument("smm_gradient_analytic: empty component list");
  }
  const auto terms = make_terms(components, cfg);

  SmmGradient out;
  out.width = K.width;
  out.height = K.height;
  out.du.assign(static_cast<size_t>(K.width) * K.height, 0.0);
  out.dv.assign(static_cast<size_t>(K.width) * K.height, 0.0);

  parallel_for(K.height, [&](int r) {
    for (int c = 0; c < K.width; ++c) {
      const Eigen::Vector2d x = pixel_to_normalized(c, r, K);
      eval_gradient(terms, x.x(), x.y(), out.du[r * K.width + c],
                    out.dv[r * K.width + c]);
    }
  });
  return out;
}

SmmGradient smm_gradient_filter(const SmmImage& smm, const Intrinsics& K) {
  if (smm.width < 3 || smm.height < 3) {
    throw std::invalid_argument("smm_gradient_filter: image smaller than 3x3");
  }
  const int w = smm.width;
  const int h = smm.height;
  const auto& s = smm.values;

  SmmGradient out;
  out.width = w;
  out.height = h;
  out.du.assign(s.size(), 0.0);
  out.dv.assign(s.size(), 0.0);

  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int i = r * w + c;
      if (c == 0) {
        out.du[i] = (s[i + 1] - s[i]) * K.focal_u;
      } else if (c == w - 1) {
        out.du[i] = (s[i] - s[i - 1]) * K.focal_u;
      } else {
        out.du[i] = (s[i + 1] - s[i - 1]) * K.focal_u / 2.0;
      }
      if (r == 0) {
        out.dv[i] = (s[i + w] - s[i]) * K.focal_v;
      } else if (r == h - 1) {
        out.dv[i] = (s[i] - s[i - w]) * K.focal_v;
      } else {
        out.dv[i] = (s[i + w] - s[i - w]) * K.focal_v / 2.0;
      }
    }
  }
  return out;
}

}  // namespace smmvs
