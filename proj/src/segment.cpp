#include "mts/segment.hpp"

#include <cmath>

#include "mts/errors.hpp"

namespace mts {

SegmentationModel SegmentationModel::from_mahalanobis_radius(const Vec3& mean,
                                                             const Vec3& variance,
                                                             double radius) {
  SegmentationModel model;
  model.mean = mean;
  model.variance = variance;
  if ((variance.array() <= 0.0).any())
    throw ConfigError("segmentation variances must be positive");
  if (radius <= 0.0) throw ConfigError("Mahalanobis radius must be positive");
  model.tau = model.peak_density() * std::exp(-0.5 * radius * radius);
  return model;
}

double SegmentationModel::peak_density() const {
  const double det = variance.x() * variance.y() * variance.z();
  return std::pow(2.0 * kPi, -1.5) / std::sqrt(det);
}

double SegmentationModel::mahalanobis_radius() const {
  const double ratio = tau / peak_density();
  if (ratio >= 1.0) return 0.0;
  return std::sqrt(-2.0 * std::log(ratio));
}

double SegmentationModel::mahalanobis_sq(const Vec3& x) const {
  const Vec3 d = x - mean;
  return d.x() * d.x() / variance.x() + d.y() * d.y() / variance.y() +
         d.z() * d.z() / variance.z();
}

Vec3 rgb_to_rotated_hsv(const Vec3& rgb) {
  const double r = rgb.x(), g = rgb.y(), b = rgb.z();
  const double maxc = std::max({r, g, b});
  const double minc = std::min({r, g, b});
  const double chroma = maxc - minc;

  const double v = maxc;
  const double s = maxc > 0.0 ? chroma / maxc : 0.0;

  double h_rot;
  if (chroma <= 0.0 || s == 0.0) {
    h_rot = 0.25;  // undefined hue: rotated red center
  } else {
    double h;  // degrees in [0, 360)
    if (maxc == r) {
      h = 60.0 * std::fmod((g - b) / chroma, 6.0);
      if (h < 0.0) h += 360.0;
    } else if (maxc == g) {
      h = 60.0 * ((b - r) / chroma + 2.0);
    } else {
      h = 60.0 * ((r - g) / chroma + 4.0);
    }
    h_rot = std::fmod(h + 90.0, 360.0) / 360.0;
  }
  return Vec3(h_rot, s, v);
}

double gaussian_density(const Vec3& x, const SegmentationModel& model) {
  return model.peak_density() * std::exp(-0.5 * model.mahalanobis_sq(x));
}

Mask segment(const Image& image, const SegmentationModel& model) {
  Mask mask(image.width, image.height);
  for (int y = 0; y < image.height; ++y)
    for (int x = 0; x < image.width; ++x)
      mask.set(x, y, gaussian_density(rgb_to_rotated_hsv(image.at(x, y)), model) >=
                         model.tau);
  return mask;
}

double target_score(const Mask& mask) {
  if (mask.bits.empty()) return 0.0;
  std::size_t count = 0;
  for (std::uint8_t b : mask.bits) count += b;
  return static_cast<double>(count) / static_cast<double>(mask.bits.size());
}

std::optional<Eigen::Vector2d> centroid(const Mask& mask) {
  double su = 0.0, sv = 0.0;
  std::size_t count = 0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        su += x;
        sv += y;
        ++count;
      }
    }
  }
  if (count == 0) return std::nullopt;
  return Eigen::Vector2d(su / count, sv / count);
}

bool color_separable(const Vec3& rgb, const SegmentationModel& model) {
  const double radius = model.mahalanobis_radius();
  return model.mahalanobis_sq(rgb_to_rotated_hsv(rgb)) > radius * radius;
}

}  // namespace mts
