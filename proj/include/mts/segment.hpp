#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "mts/geometry.hpp"
#include "mts/render.hpp"

namespace mts {

/// Diagonal multivariate Gaussian over rotated-HSV features, thresholded at tau.
struct SegmentationModel {
  Vec3 mean{0.25, 0.9, 0.9};
  Vec3 variance{0.004, 0.04, 0.04};  // diagonal of the covariance
  double tau{0.0};

  /// tau chosen so pixels within `radius` Mahalanobis units of the mean pass.
  static SegmentationModel from_mahalanobis_radius(const Vec3& mean,
                                                   const Vec3& variance, double radius);

  double peak_density() const;
  /// Acceptance radius implied by tau; used to check scene colors are separable.
  double mahalanobis_radius() const;
  double mahalanobis_sq(const Vec3& x) const;
};

struct Mask {
  int width{0};
  int height{0};
  std::vector<std::uint8_t> bits;  // row-major, 1 = target

  Mask() = default;
  Mask(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}
  bool at(int x, int y) const {
    return bits[static_cast<std::size_t>(y) * width + x] != 0;
  }
  void set(int x, int y, bool v) {
    bits[static_cast<std::size_t>(y) * width + x] = v ? 1 : 0;
  }
};

/// RGB -> HSV with hue rotated +90 degrees, all channels scaled to [0,1).
/// Undefined hue (s = 0) maps to 0.25, the rotated red center.
Vec3 rgb_to_rotated_hsv(const Vec3& rgb);

/// Exact diagonal-covariance Gaussian density, D = 3.
double gaussian_density(const Vec3& x, const SegmentationModel& model);

/// Pixel is target iff gaussian_density(rotated-HSV pixel) >= tau.
Mask segment(const Image& image, const SegmentationModel& model);

/// Fraction of target pixels, in [0,1].
double target_score(const Mask& mask);

/// Mean (u,v) pixel index of target pixels; empty mask yields nothing.
std::optional<Eigen::Vector2d> centroid(const Mask& mask);

/// True when `color` lies outside the model's acceptance radius, i.e. it will
/// never be classified as target.
bool color_separable(const Vec3& rgb, const SegmentationModel& model);

}  // namespace mts
