#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mts/geometry.hpp"
#include "mts/scene.hpp"

namespace mts {

struct CameraIntrinsics {
  int width{64};
  int height{64};
  double horizontal_fov{deg2rad(60.0)};  // radians
  double cu{32.0};                       // principal point, pixels
  double cv{32.0};

  static CameraIntrinsics square(int resolution, double horizontal_fov_rad);

  double focal_px() const { return 0.5 * width / std::tan(0.5 * horizontal_fov); }
  double vertical_fov() const {
    return 2.0 * std::atan(std::tan(0.5 * horizontal_fov) * height / width);
  }
};

/// Row-major RGB image, channels in [0,1].
struct Image {
  int width{0};
  int height{0};
  std::vector<double> pixels;  // 3 * width * height

  Image() = default;
  Image(int w, int h) : width(w), height(h), pixels(3 * w * h, 0.0) {}

  Vec3 at(int x, int y) const {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    return Vec3(pixels[i], pixels[i + 1], pixels[i + 2]);
  }
  void set(int x, int y, const Vec3& rgb) {
    const std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
    pixels[i] = rgb.x();
    pixels[i + 1] = rgb.y();
    pixels[i + 2] = rgb.z();
  }
};

/// Reference camera plus n rigidly attached offset cameras, offsets in the
/// end-effector frame. Offsets must span 3D (rank 3) or gradient recovery is singular.
class CameraArray {
 public:
  CameraArray(std::vector<Vec3> offsets, CameraIntrinsics intrinsics);

  /// 3x3 grid around the reference: corners (+-dx, +-dy, dz), edge midpoints
  /// (+-dx, 0, dz) and (0, +-dy, dz); optical axes parallel to the reference.
  static CameraArray grid_layout(double dx, double dy, double dz,
                                 CameraIntrinsics intrinsics);

  /// Grid layout with corner cameras at exactly `radius` from the reference,
  /// keeping a fixed axial offset so the layout spans 3D.
  static CameraArray from_radius(double radius, double axial_offset,
                                 CameraIntrinsics intrinsics);

  const std::vector<Vec3>& offsets() const { return offsets_; }
  const CameraIntrinsics& intrinsics() const { return intrinsics_; }
  int count() const { return static_cast<int>(offsets_.size()); }

  /// h_i = ||v^i|| per offset camera.
  std::vector<double> baselines() const;
  double nominal_radius() const;

  /// World pose of offset camera i when the end effector is at `ee_pose`.
  Pose camera_pose(const Pose& ee_pose, int i) const;

 private:
  std::vector<Vec3> offsets_;
  CameraIntrinsics intrinsics_;
};

/// Unit ray direction through the center of pixel (px, py), camera frame
/// (+z optical axis, +x image right, +y image down).
Vec3 pixel_ray_direction(const CameraIntrinsics& intr, double px, double py);

/// Flat-shaded pinhole ray cast, one ray through each pixel center.
Image render(const Pose& camera_pose, const CameraIntrinsics& intrinsics,
             const SceneModel& scene);

/// Adds i.i.d. zero-mean Gaussian noise per channel, clamped to [0,1].
/// sigma = 0 returns the input bit-identically.
Image add_pixel_noise(const Image& image, double sigma, std::uint64_t rng_seed);

struct ArrayViews {
  Image reference;
  std::vector<Image> offsets;
};

/// Renders the reference view at the end-effector pose and the n offset views,
/// noise seeded independently per camera from `rng_seed`.
ArrayViews array_views(const Pose& ee_pose, const CameraArray& array,
                       const SceneModel& scene, double sigma, std::uint64_t rng_seed);

/// Binary PPM (P6) dump, 8-bit per channel.
void write_ppm(const Image& image, const std::string& path);

}  // namespace mts
