#include "mts/render.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>

#include "mts/errors.hpp"
#include "mts/rng.hpp"

namespace mts {

CameraIntrinsics CameraIntrinsics::square(int resolution, double horizontal_fov_rad) {
  CameraIntrinsics intr;
  intr.width = resolution;
  intr.height = resolution;
  intr.horizontal_fov = horizontal_fov_rad;
  intr.cu = 0.5 * resolution;
  intr.cv = 0.5 * resolution;
  if (resolution < 16) throw ConfigError("image resolution must be >= 16");
  if (!(horizontal_fov_rad > 0.0 && horizontal_fov_rad < kPi))
    throw ConfigError("horizontal FOV must be in (0, pi)");
  return intr;
}

CameraArray::CameraArray(std::vector<Vec3> offsets, CameraIntrinsics intrinsics)
    : offsets_(std::move(offsets)), intrinsics_(intrinsics) {
  if (offsets_.size() < 3)
    throw ConfigError("camera array needs at least 3 offset cameras");
  Eigen::MatrixX3d v(offsets_.size(), 3);
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    if (offsets_[i].norm() <= 0.0)
      throw ConfigError("camera offset must have positive norm");
    v.row(i) = offsets_[i].transpose();
  }
  const Eigen::JacobiSVD<Eigen::MatrixX3d> svd(v);
  if (svd.singularValues()(2) < 1e-12)
    throw ConfigError(
        "camera offsets are rank-deficient (planar layout); the axial gradient "
        "component would be unobservable");
}

CameraArray CameraArray::grid_layout(double dx, double dy, double dz,
                                     CameraIntrinsics intrinsics) {
  if (dx <= 0.0 || dy <= 0.0 || dz <= 0.0)
    throw ConfigError("grid layout offsets must be positive");
  std::vector<Vec3> offsets = {
      {-dx, -dy, dz}, {0.0, -dy, dz}, {dx, -dy, dz},
      {-dx, 0.0, dz},                 {dx, 0.0, dz},
      {-dx, dy, dz},  {0.0, dy, dz},  {dx, dy, dz},
  };
  return CameraArray(std::move(offsets), intrinsics);
}

CameraArray CameraArray::from_radius(double radius, double axial_offset,
                                     CameraIntrinsics intrinsics) {
  if (!(radius > axial_offset))
    throw ConfigError("array radius must exceed the axial offset");
  const double d = std::sqrt(0.5 * (radius * radius - axial_offset * axial_offset));
  return grid_layout(d, d, axial_offset, intrinsics);
}

std::vector<double> CameraArray::baselines() const {
  std::vector<double> h(offsets_.size());
  for (std::size_t i = 0; i < offsets_.size(); ++i) h[i] = offsets_[i].norm();
  return h;
}

double CameraArray::nominal_radius() const {
  double r = 0.0;
  for (const Vec3& v : offsets_) r = std::max(r, v.norm());
  return r;
}

Pose CameraArray::camera_pose(const Pose& ee_pose, int i) const {
  return Pose{ee_pose.transform_point(offsets_[static_cast<std::size_t>(i)]),
              ee_pose.orientation};
}

Vec3 pixel_ray_direction(const CameraIntrinsics& intr, double px, double py) {
  const double f = intr.focal_px();
  return Vec3((px + 0.5 - intr.cu) / f, (py + 0.5 - intr.cv) / f, 1.0).normalized();
}

Image render(const Pose& camera_pose, const CameraIntrinsics& intrinsics,
             const SceneModel& scene) {
  Image img(intrinsics.width, intrinsics.height);
  const Mat3 r = camera_pose.rotation();
  const double f = intrinsics.focal_px();
  for (int y = 0; y < intrinsics.height; ++y) {
    for (int x = 0; x < intrinsics.width; ++x) {
      const Vec3 dir_cam((x + 0.5 - intrinsics.cu) / f, (y + 0.5 - intrinsics.cv) / f,
                         1.0);
      const Vec3 dir = (r * dir_cam).normalized();
      img.set(x, y, ray_hit(camera_pose.position, dir, scene).color);
    }
  }
  return img;
}

Image add_pixel_noise(const Image& image, double sigma, std::uint64_t rng_seed) {
  if (sigma < 0.0) throw ConfigError("pixel noise sigma must be >= 0");
  if (sigma == 0.0) return image;
  Image out = image;
  std::mt19937_64 rng(rng_seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& c : out.pixels) c = std::clamp(c + noise(rng), 0.0, 1.0);
  return out;
}

ArrayViews array_views(const Pose& ee_pose, const CameraArray& array,
                       const SceneModel& scene, double sigma, std::uint64_t rng_seed) {
  ArrayViews views;
  views.reference = add_pixel_noise(render(ee_pose, array.intrinsics(), scene), sigma,
                                    derive_seed(rng_seed, 0));
  views.offsets.reserve(array.count());
  for (int i = 0; i < array.count(); ++i) {
    views.offsets.push_back(
        add_pixel_noise(render(array.camera_pose(ee_pose, i), array.intrinsics(), scene),
                        sigma, derive_seed(rng_seed, static_cast<std::uint64_t>(i) + 1)));
  }
  return views;
}

void write_ppm(const Image& image, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "P6\n" << image.width << " " << image.height << "\n255\n";
  for (double c : image.pixels) {
    const int v = static_cast<int>(std::lround(std::clamp(c, 0.0, 1.0) * 255.0));
    out.put(static_cast<char>(v));
  }
}

}  // namespace mts
