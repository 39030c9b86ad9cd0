#include "mts/scene.hpp"

#include <cmath>

#include "mts/errors.hpp"

namespace mts {

namespace {

constexpr double kRayEps = 1e-12;

// Smallest positive root of the sphere intersection, or infinity.
double sphere_distance(const Vec3& origin, const Vec3& dir, const Vec3& center,
                       double radius) {
  const Vec3 oc = origin - center;
  const double b = oc.dot(dir);
  const double c = oc.squaredNorm() - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double s = std::sqrt(disc);
  const double t0 = -b - s;
  if (t0 > kRayEps) return t0;
  const double t1 = -b + s;
  if (t1 > kRayEps) return t1;
  return std::numeric_limits<double>::infinity();
}

double occluder_distance(const Vec3& origin, const Vec3& dir, const Occluder& occ) {
  const double denom = dir.dot(occ.normal);
  if (std::abs(denom) < kRayEps) return std::numeric_limits<double>::infinity();
  const double t = (occ.center - origin).dot(occ.normal) / denom;
  if (t <= kRayEps) return std::numeric_limits<double>::infinity();
  const Vec3 local = origin + t * dir - occ.center;
  if (occ.shape == OccluderShape::Disk) {
    if (local.squaredNorm() > occ.half_extent * occ.half_extent)
      return std::numeric_limits<double>::infinity();
  } else {
    // In-plane axes from the normal, deterministic for any normal.
    Vec3 e1 = occ.normal.cross(Vec3::UnitZ());
    if (e1.norm() < 1e-9) e1 = occ.normal.cross(Vec3::UnitY());
    e1.normalize();
    const Vec3 e2 = occ.normal.cross(e1);
    if (std::abs(local.dot(e1)) > occ.half_extent ||
        std::abs(local.dot(e2)) > occ.half_extent)
      return std::numeric_limits<double>::infinity();
  }
  return t;
}

}  // namespace

SceneModel build_scene(std::pair<double, double> target_offset_yz,
                       std::pair<double, double> occluder_offset_yz,
                       double occlusion_angle_deg,
                       const SceneBaseConfig& base) {
  if (std::abs(occlusion_angle_deg) > 180.0)
    throw ConfigError("occlusion angle outside [-180, 180] degrees");
  if (base.target_radius <= 0.0) throw ConfigError("target radius must be > 0");
  if (base.occluder_half_extent <= 0.0)
    throw ConfigError("occluder half-extent must be > 0");

  SceneModel scene;
  scene.background_color = base.background_color;
  scene.workspace.lo = base.target_anchor.array() - base.workspace_half_extent;
  scene.workspace.hi = base.target_anchor.array() + base.workspace_half_extent;

  scene.target.center = base.target_anchor +
                        Vec3(0.0, target_offset_yz.first, target_offset_yz.second);
  scene.target.radius = base.target_radius;
  scene.target.color = base.target_color;
  if (!scene.workspace.contains(scene.target.center))
    throw ConfigError("target offset places the target outside the workspace");

  if (base.include_occluder) {
    // Axis from the (displaced) target toward the nominal start camera.
    const Vec3 axis = (base.start_camera - scene.target.center).normalized();
    Vec3 ref_y = Vec3::UnitY() - Vec3::UnitY().dot(axis) * axis;
    if (ref_y.norm() < 1e-9) ref_y = Vec3::UnitZ() - Vec3::UnitZ().dot(axis) * axis;
    ref_y.normalize();
    const Vec3 ref_z = ref_y.cross(axis);

    const Vec3 in_plane = occluder_offset_yz.first * ref_y +
                          occluder_offset_yz.second * ref_z;
    const Eigen::AngleAxisd rot(deg2rad(occlusion_angle_deg), axis);

    Occluder occ;
    occ.center = scene.target.center + base.occluder_standoff * axis + rot * in_plane;
    occ.normal = axis;
    occ.half_extent = base.occluder_half_extent;
    occ.shape = base.occluder_shape;
    occ.color = base.occluder_color;
    occ.occlusion_angle_deg = occlusion_angle_deg;
    if (!scene.workspace.contains(occ.center))
      throw ConfigError("occluder offset places the occluder outside the workspace");
    scene.occluders.push_back(occ);
  }
  return scene;
}

HitRecord ray_hit(const Vec3& origin, const Vec3& direction, const SceneModel& scene) {
  HitRecord hit;
  hit.kind = HitKind::Background;
  hit.distance = std::numeric_limits<double>::infinity();
  hit.color = scene.background_color;

  const double t_target =
      sphere_distance(origin, direction, scene.target.center, scene.target.radius);
  if (t_target < hit.distance) {
    hit.kind = HitKind::Target;
    hit.distance = t_target;
    hit.color = scene.target.color;
  }
  for (const Occluder& occ : scene.occluders) {
    const double t = occluder_distance(origin, direction, occ);
    if (t < hit.distance) {
      hit.kind = HitKind::Occluder;
      hit.distance = t;
      hit.color = occ.color;
    }
  }
  return hit;
}

}  // namespace mts
