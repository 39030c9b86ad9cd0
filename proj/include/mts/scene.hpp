#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "mts/geometry.hpp"

namespace mts {

struct TargetObject {
  Vec3 center{Vec3::Zero()};
  double radius{0.06};
  Vec3 color{0.9, 0.09, 0.09};  // RGB in [0,1]
};

enum class OccluderShape { Disk, Square };

struct Occluder {
  Vec3 center{Vec3::Zero()};
  Vec3 normal{Vec3::UnitX()};  // unit
  double half_extent{0.1};
  OccluderShape shape{OccluderShape::Disk};
  Vec3 color{0.05, 0.55, 0.10};
  double occlusion_angle_deg{0.0};
};

struct Aabb {
  Vec3 lo{Vec3::Zero()};
  Vec3 hi{Vec3::Zero()};
  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
};

/// Immutable world description: one target sphere, planar occluders, flat colors.
struct SceneModel {
  TargetObject target;
  std::vector<Occluder> occluders;
  Vec3 background_color{0.25, 0.30, 0.35};
  Aabb workspace;
};

/// Fixed scene parameters the per-trial offsets are applied to.
struct SceneBaseConfig {
  Vec3 target_anchor{0.65, 0.0, 0.35};
  Vec3 start_camera{0.15, 0.0, 0.35};  // nominal reference-camera start position
  double target_radius{0.06};
  Vec3 target_color{0.9, 0.09, 0.09};
  bool include_occluder{true};
  double occluder_standoff{0.15};  // d_occ, in front of the target toward the start camera
  double occluder_half_extent{0.10};
  OccluderShape occluder_shape{OccluderShape::Disk};
  Vec3 occluder_color{0.05, 0.55, 0.10};
  Vec3 background_color{0.25, 0.30, 0.35};
  double workspace_half_extent{0.5};  // cube half-size centered on target_anchor
};

enum class HitKind { Target, Occluder, Background };

struct HitRecord {
  HitKind kind{HitKind::Background};
  double distance{std::numeric_limits<double>::infinity()};
  Vec3 color{Vec3::Zero()};
};

/// Places the target displaced by (y,z) from the anchor and one occluder at the
/// standoff distance in front of it, displaced by its own (y,z) offsets and
/// rotated by `occlusion_angle_deg` about the target-to-start-camera axis.
/// The reference direction for angle 0 is world +y projected off that axis.
SceneModel build_scene(std::pair<double, double> target_offset_yz,
                       std::pair<double, double> occluder_offset_yz,
                       double occlusion_angle_deg,
                       const SceneBaseConfig& base);

/// Nearest analytic intersection along the ray; background (distance = +inf)
/// when nothing is hit. `direction` must be unit-norm.
HitRecord ray_hit(const Vec3& origin, const Vec3& direction, const SceneModel& scene);

}  // namespace mts
