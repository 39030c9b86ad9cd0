#include <doctest.h>

#include <random>

#include "mts/errors.hpp"
#include "mts/scene.hpp"

using namespace mts;

namespace {

SceneBaseConfig test_base() {
  SceneBaseConfig base;
  base.target_anchor = Vec3(0.65, 0.0, 0.35);
  base.start_camera = Vec3(0.15, 0.0, 0.35);
  return base;
}

// Brute-force nearest-hit distance: march along the ray and look for sphere
// membership or an occluder plane crossing inside the panel extent.
double brute_force_distance(const Vec3& origin, const Vec3& dir,
                            const SceneModel& scene, double t_max, double dt) {
  auto plane_side = [](const Vec3& p, const Occluder& occ) {
    return (p - occ.center).dot(occ.normal);
  };
  Vec3 prev = origin;
  for (double t = dt; t <= t_max; t += dt) {
    const Vec3 p = origin + t * dir;
    if ((p - scene.target.center).norm() <= scene.target.radius) return t;
    for (const Occluder& occ : scene.occluders) {
      const double s0 = plane_side(prev, occ);
      const double s1 = plane_side(p, occ);
      if (s0 * s1 <= 0.0 && (p - occ.center).norm() <= occ.half_extent + dt) return t;
    }
    prev = p;
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

TEST_CASE("ray_hit axis-aligned sphere") {
  SceneModel scene;
  scene.target = {Vec3(0, 0, 1), 0.1, Vec3(1, 0, 0)};
  scene.workspace = {Vec3(-1, -1, -1), Vec3(1, 1, 2)};
  const HitRecord hit = ray_hit(Vec3(0, 0, 0), Vec3(0, 0, 1), scene);
  CHECK(hit.kind == HitKind::Target);
  CHECK(hit.distance == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("ray_hit nearer occluder wins") {
  SceneModel scene;
  scene.target = {Vec3(0, 0, 1), 0.1, Vec3(1, 0, 0)};
  scene.occluders.push_back(
      {Vec3(0, 0, 0.5), Vec3(0, 0, -1), 0.2, OccluderShape::Disk, Vec3(0, 1, 0), 0.0});
  const HitRecord hit = ray_hit(Vec3(0, 0, 0), Vec3(0, 0, 1), scene);
  CHECK(hit.kind == HitKind::Occluder);
  CHECK(hit.distance == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("ray_hit miss is background with infinite distance") {
  SceneModel scene;
  scene.target = {Vec3(0, 0, 1), 0.1, Vec3(1, 0, 0)};
  const HitRecord hit = ray_hit(Vec3(0, 0, 0), Vec3(0, -1, 0), scene);
  CHECK(hit.kind == HitKind::Background);
  CHECK(std::isinf(hit.distance));
  CHECK(hit.color == scene.background_color);
}

TEST_CASE("ray_hit matches a brute-force marcher on random rays") {
  const SceneModel scene = build_scene({0.02, -0.03}, {0.05, 0.04}, 30.0, test_base());
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int hits = 0;
  for (int i = 0; i < 100; ++i) {
    const Vec3 origin(0.15 + 0.1 * u(rng), 0.2 * u(rng), 0.35 + 0.2 * u(rng));
    Vec3 dir = (scene.target.center - origin + 0.08 * Vec3(u(rng), u(rng), u(rng)));
    dir.normalize();
    const HitRecord hit = ray_hit(origin, dir, scene);
    const double brute = brute_force_distance(origin, dir, scene, 2.0, 1e-4);
    if (std::isinf(brute)) {
      // The marcher can only establish a miss up to its resolution.
      CHECK(hit.distance > 2.0 - 1e-3);
    } else {
      CHECK(std::abs(hit.distance - brute) < 2e-4);
      ++hits;
    }
  }
  CHECK(hits > 50);  // the sampling above mostly aims near the target
}

TEST_CASE("build_scene zero offsets center the occluder on the viewing axis") {
  const SceneModel scene = build_scene({0, 0}, {0, 0}, 0.0, test_base());
  CHECK(scene.target.center == Vec3(0.65, 0.0, 0.35));
  // Standoff toward the start camera, which lies along -x from the target.
  CHECK(scene.occluders.size() == 1);
  CHECK(scene.occluders[0].center.x() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(scene.occluders[0].center.y() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(scene.occluders[0].center.z() == doctest::Approx(0.35).epsilon(1e-12));
}

TEST_CASE("build_scene half-turn reflects the occluder through the axis") {
  const auto off = std::pair{0.06, 0.03};
  const SceneModel s0 = build_scene({0, 0}, off, 0.0, test_base());
  const SceneModel s180 = build_scene({0, 0}, off, 180.0, test_base());
  const Vec3 axis_point = s0.target.center + Vec3(-0.15, 0, 0);
  const Vec3 d0 = s0.occluders[0].center - axis_point;
  const Vec3 d180 = s180.occluders[0].center - axis_point;
  CHECK((d0 + d180).norm() < 1e-12);
}

TEST_CASE("build_scene mirrors the occluder for negated angles") {
  // Offset along the rotation reference direction, so the mirror plane
  // (viewing axis + reference direction, here the x-y plane) applies.
  const auto off = std::pair{0.07, 0.0};
  for (double theta : {30.0, 45.0, 120.0}) {
    const SceneModel sp = build_scene({0, 0}, off, theta, test_base());
    const SceneModel sn = build_scene({0, 0}, off, -theta, test_base());
    const Vec3 cp = sp.occluders[0].center;
    const Vec3 cn = sn.occluders[0].center;
    // The viewing axis is -x and the reference direction +y: mirroring the
    // angle flips the z component of the in-plane offset only.
    CHECK(cp.x() == doctest::Approx(cn.x()).epsilon(1e-12));
    CHECK(cp.y() == doctest::Approx(cn.y()).epsilon(1e-12));
    CHECK((cp.z() - 0.35) == doctest::Approx(-(cn.z() - 0.35)).epsilon(1e-9));
  }
}

TEST_CASE("build_scene is deterministic bit for bit") {
  const SceneModel a = build_scene({0.1, -0.1}, {0.05, 0.02}, 45.0, test_base());
  const SceneModel b = build_scene({0.1, -0.1}, {0.05, 0.02}, 45.0, test_base());
  CHECK(a.target.center == b.target.center);
  CHECK(a.occluders[0].center == b.occluders[0].center);
  CHECK(a.occluders[0].normal == b.occluders[0].normal);
}

TEST_CASE("build_scene keeps the occluder on the displaced camera-target line") {
  // Target shifted (+0.1, -0.1); the centered occluder must still block the
  // line of sight from the start camera.
  const SceneBaseConfig base = test_base();
  const SceneModel scene = build_scene({0.1, -0.1}, {0, 0}, 45.0, base);
  CHECK(scene.target.center.isApprox(Vec3(0.65, 0.1, 0.25), 1e-12));
  const Vec3 dir = (scene.target.center - base.start_camera).normalized();
  const HitRecord hit = ray_hit(base.start_camera, dir, scene);
  CHECK(hit.kind == HitKind::Occluder);
}

TEST_CASE("build_scene rejects offsets outside the workspace") {
  CHECK_THROWS_AS(build_scene({0.6, 0.0}, {0, 0}, 0.0, test_base()), ConfigError);
  CHECK_THROWS_AS(build_scene({0, 0}, {0.7, 0.0}, 0.0, test_base()), ConfigError);
  CHECK_THROWS_AS(build_scene({0, 0}, {0, 0}, 181.0, test_base()), ConfigError);
}

TEST_CASE("square occluders intersect within the half extent box") {
  SceneModel scene;
  scene.target = {Vec3(0, 0, 10), 0.1, Vec3(1, 0, 0)};
  scene.occluders.push_back({Vec3(0, 0, 1), Vec3(0, 0, -1), 0.2, OccluderShape::Square,
                             Vec3(0, 1, 0), 0.0});
  CHECK(ray_hit(Vec3(0.19, 0.19, 0), Vec3(0, 0, 1), scene).kind == HitKind::Occluder);
  CHECK(ray_hit(Vec3(0.21, 0.19, 0), Vec3(0, 0, 1), scene).kind == HitKind::Background);
  // A disk of the same half extent misses the corner point.
  scene.occluders[0].shape = OccluderShape::Disk;
  CHECK(ray_hit(Vec3(0.19, 0.19, 0), Vec3(0, 0, 1), scene).kind == HitKind::Background);
}
