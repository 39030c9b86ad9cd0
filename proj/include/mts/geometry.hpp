#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cmath>

namespace mts {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Quat = Eigen::Quaterniond;

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

inline bool is_unit(const Vec3& v, double tol = 1e-9) {
  return std::abs(v.norm() - 1.0) < tol;
}

/// Rigid transform. Quaternions are kept normalized; serialized scalar-first (w,x,y,z).
struct Pose {
  Vec3 position{Vec3::Zero()};
  Quat orientation{Quat::Identity()};

  Mat3 rotation() const { return orientation.toRotationMatrix(); }

  Vec3 transform_point(const Vec3& local) const {
    return position + orientation * local;
  }
  Vec3 transform_direction(const Vec3& local) const { return orientation * local; }

  /// this * local, with `local` expressed in this pose's frame.
  Pose compose(const Pose& local) const {
    return Pose{position + orientation * local.position,
                (orientation * local.orientation).normalized()};
  }
};

/// Camera/end-effector orientation looking along `forward` with `up` as the
/// world up hint. Camera convention: +z optical axis, +x image right, +y image down.
inline Quat look_orientation(const Vec3& forward, const Vec3& up = Vec3::UnitZ()) {
  const Vec3 z = forward.normalized();
  Vec3 x = z.cross(up);
  if (x.norm() < 1e-12) x = z.cross(Vec3::UnitY());
  x.normalize();
  const Vec3 y = z.cross(x);
  Mat3 r;
  r.col(0) = x;
  r.col(1) = y;
  r.col(2) = z;
  return Quat(r).normalized();
}

/// Rotation-vector (axis*angle) of the relative rotation taking `from` to `to`.
inline Vec3 orientation_error(const Quat& to, const Quat& from) {
  Quat delta = to * from.conjugate();
  delta.normalize();
  if (delta.w() < 0.0) delta.coeffs() = -delta.coeffs();
  const Eigen::AngleAxisd aa(delta);
  return aa.angle() * aa.axis();
}

}  // namespace mts
