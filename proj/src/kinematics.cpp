#include "mts/kinematics.hpp"

#include <cmath>

#include "mts/errors.hpp"

namespace mts {

namespace {

Eigen::Matrix4d dh_transform(const DhRow& row, double q) {
  const double theta = q + row.theta_offset;
  const double ct = std::cos(theta), st = std::sin(theta);
  const double ca = std::cos(row.alpha), sa = std::sin(row.alpha);
  Eigen::Matrix4d t;
  t << ct, -st * ca, st * sa, row.a * ct,
       st, ct * ca, -ct * sa, row.a * st,
       0.0, sa, ca, row.d,
       0.0, 0.0, 0.0, 1.0;
  return t;
}

Eigen::Matrix4d pose_matrix(const Pose& pose) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = pose.rotation();
  m.topRightCorner<3, 1>() = pose.position;
  return m;
}

}  // namespace

void ArmModel::validate() const {
  if (dh.empty()) throw ConfigError("arm needs at least one DH row");
  if (limits.size() != dh.size())
    throw ConfigError("joint limit count must match DH row count");
  for (const JointLimit& l : limits)
    if (!(l.lo < l.hi)) throw ConfigError("joint limit lo must be < hi");
}

bool ArmModel::within_limits(const JointConfig& q) const {
  for (int i = 0; i < dof(); ++i)
    if (q(i) < limits[static_cast<std::size_t>(i)].lo ||
        q(i) > limits[static_cast<std::size_t>(i)].hi)
      return false;
  return true;
}

double ArmModel::reach() const {
  double r = 0.0;
  for (const DhRow& row : dh) r += std::abs(row.a) + std::abs(row.d);
  return r;
}

ArmModel ArmModel::default_arm() {
  ArmModel arm;
  const double h = kPi / 2.0;
  arm.dh = {
      {0.0, -h, 0.34, 0.0}, {0.0, h, 0.0, 0.0},  {0.0, h, 0.50, 0.0},
      {0.0, -h, 0.0, 0.0},  {0.0, -h, 0.50, 0.0}, {0.0, h, 0.0, 0.0},
      {0.0, 0.0, 0.15, 0.0},
  };
  arm.limits.assign(7, JointLimit{-2.96, 2.96});
  arm.limits[1] = JointLimit{-2.09, 2.09};
  arm.limits[3] = JointLimit{-2.8, 2.8};
  arm.limits[5] = JointLimit{-2.09, 2.09};
  arm.base_pose.position = Vec3(-0.45, 0.0, 0.0);
  return arm;
}

Pose forward_kinematics(const ArmModel& arm, const JointConfig& q) {
  Eigen::Matrix4d t = pose_matrix(arm.base_pose);
  for (int i = 0; i < arm.dof(); ++i)
    t *= dh_transform(arm.dh[static_cast<std::size_t>(i)], q(i));
  Pose pose;
  pose.position = t.topRightCorner<3, 1>();
  pose.orientation = Quat(Mat3(t.topLeftCorner<3, 3>())).normalized();
  return pose;
}

Jacobian jacobian(const ArmModel& arm, const JointConfig& q) {
  const int n = arm.dof();
  // Joint origins and z axes from the cumulative chain.
  std::vector<Vec3> origins(static_cast<std::size_t>(n) + 1);
  std::vector<Vec3> axes(static_cast<std::size_t>(n) + 1);
  Eigen::Matrix4d t = pose_matrix(arm.base_pose);
  origins[0] = t.topRightCorner<3, 1>();
  axes[0] = t.block<3, 1>(0, 2);
  for (int i = 0; i < n; ++i) {
    t *= dh_transform(arm.dh[static_cast<std::size_t>(i)], q(i));
    origins[static_cast<std::size_t>(i) + 1] = t.topRightCorner<3, 1>();
    axes[static_cast<std::size_t>(i) + 1] = t.block<3, 1>(0, 2);
  }
  const Vec3 p_ee = origins[static_cast<std::size_t>(n)];
  Jacobian j(6, n);
  for (int i = 0; i < n; ++i) {
    const Vec3& z = axes[static_cast<std::size_t>(i)];
    const Vec3& p = origins[static_cast<std::size_t>(i)];
    j.col(i).head<3>() = z.cross(p_ee - p);
    j.col(i).tail<3>() = z;
  }
  return j;
}

double manipulability(const ArmModel& arm, const JointConfig& q) {
  const Jacobian j = jacobian(arm, q);
  const Eigen::MatrixXd jjt = j * j.transpose();
  const double det = jjt.determinant();
  return det > 0.0 ? std::sqrt(det) : 0.0;
}

IkResult inverse_kinematics(const ArmModel& arm, const Pose& target,
                            const JointConfig& q_seed, const IkOptions& options) {
  IkResult result;
  result.q = q_seed;
  const double lambda_sq = options.damping * options.damping;
  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    const Pose pose = forward_kinematics(arm, result.q);
    const Vec3 pos_err = target.position - pose.position;
    const Vec3 rot_err = orientation_error(target.orientation, pose.orientation);
    result.position_residual = pos_err.norm();
    result.orientation_residual = rot_err.norm();
    result.iterations = iter;
    if (result.position_residual < options.position_tol &&
        result.orientation_residual < options.orientation_tol) {
      result.converged = true;
      break;
    }
    if (iter == options.max_iterations) break;

    Eigen::Matrix<double, 6, 1> err;
    err << pos_err, rot_err;
    const Jacobian j = jacobian(arm, result.q);
    Eigen::Matrix<double, 6, 6> jjt = j * j.transpose();
    jjt.diagonal().array() += lambda_sq;
    result.q += j.transpose() * jjt.ldlt().solve(err);
    // Revolute FK is 2pi-periodic; keep each joint on its principal branch so
    // solutions stay comparable against the limits.
    for (int i = 0; i < arm.dof(); ++i)
      result.q(i) = std::remainder(result.q(i), 2.0 * kPi);
  }
  result.within_limits = arm.within_limits(result.q);
  return result;
}

ManipulabilityAtPoint manipulability_at_point(const ArmModel& arm, const Vec3& point,
                                              const Quat& orientation,
                                              const JointConfig& q_seed,
                                              const IkOptions& options) {
  ManipulabilityAtPoint out;
  out.ik = inverse_kinematics(arm, Pose{point, orientation}, q_seed, options);
  out.ok = out.ik.converged;
  if (out.ok) out.m = manipulability(arm, out.ik.q);
  return out;
}

}  // namespace mts
