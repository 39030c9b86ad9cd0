#pragma once

#include <vector>

#include "mts/geometry.hpp"

namespace mts {

/// Standard DH row: RotZ(theta) TransZ(d) TransX(a) RotX(alpha), revolute joints.
struct DhRow {
  double a{0.0};
  double alpha{0.0};
  double d{0.0};
  double theta_offset{0.0};
};

struct JointLimit {
  double lo{-kPi};
  double hi{kPi};
};

using JointConfig = Eigen::VectorXd;
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// Serial revolute manipulator described by standard DH rows. The shipped
/// experiment arm has 7 joints; test fixtures use shorter chains.
struct ArmModel {
  std::vector<DhRow> dh;
  std::vector<JointLimit> limits;
  Pose base_pose;

  int dof() const { return static_cast<int>(dh.size()); }
  void validate() const;
  bool within_limits(const JointConfig& q) const;
  double reach() const;  // sum of |a| + |d| over rows

  /// Generic 7-DoF research arm, ~0.9 m reach, the documented default.
  static ArmModel default_arm();
};

Pose forward_kinematics(const ArmModel& arm, const JointConfig& q);

/// Geometric Jacobian, rows (linear xyz, angular xyz), world frame.
Jacobian jacobian(const ArmModel& arm, const JointConfig& q);

/// m(q) = sqrt(det(J J^T)), full 6xN Jacobian; round-off negatives clamp to 0.
double manipulability(const ArmModel& arm, const JointConfig& q);

struct IkOptions {
  double position_tol{1e-5};     // meters
  double orientation_tol{1e-4};  // radians
  int max_iterations{200};
  double damping{0.01};
};

struct IkResult {
  JointConfig q;
  bool converged{false};
  double position_residual{0.0};
  double orientation_residual{0.0};
  int iterations{0};
  bool within_limits{true};
};

/// Damped least-squares iteration from q_seed. Non-convergence is reported in
/// the result, never thrown; the caller decides.
IkResult inverse_kinematics(const ArmModel& arm, const Pose& target,
                            const JointConfig& q_seed, const IkOptions& options = {});

struct ManipulabilityAtPoint {
  bool ok{false};
  double m{0.0};
  IkResult ik;
};

/// Manipulability at the IK solution for the pose (point, orientation); IK
/// failure propagates through `ok`.
ManipulabilityAtPoint manipulability_at_point(const ArmModel& arm, const Vec3& point,
                                              const Quat& orientation,
                                              const JointConfig& q_seed,
                                              const IkOptions& options = {});

}  // namespace mts
