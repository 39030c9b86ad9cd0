#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mts/geometry.hpp"
#include "mts/kinematics.hpp"
#include "mts/render.hpp"
#include "mts/scene.hpp"
#include "mts/segment.hpp"

namespace mts {

struct ServoConfig {
  double w1{1.0};
  double w2{0.0};  // w1 + w2 must equal 1
  double alpha{0.008};            // step size, meters per unit gradient
  double epsilon{1e-3};           // stop when windowed mean gradient norm <= epsilon
  double p_max{0.4};              // target-score ceiling
  int window_m{3};                // steps averaged in the gradient stop test
  int max_steps{200};
  double sigma{0.0};              // pixel-noise std
  std::uint64_t rng_seed{0};
  double step_cap{0.05};          // per-step translation cap, meters
  bool normalize_manipulability{true};  // divide m by its start value when w2 > 0
  double baseline_max_depth{2.0};       // RGB-D far-reading clamp, meters

  void validate() const;
};

struct GradientEstimate {
  Vec3 grad{Vec3::Zero()};           // objective units per meter, end-effector frame
  double residual_norm{0.0};
  Eigen::VectorXd per_camera_delta_f;
};

struct ServoStep {
  int index{0};
  Pose ee_pose;
  JointConfig q;
  double p_ref{0.0};
  Eigen::VectorXd p_cameras;   // n offset-camera scores (empty for the baseline)
  double m_ref{0.0};           // raw manipulability at the current configuration
  Eigen::VectorXd m_cameras;   // per-camera manipulability, filled when w2 > 0
  double f_ref{0.0};
  GradientEstimate gradient;
  Eigen::Vector2d roll_pitch_correction{0.0, 0.0};  // radians
};

enum class Termination {
  GradientConverged,
  ScoreReached,
  MaxSteps,
  TargetLost,
  IkFailed,
};

std::string termination_name(Termination t);
std::optional<Termination> termination_from_name(const std::string& name);

struct TrajectoryLog {
  std::vector<ServoStep> steps;
  Termination termination{Termination::MaxSteps};
  double a_start{0.0};
  double a_end{0.0};
  double f_n{0.0};
  bool manipulability_normalized{false};

  /// One row per step (k, position, quaternion wxyz, p_ref, f_ref, gradient,
  /// gradient norm, m_ref) plus a footer row with termination, A_start, A_end, f_N.
  void write_csv(std::ostream& out) const;
};

/// f = w1*p + w2*m (Eq. weighted view-quality objective).
double objective(double p, double m, double w1, double w2);

/// Rows are the raw (non-normalized) camera offsets in the end-effector frame.
Eigen::MatrixX3d direction_matrix(const CameraArray& array);

/// Raw objective differences f_i - f_ref, matching the raw rows of the
/// direction matrix.
Eigen::VectorXd delta_f(double f_ref, const Eigen::VectorXd& f_cameras);

/// Least-squares gradient from the per-camera differences via an orthogonal
/// factorization; requires rank-3 V (guarded at array construction).
GradientEstimate estimate_gradient(const Eigen::MatrixX3d& v,
                                   const Eigen::VectorXd& df);

/// Image-plane centering angles: ((c - center)/extent) * FOV per axis. Positive
/// values mean the centroid lies right/below center; applying a rotation of
/// +u about the camera y axis and -v about the camera x axis centers it.
Eigen::Vector2d roll_pitch_correction(const Eigen::Vector2d& centroid_px,
                                      const CameraIntrinsics& intrinsics);

struct StopDecision {
  bool stop{false};
  Termination reason{Termination::MaxSteps};
};

/// Score ceiling first, then the windowed mean gradient-norm test.
StopDecision should_stop(std::span<const GradientEstimate> history, double p_ref,
                         const ServoConfig& config);

struct TrialSetup {
  Pose start_pose;
  JointConfig q_start_seed;
};

/// The full multi-camera gradient-ascent servo loop.
TrajectoryLog run_3dmts(const SceneModel& scene, const ArmModel& arm,
                        const CameraArray& array, const SegmentationModel& seg_model,
                        const ServoConfig& config, const TrialSetup& setup);

/// Single-camera baseline: segment, ray-cast the mask centroid for depth, step
/// alpha toward that 3D point in a straight line; orientation held fixed.
TrajectoryLog run_baseline(const SceneModel& scene, const ArmModel& arm,
                           const CameraIntrinsics& rgbd_camera,
                           const SegmentationModel& seg_model,
                           const ServoConfig& config, const TrialSetup& setup);

}  // namespace mts
