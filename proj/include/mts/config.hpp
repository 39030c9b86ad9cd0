#pragma once

#include <optional>
#include <string>
#include <utility>

#include "mts/kinematics.hpp"
#include "mts/render.hpp"
#include "mts/scene.hpp"
#include "mts/segment.hpp"
#include "mts/servo.hpp"

namespace mts {

/// Camera-array geometry: explicit 3x3 grid offsets, or a corner radius with a
/// fixed axial offset keeping the layout full-rank.
struct ArrayConfig {
  double dx{0.027};
  double dy{0.027};
  double dz{0.03};
  std::optional<double> radius;
  double axial_offset{0.03};

  CameraArray build(const CameraIntrinsics& intrinsics) const;
  double effective_radius() const;
};

/// Everything one trial needs; sweeps override fields per cell.
struct TrialConfig {
  SceneBaseConfig scene;
  std::pair<double, double> target_offset{0.0, 0.0};
  std::pair<double, double> occluder_offset{0.0, 0.0};
  double occlusion_angle_deg{0.0};
  /// Actual trial start relative to the nominal scene camera (the occlusion
  /// angle's rotation axis keeps using the nominal position).
  Vec3 start_camera_offset{Vec3::Zero()};
  SegmentationModel segmentation{
      SegmentationModel::from_mahalanobis_radius({0.25, 0.9, 0.9},
                                                 {0.004, 0.04, 0.04}, 3.0)};
  int resolution{64};
  double horizontal_fov_deg{60.0};
  ArrayConfig array;
  ServoConfig servo;
  ArmModel arm{ArmModel::default_arm()};
  JointConfig q_start_seed;

  CameraIntrinsics intrinsics() const;
  /// Builds the scene and checks occluder/background colors stay outside the
  /// segmentation acceptance radius.
  SceneModel build_scene_model() const;
  /// Start pose: at the nominal start camera position, looking at the anchor.
  TrialSetup setup() const;
};

struct SweepLists {
  std::vector<double> target_y{0.0};
  std::vector<double> target_z{0.0};
  std::vector<double> occ_y{0.0};
  std::vector<double> occ_z{0.0};
  std::vector<double> theta_deg{0.0};
  std::vector<std::pair<double, double>> weights;  // empty: base servo weights
  std::vector<double> radius;                      // empty: base array
  std::vector<double> sigma;                       // empty: base servo sigma
  int trials_per_cell{1};
};

struct SweepConfig {
  TrialConfig base;
  SweepLists lists;
};

TrialConfig load_trial_config(const std::string& path);
SweepConfig load_sweep_config(const std::string& path);
ArmModel load_arm_config(const std::string& path, JointConfig* start_seed = nullptr);

}  // namespace mts
