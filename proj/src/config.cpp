#include "mts/config.hpp"

#include <yaml-cpp/yaml.h>

#include <filesystem>

#include "mts/errors.hpp"

namespace mts {

namespace {

namespace fs = std::filesystem;

Vec3 as_vec3(const YAML::Node& node, const char* what) {
  if (!node || !node.IsSequence() || node.size() != 3)
    throw ConfigError(std::string(what) + " must be a 3-element list");
  return Vec3(node[0].as<double>(), node[1].as<double>(), node[2].as<double>());
}

std::pair<double, double> as_pair(const YAML::Node& node, const char* what) {
  if (!node || !node.IsSequence() || node.size() != 2)
    throw ConfigError(std::string(what) + " must be a 2-element list");
  return {node[0].as<double>(), node[1].as<double>()};
}

template <typename T>
void maybe(const YAML::Node& node, const char* key, T& out) {
  if (node[key]) out = node[key].as<T>();
}

void load_scene(const YAML::Node& node, TrialConfig& cfg) {
  if (!node) return;
  if (node["target_anchor"]) cfg.scene.target_anchor = as_vec3(node["target_anchor"], "target_anchor");
  if (node["start_camera"]) cfg.scene.start_camera = as_vec3(node["start_camera"], "start_camera");
  maybe(node, "target_radius", cfg.scene.target_radius);
  if (node["target_color"]) cfg.scene.target_color = as_vec3(node["target_color"], "target_color");
  if (node["background_color"])
    cfg.scene.background_color = as_vec3(node["background_color"], "background_color");
  maybe(node, "workspace_half_extent", cfg.scene.workspace_half_extent);
  if (const YAML::Node occ = node["occluder"]) {
    maybe(occ, "enabled", cfg.scene.include_occluder);
    maybe(occ, "standoff", cfg.scene.occluder_standoff);
    maybe(occ, "half_extent", cfg.scene.occluder_half_extent);
    if (occ["shape"]) {
      const std::string shape = occ["shape"].as<std::string>();
      if (shape == "disk") cfg.scene.occluder_shape = OccluderShape::Disk;
      else if (shape == "square") cfg.scene.occluder_shape = OccluderShape::Square;
      else throw ConfigError("occluder shape must be disk or square");
    }
    if (occ["color"]) cfg.scene.occluder_color = as_vec3(occ["color"], "occluder color");
  }
  if (node["target_offset"]) cfg.target_offset = as_pair(node["target_offset"], "target_offset");
  if (node["start_camera_offset"])
    cfg.start_camera_offset = as_vec3(node["start_camera_offset"], "start_camera_offset");
  if (node["occluder_offset"])
    cfg.occluder_offset = as_pair(node["occluder_offset"], "occluder_offset");
  maybe(node, "occlusion_angle_deg", cfg.occlusion_angle_deg);
}

void load_segmentation(const YAML::Node& node, TrialConfig& cfg) {
  if (!node) return;
  Vec3 mean = cfg.segmentation.mean;
  Vec3 variance = cfg.segmentation.variance;
  if (node["mean"]) mean = as_vec3(node["mean"], "segmentation mean");
  if (node["variance"]) variance = as_vec3(node["variance"], "segmentation variance");
  if (node["tau"]) {
    cfg.segmentation.mean = mean;
    cfg.segmentation.variance = variance;
    cfg.segmentation.tau = node["tau"].as<double>();
    if (cfg.segmentation.tau <= 0.0) throw ConfigError("tau must be positive");
  } else {
    double radius = 3.0;
    maybe(node, "mahalanobis_radius", radius);
    cfg.segmentation = SegmentationModel::from_mahalanobis_radius(mean, variance, radius);
  }
}

void load_servo(const YAML::Node& node, ServoConfig& servo) {
  if (!node) return;
  maybe(node, "w1", servo.w1);
  maybe(node, "w2", servo.w2);
  maybe(node, "alpha", servo.alpha);
  maybe(node, "epsilon", servo.epsilon);
  maybe(node, "p_max", servo.p_max);
  maybe(node, "window", servo.window_m);
  maybe(node, "max_steps", servo.max_steps);
  maybe(node, "sigma", servo.sigma);
  maybe(node, "seed", servo.rng_seed);
  maybe(node, "step_cap", servo.step_cap);
  maybe(node, "normalize_manipulability", servo.normalize_manipulability);
  maybe(node, "baseline_max_depth", servo.baseline_max_depth);
  servo.validate();
}

ArmModel parse_arm(const YAML::Node& node, JointConfig* start_seed) {
  ArmModel arm;
  if (node["base_position"]) arm.base_pose.position = as_vec3(node["base_position"], "base_position");
  if (node["base_orientation_wxyz"]) {
    const YAML::Node q = node["base_orientation_wxyz"];
    if (!q.IsSequence() || q.size() != 4)
      throw ConfigError("base_orientation_wxyz must have 4 entries (w,x,y,z)");
    arm.base_pose.orientation =
        Quat(q[0].as<double>(), q[1].as<double>(), q[2].as<double>(), q[3].as<double>())
            .normalized();
  }
  const YAML::Node dh = node["dh"];
  if (!dh || !dh.IsSequence()) throw ConfigError("arm config needs a dh list");
  for (const YAML::Node& row : dh) {
    if (!row.IsSequence() || row.size() != 4)
      throw ConfigError("each dh row needs 4 entries (a, alpha, d, theta_offset)");
    arm.dh.push_back({row[0].as<double>(), row[1].as<double>(), row[2].as<double>(),
                      row[3].as<double>()});
  }
  const YAML::Node limits = node["limits"];
  if (limits) {
    for (const YAML::Node& row : limits) {
      if (!row.IsSequence() || row.size() != 2)
        throw ConfigError("each joint limit needs 2 entries (lo, hi)");
      arm.limits.push_back({row[0].as<double>(), row[1].as<double>()});
    }
  } else {
    arm.limits.assign(arm.dh.size(), JointLimit{});
  }
  arm.validate();
  if (start_seed) {
    *start_seed = JointConfig::Zero(arm.dof());
    if (node["start_seed"]) {
      const YAML::Node seed = node["start_seed"];
      if (!seed.IsSequence() || static_cast<int>(seed.size()) != arm.dof())
        throw ConfigError("start_seed length must match the joint count");
      for (int i = 0; i < arm.dof(); ++i) (*start_seed)(i) = seed[i].as<double>();
    }
  }
  return arm;
}

void load_lists(const YAML::Node& node, SweepLists& lists) {
  auto load_list = [&](const char* key, std::vector<double>& out) {
    if (node[key]) out = node[key].as<std::vector<double>>();
    if (out.empty()) throw ConfigError(std::string("sweep list ") + key + " is empty");
  };
  load_list("target_y", lists.target_y);
  load_list("target_z", lists.target_z);
  load_list("occ_y", lists.occ_y);
  load_list("occ_z", lists.occ_z);
  load_list("theta_deg", lists.theta_deg);
  if (node["weights"]) {
    lists.weights.clear();
    for (const YAML::Node& w : node["weights"])
      lists.weights.push_back(as_pair(w, "weights entry"));
  }
  if (node["radius"]) lists.radius = node["radius"].as<std::vector<double>>();
  if (node["sigma"]) lists.sigma = node["sigma"].as<std::vector<double>>();
  maybe(node, "trials_per_cell", lists.trials_per_cell);
  if (lists.trials_per_cell < 1) throw ConfigError("trials_per_cell must be >= 1");
}

TrialConfig load_base(const YAML::Node& root, const fs::path& dir) {
  TrialConfig cfg;
  cfg.q_start_seed = JointConfig::Zero(cfg.arm.dof());
  load_scene(root["scene"], cfg);
  load_segmentation(root["segmentation"], cfg);
  if (const YAML::Node cam = root["camera"]) {
    maybe(cam, "resolution", cfg.resolution);
    maybe(cam, "horizontal_fov_deg", cfg.horizontal_fov_deg);
  }
  if (const YAML::Node arr = root["array"]) {
    maybe(arr, "dx", cfg.array.dx);
    maybe(arr, "dy", cfg.array.dy);
    maybe(arr, "dz", cfg.array.dz);
    if (arr["radius"]) cfg.array.radius = arr["radius"].as<double>();
    maybe(arr, "axial_offset", cfg.array.axial_offset);
  }
  load_servo(root["servo"], cfg.servo);
  if (const YAML::Node arm = root["arm"]) {
    if (arm["file"]) {
      const fs::path arm_path = dir / arm["file"].as<std::string>();
      cfg.arm = load_arm_config(arm_path.string(), &cfg.q_start_seed);
    } else {
      cfg.arm = parse_arm(arm, &cfg.q_start_seed);
    }
  }
  return cfg;
}

}  // namespace

CameraArray ArrayConfig::build(const CameraIntrinsics& intrinsics) const {
  if (radius) return CameraArray::from_radius(*radius, axial_offset, intrinsics);
  return CameraArray::grid_layout(dx, dy, dz, intrinsics);
}

double ArrayConfig::effective_radius() const {
  if (radius) return *radius;
  return Vec3(dx, dy, dz).norm();
}

CameraIntrinsics TrialConfig::intrinsics() const {
  return CameraIntrinsics::square(resolution, deg2rad(horizontal_fov_deg));
}

SceneModel TrialConfig::build_scene_model() const {
  SceneModel scene =
      build_scene(target_offset, occluder_offset, occlusion_angle_deg, this->scene);
  if (!color_separable(scene.background_color, segmentation))
    throw ConfigError("background color falls inside the segmentation acceptance radius");
  for (const Occluder& occ : scene.occluders)
    if (!color_separable(occ.color, segmentation))
      throw ConfigError("occluder color falls inside the segmentation acceptance radius");
  return scene;
}

TrialSetup TrialConfig::setup() const {
  TrialSetup s;
  s.start_pose.position = scene.start_camera + start_camera_offset;
  s.start_pose.orientation =
      look_orientation(scene.target_anchor - s.start_pose.position);
  s.q_start_seed =
      q_start_seed.size() == arm.dof() ? q_start_seed : JointConfig::Zero(arm.dof());
  return s;
}

TrialConfig load_trial_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot load config " + path + ": " + e.what());
  }
  return load_base(root, fs::path(path).parent_path());
}

SweepConfig load_sweep_config(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot load config " + path + ": " + e.what());
  }
  SweepConfig cfg;
  cfg.base = load_base(root, fs::path(path).parent_path());
  if (!root["sweep"]) throw ConfigError("sweep config needs a sweep section");
  load_lists(root["sweep"], cfg.lists);
  return cfg;
}

ArmModel load_arm_config(const std::string& path, JointConfig* start_seed) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot load arm config " + path + ": " + e.what());
  }
  if (!root["arm"]) throw ConfigError("arm config needs an arm section");
  return parse_arm(root["arm"], start_seed);
}

}  // namespace mts
