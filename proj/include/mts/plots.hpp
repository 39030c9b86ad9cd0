#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mts/scene.hpp"
#include "mts/servo.hpp"

namespace mts {

/// Minimal step record parsed back from a trajectory CSV.
struct PlottableTrajectory {
  std::string label;
  std::optional<double> theta_deg;
  std::vector<Vec3> positions;
  std::vector<double> f_ref;
};

PlottableTrajectory read_trajectory_csv(const std::string& path);

/// Single-trajectory figure: x-y and x-z path projections with start/end
/// markers and target/occluder footprints, plus the objective-vs-step curve.
std::string trajectory_svg(const PlottableTrajectory& traj,
                           const std::optional<SceneModel>& scene);

/// Overlay of several trajectories colored by label (e.g. occlusion angle).
std::string overlay_svg(const std::vector<PlottableTrajectory>& trajectories,
                        const std::optional<SceneModel>& scene);

}  // namespace mts
