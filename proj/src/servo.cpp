#include "mts/servo.hpp"

#include <cmath>
#include <ostream>

#include "mts/errors.hpp"
#include "mts/format.hpp"
#include "mts/rng.hpp"

namespace mts {

void ServoConfig::validate() const {
  if (std::abs(w1 + w2 - 1.0) > 1e-12) throw ConfigError("w1 + w2 must equal 1");
  if (w1 < 0.0 || w2 < 0.0) throw ConfigError("objective weights must be >= 0");
  if (alpha < 0.0) throw ConfigError("step size alpha must be >= 0");
  if (!(p_max > 0.0 && p_max <= 1.0)) throw ConfigError("p_max must be in (0, 1]");
  if (epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
  if (window_m < 1) throw ConfigError("stop window must be >= 1");
  if (max_steps < 1) throw ConfigError("max_steps must be >= 1");
  if (sigma < 0.0) throw ConfigError("pixel noise sigma must be >= 0");
  if (step_cap <= 0.0) throw ConfigError("step cap must be > 0");
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::GradientConverged: return "gradient_converged";
    case Termination::ScoreReached: return "score_reached";
    case Termination::MaxSteps: return "max_steps";
    case Termination::TargetLost: return "target_lost";
    case Termination::IkFailed: return "ik_failed";
  }
  return "unknown";
}

std::optional<Termination> termination_from_name(const std::string& name) {
  for (Termination t : {Termination::GradientConverged, Termination::ScoreReached,
                        Termination::MaxSteps, Termination::TargetLost,
                        Termination::IkFailed})
    if (termination_name(t) == name) return t;
  return std::nullopt;
}

void TrajectoryLog::write_csv(std::ostream& out) const {
  out << "k,x,y,z,qw,qx,qy,qz,p_ref,f_ref,grad_x,grad_y,grad_z,grad_norm,m_ref\n";
  for (const ServoStep& s : steps) {
    const Quat& q = s.ee_pose.orientation;
    out << s.index << ',' << fmt_g17(s.ee_pose.position.x()) << ','
        << fmt_g17(s.ee_pose.position.y()) << ',' << fmt_g17(s.ee_pose.position.z())
        << ',' << fmt_g17(q.w()) << ',' << fmt_g17(q.x()) << ',' << fmt_g17(q.y())
        << ',' << fmt_g17(q.z()) << ',' << fmt_g17(s.p_ref) << ',' << fmt_g17(s.f_ref)
        << ',' << fmt_g17(s.gradient.grad.x()) << ',' << fmt_g17(s.gradient.grad.y())
        << ',' << fmt_g17(s.gradient.grad.z()) << ','
        << fmt_g17(s.gradient.grad.norm()) << ',' << fmt_g17(s.m_ref) << '\n';
  }
  out << "termination," << termination_name(termination) << ",A_start,"
      << fmt_g17(a_start) << ",A_end," << fmt_g17(a_end) << ",f_N," << fmt_g17(f_n)
      << ",m_normalized," << (manipulability_normalized ? 1 : 0) << '\n';
}

double objective(double p, double m, double w1, double w2) {
  return w1 * p + w2 * m;
}

Eigen::MatrixX3d direction_matrix(const CameraArray& array) {
  Eigen::MatrixX3d v(array.count(), 3);
  for (int i = 0; i < array.count(); ++i)
    v.row(i) = array.offsets()[static_cast<std::size_t>(i)].transpose();
  return v;
}

Eigen::VectorXd delta_f(double f_ref, const Eigen::VectorXd& f_cameras) {
  return f_cameras.array() - f_ref;
}

GradientEstimate estimate_gradient(const Eigen::MatrixX3d& v,
                                   const Eigen::VectorXd& df) {
  if (v.rows() != df.size())
    throw ConfigError("direction matrix and difference vector sizes disagree");
  Eigen::ColPivHouseholderQR<Eigen::MatrixX3d> qr(v);
  if (qr.rank() < 3)
    throw ConfigError("direction matrix is rank-deficient; gradient unrecoverable");
  GradientEstimate est;
  est.grad = qr.solve(df);
  est.residual_norm = (v * est.grad - df).norm();
  est.per_camera_delta_f = df;
  return est;
}

Eigen::Vector2d roll_pitch_correction(const Eigen::Vector2d& centroid_px,
                                      const CameraIntrinsics& intrinsics) {
  const double du = (centroid_px.x() - intrinsics.cu) / intrinsics.width;
  const double dv = (centroid_px.y() - intrinsics.cv) / intrinsics.height;
  return Eigen::Vector2d(du * intrinsics.horizontal_fov,
                         dv * intrinsics.vertical_fov());
}

StopDecision should_stop(std::span<const GradientEstimate> history, double p_ref,
                         const ServoConfig& config) {
  if (p_ref >= config.p_max) return {true, Termination::ScoreReached};
  if (history.empty()) return {false, Termination::MaxSteps};
  const std::size_t window =
      std::min(history.size(), static_cast<std::size_t>(config.window_m));
  double sum = 0.0;
  for (std::size_t i = history.size() - window; i < history.size(); ++i)
    sum += history[i].grad.norm();
  if (sum / static_cast<double>(window) <= config.epsilon)
    return {true, Termination::GradientConverged};
  return {false, Termination::MaxSteps};
}

namespace {

// Orientation update centering the target: +u about the camera y axis,
// -v about the camera x axis, applied in the end-effector (camera) frame.
Quat apply_centering(const Quat& orientation, const Eigen::Vector2d& rp) {
  return (orientation * Eigen::AngleAxisd(rp.x(), Vec3::UnitY()) *
          Eigen::AngleAxisd(-rp.y(), Vec3::UnitX()))
      .normalized();
}

void finalize_log(TrajectoryLog& log) {
  if (log.steps.empty()) {
    log.a_start = log.a_end = log.f_n = 0.0;
    return;
  }
  log.a_start = log.steps.front().p_ref;
  log.a_end = log.steps.back().p_ref;
  log.f_n = log.steps.back().f_ref;
}

}  // namespace

TrajectoryLog run_3dmts(const SceneModel& scene, const ArmModel& arm,
                        const CameraArray& array, const SegmentationModel& seg_model,
                        const ServoConfig& config, const TrialSetup& setup) {
  config.validate();
  arm.validate();
  const int n = array.count();
  const Eigen::MatrixX3d v = direction_matrix(array);

  TrajectoryLog log;
  const IkResult ik0 = inverse_kinematics(arm, setup.start_pose, setup.q_start_seed);
  if (!ik0.converged) {
    log.termination = Termination::IkFailed;
    finalize_log(log);
    return log;
  }
  JointConfig q = ik0.q;
  Pose pose = forward_kinematics(arm, q);

  const double m_start = manipulability(arm, q);
  const bool normalize =
      config.normalize_manipulability && config.w2 > 0.0 && m_start > 1e-12;
  log.manipulability_normalized = normalize;
  const double m_scale = normalize ? 1.0 / m_start : 1.0;

  std::vector<GradientEstimate> history;
  int consecutive_empty = 0;

  for (int k = 0; k < config.max_steps; ++k) {
    const ArrayViews views =
        array_views(pose, array, scene, config.sigma,
                    derive_seed(config.rng_seed, static_cast<std::uint64_t>(k)));
    const Mask ref_mask = segment(views.reference, seg_model);
    const double p_ref = target_score(ref_mask);
    const std::optional<Eigen::Vector2d> cent = centroid(ref_mask);

    ServoStep step;
    step.index = k;
    step.ee_pose = pose;
    step.q = q;
    step.p_ref = p_ref;
    step.p_cameras.resize(n);
    for (int i = 0; i < n; ++i)
      step.p_cameras(i) = target_score(segment(views.offsets[i], seg_model));
    step.m_ref = manipulability(arm, q);

    bool camera_ik_failed = false;
    Eigen::VectorXd f_cameras(n);
    if (config.w2 > 0.0) {
      step.m_cameras.resize(n);
      for (int i = 0; i < n; ++i) {
        const Pose cam = array.camera_pose(pose, i);
        const ManipulabilityAtPoint mp =
            manipulability_at_point(arm, cam.position, cam.orientation, q);
        if (!mp.ok) {
          camera_ik_failed = true;
          break;
        }
        step.m_cameras(i) = mp.m * m_scale;
        f_cameras(i) =
            objective(step.p_cameras(i), step.m_cameras(i), config.w1, config.w2);
      }
    } else {
      for (int i = 0; i < n; ++i)
        f_cameras(i) = objective(step.p_cameras(i), 0.0, config.w1, config.w2);
    }
    step.f_ref = objective(p_ref, config.w2 > 0.0 ? step.m_ref * m_scale : 0.0,
                           config.w1, config.w2);

    if (camera_ik_failed) {
      log.steps.push_back(std::move(step));
      log.termination = Termination::IkFailed;
      break;
    }

    step.gradient = estimate_gradient(v, delta_f(step.f_ref, f_cameras));
    step.roll_pitch_correction =
        cent ? roll_pitch_correction(*cent, array.intrinsics())
             : Eigen::Vector2d::Zero().eval();
    history.push_back(step.gradient);
    log.steps.push_back(step);

    if (p_ref == 0.0) {
      ++consecutive_empty;
      if (k == 0 || consecutive_empty >= 3) {
        log.termination = Termination::TargetLost;
        break;
      }
    } else {
      consecutive_empty = 0;
    }

    // Transient dropouts do not count toward the gradient-convergence test.
    if (consecutive_empty == 0) {
      const StopDecision decision = should_stop(history, p_ref, config);
      if (decision.stop) {
        log.termination = decision.reason;
        break;
      }
    }
    if (k == config.max_steps - 1) {
      log.termination = Termination::MaxSteps;
      break;
    }

    Vec3 step_ee = config.alpha * step.gradient.grad;
    const double len = step_ee.norm();
    if (len > config.step_cap) step_ee *= config.step_cap / len;
    const Vec3 new_position = pose.position + pose.orientation * step_ee;
    const Quat new_orientation =
        apply_centering(pose.orientation, step.roll_pitch_correction);

    const IkResult ik =
        inverse_kinematics(arm, Pose{new_position, new_orientation}, q);
    if (!ik.converged) {
      log.termination = Termination::IkFailed;
      break;
    }
    q = ik.q;
    pose = forward_kinematics(arm, q);
  }

  finalize_log(log);
  return log;
}

TrajectoryLog run_baseline(const SceneModel& scene, const ArmModel& arm,
                           const CameraIntrinsics& rgbd_camera,
                           const SegmentationModel& seg_model,
                           const ServoConfig& config, const TrialSetup& setup) {
  config.validate();
  arm.validate();

  TrajectoryLog log;
  const IkResult ik0 = inverse_kinematics(arm, setup.start_pose, setup.q_start_seed);
  if (!ik0.converged) {
    log.termination = Termination::IkFailed;
    finalize_log(log);
    return log;
  }
  JointConfig q = ik0.q;
  Pose pose = forward_kinematics(arm, q);

  const double m_start = manipulability(arm, q);
  const bool normalize =
      config.normalize_manipulability && config.w2 > 0.0 && m_start > 1e-12;
  log.manipulability_normalized = normalize;
  const double m_scale = normalize ? 1.0 / m_start : 1.0;

  // The target point is estimated once from the first frame (segmented
  // centroid + ray-cast depth, the RGB-D stand-in) and the camera walks a
  // straight line toward it; stop conditions are still evaluated every frame.
  std::optional<Vec3> aim_point;
  int consecutive_empty = 0;
  for (int k = 0; k < config.max_steps; ++k) {
    const Image view = add_pixel_noise(
        render(pose, rgbd_camera, scene), config.sigma,
        derive_seed(config.rng_seed, static_cast<std::uint64_t>(k), 0));
    const Mask mask = segment(view, seg_model);
    const double p_ref = target_score(mask);
    const std::optional<Eigen::Vector2d> cent = centroid(mask);

    ServoStep step;
    step.index = k;
    step.ee_pose = pose;
    step.q = q;
    step.p_ref = p_ref;
    step.m_ref = manipulability(arm, q);
    step.f_ref = objective(p_ref, config.w2 > 0.0 ? step.m_ref * m_scale : 0.0,
                           config.w1, config.w2);
    log.steps.push_back(step);

    if (!cent) {
      ++consecutive_empty;
      if (k == 0 || consecutive_empty >= 3) {
        log.termination = Termination::TargetLost;
        break;
      }
    } else {
      consecutive_empty = 0;
    }

    if (p_ref >= config.p_max) {
      log.termination = Termination::ScoreReached;
      break;
    }
    if (k == config.max_steps - 1) {
      log.termination = Termination::MaxSteps;
      break;
    }

    if (!aim_point && cent) {
      const double px = std::clamp(std::round(cent->x()), 0.0,
                                   static_cast<double>(rgbd_camera.width - 1));
      const double py = std::clamp(std::round(cent->y()), 0.0,
                                   static_cast<double>(rgbd_camera.height - 1));
      const Vec3 dir = pose.rotation() * pixel_ray_direction(rgbd_camera, px, py);
      const HitRecord hit = ray_hit(pose.position, dir, scene);
      const double depth =
          std::isfinite(hit.distance) ? hit.distance : config.baseline_max_depth;
      aim_point = pose.position + depth * dir;
    }

    Pose next = pose;
    if (aim_point) {
      const Vec3 to_point = *aim_point - pose.position;
      // Hold position once the estimated target point is reached.
      if (to_point.norm() > config.alpha)
        next.position = pose.position + config.alpha * to_point.normalized();
    }

    const IkResult ik = inverse_kinematics(arm, next, q);
    if (!ik.converged) {
      log.termination = Termination::IkFailed;
      break;
    }
    q = ik.q;
    pose = forward_kinematics(arm, q);
  }

  finalize_log(log);
  return log;
}

}  // namespace mts
