#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mts/config.hpp"
#include "mts/harness.hpp"
#include "mts/kinematics.hpp"
#include "mts/render.hpp"
#include "mts/scene.hpp"
#include "mts/segment.hpp"
#include "mts/servo.hpp"

namespace py = pybind11;
using namespace mts;

namespace {

py::array_t<double> image_to_numpy(const Image& img) {
  py::array_t<double> out({img.height, img.width, 3});
  std::copy(img.pixels.begin(), img.pixels.end(), out.mutable_data());
  return out;
}

Image numpy_to_image(const py::array_t<double, py::array::c_style>& arr) {
  if (arr.ndim() != 3 || arr.shape(2) != 3)
    throw py::value_error("expected an (H, W, 3) array");
  Image img(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
  std::copy(arr.data(), arr.data() + arr.size(), img.pixels.begin());
  return img;
}

py::array_t<bool> mask_to_numpy(const Mask& mask) {
  py::array_t<bool> out({mask.height, mask.width});
  bool* p = out.mutable_data();
  for (std::size_t i = 0; i < mask.bits.size(); ++i) p[i] = mask.bits[i] != 0;
  return out;
}

}  // namespace

PYBIND11_MODULE(_mts3d, m) {
  m.doc() = "multi-perspective next-best-view servoing simulator";

  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def_readwrite("position", &Pose::position)
      .def_property(
          "quaternion_wxyz",
          [](const Pose& p) {
            return Eigen::Vector4d(p.orientation.w(), p.orientation.x(),
                                   p.orientation.y(), p.orientation.z());
          },
          [](Pose& p, const Eigen::Vector4d& q) {
            p.orientation = Quat(q(0), q(1), q(2), q(3)).normalized();
          })
      .def("rotation", &Pose::rotation)
      .def("__repr__", [](const Pose& p) {
        std::ostringstream os;
        os << "Pose(position=[" << p.position.transpose() << "])";
        return os.str();
      });
  m.def("look_orientation_wxyz", [](const Vec3& forward, const Vec3& up) {
    const Quat q = look_orientation(forward, up);
    return Eigen::Vector4d(q.w(), q.x(), q.y(), q.z());
  }, py::arg("forward"), py::arg("up") = Vec3(0, 0, 1));

  py::enum_<OccluderShape>(m, "OccluderShape")
      .value("disk", OccluderShape::Disk)
      .value("square", OccluderShape::Square);

  py::class_<SceneBaseConfig>(m, "SceneBaseConfig")
      .def(py::init<>())
      .def_readwrite("target_anchor", &SceneBaseConfig::target_anchor)
      .def_readwrite("start_camera", &SceneBaseConfig::start_camera)
      .def_readwrite("target_radius", &SceneBaseConfig::target_radius)
      .def_readwrite("target_color", &SceneBaseConfig::target_color)
      .def_readwrite("include_occluder", &SceneBaseConfig::include_occluder)
      .def_readwrite("occluder_standoff", &SceneBaseConfig::occluder_standoff)
      .def_readwrite("occluder_half_extent", &SceneBaseConfig::occluder_half_extent)
      .def_readwrite("occluder_shape", &SceneBaseConfig::occluder_shape)
      .def_readwrite("occluder_color", &SceneBaseConfig::occluder_color)
      .def_readwrite("background_color", &SceneBaseConfig::background_color)
      .def_readwrite("workspace_half_extent", &SceneBaseConfig::workspace_half_extent);

  py::enum_<HitKind>(m, "HitKind")
      .value("target", HitKind::Target)
      .value("occluder", HitKind::Occluder)
      .value("background", HitKind::Background);

  py::class_<SceneModel>(m, "SceneModel")
      .def_property_readonly("target_center",
                             [](const SceneModel& s) { return s.target.center; })
      .def_property_readonly("target_radius",
                             [](const SceneModel& s) { return s.target.radius; })
      .def_property_readonly("occluder_centers", [](const SceneModel& s) {
        std::vector<Vec3> centers;
        for (const Occluder& o : s.occluders) centers.push_back(o.center);
        return centers;
      });

  m.def("build_scene", &build_scene, py::arg("target_offset_yz"),
        py::arg("occluder_offset_yz"), py::arg("occlusion_angle_deg"),
        py::arg("base"));
  m.def(
      "ray_hit",
      [](const Vec3& origin, const Vec3& direction, const SceneModel& scene) {
        const HitRecord hit = ray_hit(origin, direction, scene);
        return py::make_tuple(hit.kind, hit.distance, hit.color);
      },
      py::arg("origin"), py::arg("direction"), py::arg("scene"),
      "Returns (kind, distance, color) of the nearest intersection.");

  py::class_<CameraIntrinsics>(m, "CameraIntrinsics")
      .def_static("square", &CameraIntrinsics::square, py::arg("resolution"),
                  py::arg("horizontal_fov_rad"))
      .def_readonly("width", &CameraIntrinsics::width)
      .def_readonly("height", &CameraIntrinsics::height)
      .def_readonly("horizontal_fov", &CameraIntrinsics::horizontal_fov)
      .def("focal_px", &CameraIntrinsics::focal_px);

  py::class_<CameraArray>(m, "CameraArray")
      .def(py::init<std::vector<Vec3>, CameraIntrinsics>(), py::arg("offsets"),
           py::arg("intrinsics"))
      .def_static("grid_layout", &CameraArray::grid_layout, py::arg("dx"),
                  py::arg("dy"), py::arg("dz"), py::arg("intrinsics"))
      .def_static("from_radius", &CameraArray::from_radius, py::arg("radius"),
                  py::arg("axial_offset"), py::arg("intrinsics"))
      .def_property_readonly("offsets", &CameraArray::offsets)
      .def("baselines", &CameraArray::baselines)
      .def("nominal_radius", &CameraArray::nominal_radius);

  m.def(
      "render",
      [](const Pose& pose, const CameraIntrinsics& intr, const SceneModel& scene) {
        return image_to_numpy(render(pose, intr, scene));
      },
      py::arg("camera_pose"), py::arg("intrinsics"), py::arg("scene"),
      "Flat-shaded pinhole render as an (H, W, 3) float array.");
  m.def(
      "add_pixel_noise",
      [](const py::array_t<double, py::array::c_style>& img, double sigma,
         std::uint64_t seed) {
        return image_to_numpy(add_pixel_noise(numpy_to_image(img), sigma, seed));
      },
      py::arg("image"), py::arg("sigma"), py::arg("rng_seed"));

  py::class_<SegmentationModel>(m, "SegmentationModel")
      .def_static("from_mahalanobis_radius", &SegmentationModel::from_mahalanobis_radius,
                  py::arg("mean"), py::arg("variance"), py::arg("radius"))
      .def_readwrite("mean", &SegmentationModel::mean)
      .def_readwrite("variance", &SegmentationModel::variance)
      .def_readwrite("tau", &SegmentationModel::tau)
      .def("peak_density", &SegmentationModel::peak_density);

  m.def("rgb_to_rotated_hsv", &rgb_to_rotated_hsv, py::arg("rgb"));
  m.def("gaussian_density", &gaussian_density, py::arg("x"), py::arg("model"));
  m.def(
      "segment",
      [](const py::array_t<double, py::array::c_style>& img,
         const SegmentationModel& model) {
        return mask_to_numpy(segment(numpy_to_image(img), model));
      },
      py::arg("image"), py::arg("model"), "Boolean (H, W) target mask.");
  m.def(
      "target_score",
      [](const py::array_t<double, py::array::c_style>& img,
         const SegmentationModel& model) {
        return target_score(segment(numpy_to_image(img), model));
      },
      py::arg("image"), py::arg("model"));

  py::class_<ArmModel>(m, "ArmModel")
      .def_static("default_arm", &ArmModel::default_arm)
      .def_property_readonly("dof", &ArmModel::dof)
      .def("reach", &ArmModel::reach);
  m.def("load_arm_config", [](const std::string& path) {
    JointConfig seed;
    ArmModel arm = load_arm_config(path, &seed);
    return py::make_tuple(arm, seed);
  });
  m.def("forward_kinematics", [](const ArmModel& arm, const JointConfig& q) {
    return forward_kinematics(arm, q);
  });
  m.def("jacobian", [](const ArmModel& arm, const JointConfig& q) {
    return Eigen::MatrixXd(jacobian(arm, q));
  });
  m.def("manipulability", &manipulability, py::arg("arm"), py::arg("q"));
  m.def(
      "inverse_kinematics",
      [](const ArmModel& arm, const Pose& target, const JointConfig& seed) {
        const IkResult r = inverse_kinematics(arm, target, seed);
        return py::dict(py::arg("q") = r.q, py::arg("converged") = r.converged,
                        py::arg("position_residual") = r.position_residual,
                        py::arg("orientation_residual") = r.orientation_residual,
                        py::arg("iterations") = r.iterations,
                        py::arg("within_limits") = r.within_limits);
      },
      py::arg("arm"), py::arg("target"), py::arg("q_seed"));

  m.def("objective", &objective, py::arg("p"), py::arg("m"), py::arg("w1"),
        py::arg("w2"));
  m.def("direction_matrix", &direction_matrix, py::arg("array"));
  m.def("delta_f", &delta_f, py::arg("f_ref"), py::arg("f_cameras"));
  m.def(
      "estimate_gradient",
      [](const Eigen::MatrixX3d& v, const Eigen::VectorXd& df) {
        const GradientEstimate est = estimate_gradient(v, df);
        return py::make_tuple(est.grad, est.residual_norm);
      },
      py::arg("direction_matrix"), py::arg("delta_f"),
      "Least-squares gradient and residual norm.");
  m.def("roll_pitch_correction", &roll_pitch_correction, py::arg("centroid_px"),
        py::arg("intrinsics"));

  py::enum_<Termination>(m, "Termination")
      .value("gradient_converged", Termination::GradientConverged)
      .value("score_reached", Termination::ScoreReached)
      .value("max_steps", Termination::MaxSteps)
      .value("target_lost", Termination::TargetLost)
      .value("ik_failed", Termination::IkFailed);

  py::class_<TrajectoryLog>(m, "TrajectoryLog")
      .def_readonly("termination", &TrajectoryLog::termination)
      .def_readonly("a_start", &TrajectoryLog::a_start)
      .def_readonly("a_end", &TrajectoryLog::a_end)
      .def_readonly("f_n", &TrajectoryLog::f_n)
      .def_property_readonly("num_steps",
                             [](const TrajectoryLog& l) { return l.steps.size(); })
      .def_property_readonly("positions",
                             [](const TrajectoryLog& l) {
                               Eigen::MatrixX3d p(l.steps.size(), 3);
                               for (std::size_t i = 0; i < l.steps.size(); ++i)
                                 p.row(i) = l.steps[i].ee_pose.position.transpose();
                               return p;
                             })
      .def_property_readonly("p_ref",
                             [](const TrajectoryLog& l) {
                               Eigen::VectorXd p(l.steps.size());
                               for (std::size_t i = 0; i < l.steps.size(); ++i)
                                 p(i) = l.steps[i].p_ref;
                               return p;
                             })
      .def_property_readonly("f_ref",
                             [](const TrajectoryLog& l) {
                               Eigen::VectorXd f(l.steps.size());
                               for (std::size_t i = 0; i < l.steps.size(); ++i)
                                 f(i) = l.steps[i].f_ref;
                               return f;
                             })
      .def("to_csv", [](const TrajectoryLog& l) {
        std::ostringstream os;
        l.write_csv(os);
        return os.str();
      });

  py::enum_<Method>(m, "Method")
      .value("proposed", Method::Proposed)
      .value("naive", Method::Naive);

  py::class_<TrialConfig>(m, "TrialConfig")
      .def_readwrite("scene", &TrialConfig::scene)
      .def_readwrite("target_offset", &TrialConfig::target_offset)
      .def_readwrite("occluder_offset", &TrialConfig::occluder_offset)
      .def_readwrite("occlusion_angle_deg", &TrialConfig::occlusion_angle_deg)
      .def_readwrite("segmentation", &TrialConfig::segmentation)
      .def_readwrite("resolution", &TrialConfig::resolution);

  m.def("load_trial_config", &load_trial_config, py::arg("path"));
  m.def(
      "run_trial",
      [](const TrialConfig& cfg, Method method) {
        py::gil_scoped_release release;
        return run_trial(cfg, method);
      },
      py::arg("config"), py::arg("method"),
      "Runs one servo trial and returns its trajectory log.");

  m.def(
      "set_servo",
      [](TrialConfig& cfg, double w1, double w2, double alpha, double p_max,
         int max_steps, double sigma, std::uint64_t seed) {
        cfg.servo.w1 = w1;
        cfg.servo.w2 = w2;
        cfg.servo.alpha = alpha;
        cfg.servo.p_max = p_max;
        cfg.servo.max_steps = max_steps;
        cfg.servo.sigma = sigma;
        cfg.servo.rng_seed = seed;
        cfg.servo.validate();
      },
      py::arg("config"), py::arg("w1"), py::arg("w2"), py::arg("alpha"),
      py::arg("p_max"), py::arg("max_steps"), py::arg("sigma"), py::arg("seed"));
}
