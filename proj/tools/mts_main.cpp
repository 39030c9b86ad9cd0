#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "mts/config.hpp"
#include "mts/errors.hpp"
#include "mts/harness.hpp"
#include "mts/plots.hpp"

namespace fs = std::filesystem;

namespace {

void dump_frames(const mts::TrialConfig& cfg, const mts::TrajectoryLog& log,
                 const std::string& dir, const std::string& tag) {
  fs::create_directories(dir);
  const mts::SceneModel scene = cfg.build_scene_model();
  const mts::CameraIntrinsics intr = cfg.intrinsics();
  for (const mts::ServoStep& step : log.steps) {
    const mts::Image img = mts::render(step.ee_pose, intr, scene);
    char name[64];
    std::snprintf(name, sizeof(name), "%s_%04d.ppm", tag.c_str(), step.index);
    mts::write_ppm(img, (fs::path(dir) / name).string());
  }
}

int run_trial_cmd(const std::string& config_path, const std::string& method,
                  const std::string& out_dir, bool frames) {
  const mts::TrialConfig cfg = mts::load_trial_config(config_path);
  std::vector<mts::Method> methods;
  if (method == "proposed" || method == "both") methods.push_back(mts::Method::Proposed);
  if (method == "naive" || method == "both") methods.push_back(mts::Method::Naive);
  if (methods.empty()) throw mts::ConfigError("method must be proposed, naive or both");

  if (!out_dir.empty()) fs::create_directories(out_dir);
  for (mts::Method m : methods) {
    const mts::TrajectoryLog log = mts::run_trial(cfg, m);
    std::cout << mts::method_name(m) << ": termination="
              << mts::termination_name(log.termination) << " steps=" << log.steps.size()
              << " A_start=" << log.a_start << " A_end=" << log.a_end
              << " dA=" << 100.0 * (log.a_end - log.a_start)
              << " points, f_N=" << log.f_n << "\n";
    if (!out_dir.empty()) {
      const fs::path csv = fs::path(out_dir) / ("trial_" + mts::method_name(m) + ".csv");
      std::ofstream out(csv);
      log.write_csv(out);
      std::cout << "  wrote " << csv.string() << "\n";
      if (frames) dump_frames(cfg, log, (fs::path(out_dir) / "frames").string(),
                              mts::method_name(m));
    } else if (frames) {
      dump_frames(cfg, log, "frames", mts::method_name(m));
    }
  }
  return 0;
}

int sweep_cmd(const std::string& config_path, const std::string& out_dir, int jobs) {
  const mts::SweepConfig spec = mts::load_sweep_config(config_path);
  const std::vector<mts::TrialDescriptor> descriptors = mts::expand_sweep(spec);
  std::cout << "expanded " << descriptors.size() << " trials ("
            << descriptors.size() * 2 << " runs with both methods)\n";
  mts::SweepOptions options;
  options.jobs = jobs;
  options.out_dir = out_dir;
  const std::vector<mts::TrialResult> results =
      mts::run_sweep(spec, descriptors, options);
  fs::create_directories(out_dir);
  std::ofstream summary(fs::path(out_dir) / "summary.csv");
  mts::write_summary_csv(results, summary);
  std::cout << "wrote " << (fs::path(out_dir) / "summary.csv").string() << "\n";
  return 0;
}

int compare_cmd(const std::string& results_dir, const std::string& group_by) {
  std::ifstream in(fs::path(results_dir) / "summary.csv");
  if (!in)
    throw mts::ConfigError("no summary.csv under " + results_dir +
                           " (run the sweep subcommand first)");
  const std::vector<mts::TrialResult> results = mts::read_summary_csv(in);
  const std::vector<mts::AggregateRow> rows = mts::aggregate(results, group_by);
  if (rows.empty()) {
    std::cerr << "warning: no completed trials to aggregate\n";
    return 1;
  }
  mts::print_aggregate(rows, std::cout);
  const fs::path out = fs::path(results_dir) / ("aggregate_" + group_by + ".csv");
  std::ofstream csv(out);
  mts::write_aggregate_csv(rows, csv);
  std::cout << "wrote " << out.string() << "\n";
  return 0;
}

int plot_cmd(const std::vector<std::string>& logs, const std::string& out_path,
             const std::string& config_path) {
  std::vector<mts::PlottableTrajectory> trajectories;
  for (const std::string& path : logs)
    trajectories.push_back(mts::read_trajectory_csv(path));
  std::optional<mts::SceneModel> scene;
  if (!config_path.empty())
    scene = mts::load_trial_config(config_path).build_scene_model();
  std::ofstream out(out_path);
  if (!out) throw mts::ConfigError("cannot write " + out_path);
  out << (trajectories.size() == 1 ? mts::trajectory_svg(trajectories.front(), scene)
                                   : mts::overlay_svg(trajectories, scene));
  std::cout << "wrote " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-perspective next-best-view servoing simulator"};
  app.require_subcommand(1);

  std::string config_path, method = "both", out_dir, results_dir, group_by = "theta";
  std::string out_path = "plot.svg";
  std::vector<std::string> logs;
  bool frames = false;
  int jobs = 1;

  CLI::App* trial = app.add_subcommand("run-trial", "run one proposed/naive trial");
  trial->add_option("--config", config_path, "trial config file")->required();
  trial->add_option("--method", method, "proposed|naive|both")
      ->check(CLI::IsMember({"proposed", "naive", "both"}));
  trial->add_option("--out", out_dir, "output directory for CSV logs");
  trial->add_flag("--dump-frames", frames, "write per-step PPM frames");

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter-grid sweep");
  sweep->add_option("--config", config_path, "sweep config file")->required();
  sweep->add_option("--out", out_dir, "output directory")->required();
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);

  CLI::App* compare = app.add_subcommand("compare", "aggregate sweep results");
  compare->add_option("--results", results_dir, "sweep output directory")->required();
  compare->add_option("--group-by", group_by,
                      "theta|radius|sigma|weights|target_y|target_z|occ_y|occ_z");

  CLI::App* plot = app.add_subcommand("plot", "render trajectory SVG plots");
  plot->add_option("--log", logs, "trajectory CSV (repeat to overlay)")->required();
  plot->add_option("--out", out_path, "output SVG path");
  plot->add_option("--scene-config", config_path,
                   "optional trial config for target/occluder footprints");

  CLI11_PARSE(app, argc, argv);

  try {
    if (trial->parsed()) return run_trial_cmd(config_path, method, out_dir, frames);
    if (sweep->parsed()) return sweep_cmd(config_path, out_dir, jobs);
    if (compare->parsed()) return compare_cmd(results_dir, group_by);
    if (plot->parsed()) return plot_cmd(logs, out_path, config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
