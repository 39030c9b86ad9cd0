#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "mts/config.hpp"
#include "mts/errors.hpp"
#include "mts/harness.hpp"
#include "mts/plots.hpp"

using namespace mts;

namespace {

SweepConfig tiny_sweep() {
  SweepConfig spec;
  spec.base = load_trial_config(std::string(MTS_CONFIG_DIR) + "/trial_default.cfg");
  spec.base.resolution = 32;
  spec.base.servo.max_steps = 12;
  spec.lists.occ_y = {0.0, 0.1};
  spec.lists.occ_z = {0.0};
  spec.lists.theta_deg = {0.0, 45.0};
  return spec;
}

}  // namespace

TEST_CASE("expand_sweep cartesian product") {
  SweepConfig spec = tiny_sweep();

  SUBCASE("table-style position/theta grid") {
    spec.lists.target_y = {-0.1, 0.0, 0.1};
    spec.lists.target_z = {-0.1, 0.0, 0.1};
    spec.lists.occ_y = {-0.1, 0.0, 0.1};
    spec.lists.occ_z = {-0.1, 0.0, 0.1};
    spec.lists.theta_deg = {-45.0, 0.0, 45.0};
    CHECK(expand_sweep(spec).size() == 243);
  }
  SUBCASE("single cell") {
    spec.lists.occ_y = {0.0};
    spec.lists.theta_deg = {0.0};
    CHECK(expand_sweep(spec).size() == 1);
  }
  SUBCASE("replication doubles the count with distinct seeds") {
    spec.lists.trials_per_cell = 2;
    const auto descs = expand_sweep(spec);
    CHECK(descs.size() == 8);
    for (std::size_t i = 0; i + 1 < descs.size(); i += 2) {
      CHECK(descs[i].cell == descs[i + 1].cell);
      CHECK(descs[i].seed != descs[i + 1].seed);
    }
  }
  SUBCASE("full product over weights, radius and sigma") {
    spec.lists.weights = {{1.0, 0.0}, {0.8, 0.2}};
    spec.lists.radius = {0.06, 0.09, 0.12};
    spec.lists.sigma = {0.001, 0.01};
    CHECK(expand_sweep(spec).size() == 2 * 2 * 2 * 3 * 2);
  }
}

TEST_CASE("run_sweep is order independent of parallelism") {
  SweepConfig spec = tiny_sweep();
  const auto descs = expand_sweep(spec);
  SweepOptions serial;
  serial.jobs = 1;
  SweepOptions parallel;
  parallel.jobs = 8;
  const auto a = run_sweep(spec, descs, serial);
  const auto b = run_sweep(spec, descs, parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].desc.index == b[i].desc.index);
    CHECK(a[i].method == b[i].method);
    CHECK(a[i].f_n == b[i].f_n);
    CHECK(a[i].delta_a == b[i].delta_a);
    CHECK(a[i].steps == b[i].steps);
    CHECK(a[i].termination == b[i].termination);
  }
}

TEST_CASE("summary csv round trip and determinism") {
  SweepConfig spec = tiny_sweep();
  const auto descs = expand_sweep(spec);
  const auto results = run_sweep(spec, descs, SweepOptions{4, "", true, true});

  std::ostringstream a, b;
  write_summary_csv(results, a);
  write_summary_csv(results, b);
  CHECK(a.str() == b.str());

  std::istringstream in(a.str());
  const auto parsed = read_summary_csv(in);
  REQUIRE(parsed.size() == results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    CHECK(parsed[i].desc.index == results[i].desc.index);
    CHECK(parsed[i].f_n == results[i].f_n);
    CHECK(parsed[i].delta_a == results[i].delta_a);
    CHECK(parsed[i].termination == results[i].termination);
  }
}

TEST_CASE("aggregate matches a one-pass oracle") {
  SweepConfig spec = tiny_sweep();
  const auto descs = expand_sweep(spec);
  const auto results = run_sweep(spec, descs, SweepOptions{4, "", true, true});
  const auto rows = aggregate(results, "theta");
  CHECK(rows.size() == 4);  // 2 theta values x 2 methods

  for (const AggregateRow& row : rows) {
    double sum = 0.0, sum_f = 0.0;
    int n = 0;
    for (const TrialResult& r : results) {
      if (r.method != row.method) continue;
      if (r.termination == Termination::IkFailed) continue;
      std::ostringstream v;
      v << r.desc.theta_deg;
      if (v.str() != row.group_value) continue;
      sum += r.delta_a;
      sum_f += r.f_n;
      ++n;
    }
    REQUIRE(n == row.count);
    CHECK(row.mean_delta_a == doctest::Approx(sum / n).epsilon(1e-12));
    CHECK(row.mean_f_n == doctest::Approx(sum_f / n).epsilon(1e-12));
  }

  SUBCASE("single result aggregates to itself") {
    const std::vector<TrialResult> one = {results.front()};
    const auto r = aggregate(one, "radius");
    REQUIRE(r.size() == 1);
    CHECK(r[0].mean_delta_a == one[0].delta_a);
    CHECK(r[0].count == 1);
  }
  SUBCASE("ik failures are excluded from means but counted") {
    std::vector<TrialResult> mixed = {results[0], results[0]};
    mixed[1].termination = Termination::IkFailed;
    mixed[1].delta_a = -999.0;
    const auto r = aggregate(mixed, "sigma");
    REQUIRE(r.size() == 1);
    CHECK(r[0].count == 1);
    CHECK(r[0].failed == 1);
    CHECK(r[0].mean_delta_a == results[0].delta_a);
  }
  SUBCASE("unknown group key is rejected") {
    CHECK_THROWS_AS(aggregate(results, "bogus"), ConfigError);
  }
}

TEST_CASE("apply_descriptor wires the cell parameters through") {
  SweepConfig spec = tiny_sweep();
  spec.lists.weights = {{0.8, 0.2}};
  spec.lists.radius = {0.09};
  spec.lists.sigma = {0.01};
  const auto descs = expand_sweep(spec);
  const TrialConfig cfg = apply_descriptor(spec.base, descs.back());
  CHECK(cfg.occluder_offset.first == descs.back().occ_y);
  CHECK(cfg.occlusion_angle_deg == descs.back().theta_deg);
  CHECK(cfg.servo.w1 == 0.8);
  CHECK(cfg.servo.w2 == 0.2);
  CHECK(cfg.servo.sigma == 0.01);
  CHECK(cfg.array.radius.has_value());
  CHECK(*cfg.array.radius == 0.09);
  CHECK(cfg.servo.rng_seed == descs.back().seed);
}

TEST_CASE("config loading") {
  SUBCASE("sweep config reproduces the table grid") {
    const SweepConfig spec =
        load_sweep_config(std::string(MTS_CONFIG_DIR) + "/table1_sim.cfg");
    CHECK(spec.lists.target_y.size() == 3);
    CHECK(spec.lists.occ_z.size() == 3);
    CHECK(spec.lists.theta_deg.size() == 3);
    CHECK(spec.lists.weights.size() == 2);
    CHECK(spec.lists.radius.size() == 3);
    CHECK(spec.lists.sigma.size() == 2);
    CHECK(expand_sweep(spec).size() == 2916);
    CHECK(spec.base.arm.dof() == 7);
    CHECK(spec.base.servo.p_max == 0.4);
  }
  SUBCASE("missing file fails cleanly") {
    CHECK_THROWS_AS(load_trial_config("/nonexistent.cfg"), ConfigError);
  }
  SUBCASE("scene color separability is enforced") {
    TrialConfig cfg =
        load_trial_config(std::string(MTS_CONFIG_DIR) + "/trial_default.cfg");
    cfg.scene.occluder_color = cfg.scene.target_color;
    CHECK_THROWS_AS(cfg.build_scene_model(), ConfigError);
  }
}

TEST_CASE("plots produce structured svg") {
  SweepConfig spec = tiny_sweep();
  spec.lists.occ_y = {0.1};
  spec.lists.theta_deg = {0.0};
  const auto descs = expand_sweep(spec);
  const auto dir = std::string("plot_test_out");
  run_sweep(spec, descs, SweepOptions{1, dir, true, true});

  const PlottableTrajectory traj =
      read_trajectory_csv(dir + "/trial_0000_proposed.csv");
  CHECK(traj.positions.size() > 1);
  CHECK(traj.theta_deg.has_value());

  const std::string svg = trajectory_svg(traj, spec.base.build_scene_model());
  CHECK(svg.find("<svg") == 0);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("objective vs step") != std::string::npos);

  const PlottableTrajectory naive =
      read_trajectory_csv(dir + "/trial_0000_naive.csv");
  const std::string overlay = overlay_svg({traj, naive}, std::nullopt);
  CHECK(std::count(overlay.begin(), overlay.end(), '\n') >
        std::count(svg.begin(), svg.end(), '\n') / 2);
}
