#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mts/config.hpp"
#include "mts/servo.hpp"

namespace mts {

struct TrialDescriptor {
  int index{0};      // linear index across the expanded grid (replicates included)
  int cell{0};       // grid cell before replication
  int replicate{0};
  double target_y{0.0};
  double target_z{0.0};
  double occ_y{0.0};
  double occ_z{0.0};
  double theta_deg{0.0};
  double w1{1.0};
  double w2{0.0};
  double radius{0.0};  // effective corner radius of the camera array
  double sigma{0.0};
  std::uint64_t seed{0};
};

enum class Method { Proposed, Naive };
std::string method_name(Method m);

struct TrialResult {
  TrialDescriptor desc;
  Method method{Method::Proposed};
  double f_n{0.0};
  double a_start{0.0};
  double a_end{0.0};
  double delta_a{0.0};  // percentage points, 100*(A_end - A_start)
  int steps{0};
  Termination termination{Termination::MaxSteps};
  double wall_time_s{0.0};
};

/// Full Cartesian product of the sweep lists; each descriptor carries a
/// deterministic seed derived from the base seed and its linear index.
std::vector<TrialDescriptor> expand_sweep(const SweepConfig& spec);

/// Per-cell overrides applied to the base trial configuration.
TrialConfig apply_descriptor(const TrialConfig& base, const TrialDescriptor& desc);

TrajectoryLog run_trial(const TrialConfig& config, Method method);

struct SweepOptions {
  int jobs{1};
  std::string out_dir;  // empty: no per-trial CSV files
  bool run_proposed{true};
  bool run_naive{true};
};

/// Runs every descriptor with both methods; individual failures are recorded
/// in the results, never abort the sweep. Result order is independent of jobs.
std::vector<TrialResult> run_sweep(const SweepConfig& spec,
                                   const std::vector<TrialDescriptor>& descriptors,
                                   const SweepOptions& options);

void write_summary_csv(const std::vector<TrialResult>& results, std::ostream& out);
std::vector<TrialResult> read_summary_csv(std::istream& in);

struct AggregateRow {
  std::string group_by;
  std::string group_value;
  Method method{Method::Proposed};
  int count{0};   // completed (non-ik_failed) trials
  int failed{0};  // ik_failed trials
  double mean_f_n{0.0};
  double mean_delta_a{0.0};
  double std_f_n{0.0};
  double std_delta_a{0.0};
};

/// Mean f_N / mean dA per (group value, method); means over completed trials
/// only. group_by: theta, radius, sigma, weights, target_y/z, occ_y/z.
std::vector<AggregateRow> aggregate(const std::vector<TrialResult>& results,
                                    const std::string& group_by);

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
void print_aggregate(const std::vector<AggregateRow>& rows, std::ostream& out);

}  // namespace mts
