#include "mts/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "mts/errors.hpp"
#include "mts/format.hpp"
#include "mts/rng.hpp"

namespace mts {

namespace fs = std::filesystem;

std::string method_name(Method m) {
  return m == Method::Proposed ? "proposed" : "naive";
}

std::vector<TrialDescriptor> expand_sweep(const SweepConfig& spec) {
  const SweepLists& l = spec.lists;
  std::vector<std::pair<double, double>> weights = l.weights;
  if (weights.empty()) weights.push_back({spec.base.servo.w1, spec.base.servo.w2});
  std::vector<double> radii = l.radius;
  if (radii.empty()) radii.push_back(spec.base.array.effective_radius());
  std::vector<double> sigmas = l.sigma;
  if (sigmas.empty()) sigmas.push_back(spec.base.servo.sigma);

  std::vector<TrialDescriptor> out;
  int cell = 0;
  int index = 0;
  for (double ty : l.target_y)
    for (double tz : l.target_z)
      for (double oy : l.occ_y)
        for (double oz : l.occ_z)
          for (double th : l.theta_deg)
            for (const auto& w : weights)
              for (double r : radii)
                for (double s : sigmas) {
                  for (int rep = 0; rep < l.trials_per_cell; ++rep) {
                    TrialDescriptor d;
                    d.index = index;
                    d.cell = cell;
                    d.replicate = rep;
                    d.target_y = ty;
                    d.target_z = tz;
                    d.occ_y = oy;
                    d.occ_z = oz;
                    d.theta_deg = th;
                    d.w1 = w.first;
                    d.w2 = w.second;
                    d.radius = r;
                    d.sigma = s;
                    d.seed = derive_seed(spec.base.servo.rng_seed,
                                         static_cast<std::uint64_t>(index));
                    out.push_back(d);
                    ++index;
                  }
                  ++cell;
                }
  if (out.empty()) throw ConfigError("sweep expansion produced no trials");
  return out;
}

TrialConfig apply_descriptor(const TrialConfig& base, const TrialDescriptor& desc) {
  TrialConfig cfg = base;
  cfg.target_offset = {desc.target_y, desc.target_z};
  cfg.occluder_offset = {desc.occ_y, desc.occ_z};
  cfg.occlusion_angle_deg = desc.theta_deg;
  cfg.servo.w1 = desc.w1;
  cfg.servo.w2 = desc.w2;
  cfg.servo.sigma = desc.sigma;
  cfg.servo.rng_seed = desc.seed;
  cfg.array.radius = desc.radius;
  return cfg;
}

TrajectoryLog run_trial(const TrialConfig& config, Method method) {
  const SceneModel scene = config.build_scene_model();
  const TrialSetup setup = config.setup();
  if (method == Method::Proposed) {
    const CameraArray array = config.array.build(config.intrinsics());
    return run_3dmts(scene, config.arm, array, config.segmentation, config.servo,
                     setup);
  }
  return run_baseline(scene, config.arm, config.intrinsics(), config.segmentation,
                      config.servo, setup);
}

namespace {

TrialResult summarize(const TrialDescriptor& desc, Method method,
                      const TrajectoryLog& log, double wall_time_s) {
  TrialResult res;
  res.desc = desc;
  res.method = method;
  res.f_n = log.f_n;
  res.a_start = log.a_start;
  res.a_end = log.a_end;
  res.delta_a = 100.0 * (log.a_end - log.a_start);
  res.steps = static_cast<int>(log.steps.size());
  res.termination = log.termination;
  res.wall_time_s = wall_time_s;
  return res;
}

std::string trial_csv_name(const TrialDescriptor& desc, Method method) {
  std::ostringstream name;
  name << "trial_" << std::setw(4) << std::setfill('0') << desc.index << "_"
       << method_name(method) << ".csv";
  return name.str();
}

void write_trial_csv(const fs::path& dir, const TrialDescriptor& desc, Method method,
                     const TrajectoryLog& log) {
  std::ofstream out(dir / trial_csv_name(desc, method));
  if (!out) throw ConfigError("cannot write trial CSV in " + dir.string());
  out << "# index=" << desc.index << " method=" << method_name(method)
      << " target_y=" << fmt_g17(desc.target_y) << " target_z=" << fmt_g17(desc.target_z)
      << " occ_y=" << fmt_g17(desc.occ_y) << " occ_z=" << fmt_g17(desc.occ_z)
      << " theta_deg=" << fmt_g17(desc.theta_deg) << " w1=" << fmt_g17(desc.w1)
      << " w2=" << fmt_g17(desc.w2) << " radius=" << fmt_g17(desc.radius)
      << " sigma=" << fmt_g17(desc.sigma) << " seed=" << desc.seed << "\n";
  log.write_csv(out);
}

}  // namespace

std::vector<TrialResult> run_sweep(const SweepConfig& spec,
                                   const std::vector<TrialDescriptor>& descriptors,
                                   const SweepOptions& options) {
  std::vector<Method> methods;
  if (options.run_proposed) methods.push_back(Method::Proposed);
  if (options.run_naive) methods.push_back(Method::Naive);
  if (methods.empty()) throw ConfigError("no method selected for the sweep");

  if (!options.out_dir.empty()) fs::create_directories(options.out_dir);

  struct Job {
    const TrialDescriptor* desc;
    Method method;
  };
  std::vector<Job> jobs;
  jobs.reserve(descriptors.size() * methods.size());
  for (const TrialDescriptor& d : descriptors)
    for (Method m : methods) jobs.push_back({&d, m});

  std::vector<TrialResult> results(jobs.size());
  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, options.jobs);

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      const TrialConfig cfg = apply_descriptor(spec.base, *job.desc);
      const auto t0 = std::chrono::steady_clock::now();
      const TrajectoryLog log = run_trial(cfg, job.method);
      const double dt =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      results[i] = summarize(*job.desc, job.method, log, dt);
      if (!options.out_dir.empty())
        write_trial_csv(options.out_dir, *job.desc, job.method, log);
    }
  };

  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  return results;
}

void write_summary_csv(const std::vector<TrialResult>& results, std::ostream& out) {
  out << "index,cell,replicate,method,target_y,target_z,occ_y,occ_z,theta_deg,w1,w2,"
         "radius,sigma,seed,f_N,A_start,A_end,delta_A,steps,termination,wall_time_s\n";
  for (const TrialResult& r : results) {
    const TrialDescriptor& d = r.desc;
    out << d.index << ',' << d.cell << ',' << d.replicate << ','
        << method_name(r.method) << ',' << fmt_g17(d.target_y) << ','
        << fmt_g17(d.target_z) << ',' << fmt_g17(d.occ_y) << ',' << fmt_g17(d.occ_z)
        << ',' << fmt_g17(d.theta_deg) << ',' << fmt_g17(d.w1) << ',' << fmt_g17(d.w2)
        << ',' << fmt_g17(d.radius) << ',' << fmt_g17(d.sigma) << ',' << d.seed << ','
        << fmt_g17(r.f_n) << ',' << fmt_g17(r.a_start) << ',' << fmt_g17(r.a_end)
        << ',' << fmt_g17(r.delta_a) << ',' << r.steps << ','
        << termination_name(r.termination) << ',' << fmt_g17(r.wall_time_s) << '\n';
  }
}

std::vector<TrialResult> read_summary_csv(std::istream& in) {
  std::vector<TrialResult> results;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() != 21) throw ConfigError("malformed summary row: " + line);
    TrialResult r;
    TrialDescriptor& d = r.desc;
    d.index = std::stoi(cols[0]);
    d.cell = std::stoi(cols[1]);
    d.replicate = std::stoi(cols[2]);
    r.method = cols[3] == "proposed" ? Method::Proposed : Method::Naive;
    d.target_y = std::stod(cols[4]);
    d.target_z = std::stod(cols[5]);
    d.occ_y = std::stod(cols[6]);
    d.occ_z = std::stod(cols[7]);
    d.theta_deg = std::stod(cols[8]);
    d.w1 = std::stod(cols[9]);
    d.w2 = std::stod(cols[10]);
    d.radius = std::stod(cols[11]);
    d.sigma = std::stod(cols[12]);
    d.seed = std::stoull(cols[13]);
    r.f_n = std::stod(cols[14]);
    r.a_start = std::stod(cols[15]);
    r.a_end = std::stod(cols[16]);
    r.delta_a = std::stod(cols[17]);
    r.steps = std::stoi(cols[18]);
    const auto term = termination_from_name(cols[19]);
    if (!term) throw ConfigError("unknown termination in summary: " + cols[19]);
    r.termination = *term;
    r.wall_time_s = std::stod(cols[20]);
    results.push_back(r);
  }
  return results;
}

namespace {

std::string group_value_of(const TrialResult& r, const std::string& key) {
  auto fmt = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  if (key == "theta" || key == "theta_deg") return fmt(r.desc.theta_deg);
  if (key == "radius" || key == "r") return fmt(r.desc.radius);
  if (key == "sigma") return fmt(r.desc.sigma);
  if (key == "weights" || key == "w")
    return "(" + fmt(r.desc.w1) + "," + fmt(r.desc.w2) + ")";
  if (key == "target_y") return fmt(r.desc.target_y);
  if (key == "target_z") return fmt(r.desc.target_z);
  if (key == "occ_y") return fmt(r.desc.occ_y);
  if (key == "occ_z") return fmt(r.desc.occ_z);
  throw ConfigError("unknown group-by parameter: " + key);
}

}  // namespace

std::vector<AggregateRow> aggregate(const std::vector<TrialResult>& results,
                                    const std::string& group_by) {
  if (results.empty()) throw ConfigError("no results to aggregate");
  // key -> method -> values
  std::map<std::string, std::map<int, std::vector<const TrialResult*>>> groups;
  for (const TrialResult& r : results)
    groups[group_value_of(r, group_by)][static_cast<int>(r.method)].push_back(&r);

  std::vector<AggregateRow> rows;
  for (const auto& [value, by_method] : groups) {
    for (const auto& [method, trials] : by_method) {
      AggregateRow row;
      row.group_by = group_by;
      row.group_value = value;
      row.method = static_cast<Method>(method);
      std::vector<double> fs, das;
      for (const TrialResult* t : trials) {
        if (t->termination == Termination::IkFailed) {
          ++row.failed;
          continue;
        }
        fs.push_back(t->f_n);
        das.push_back(t->delta_a);
      }
      row.count = static_cast<int>(fs.size());
      if (row.count == 0) continue;  // omitted with warning by the caller
      auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return s / static_cast<double>(v.size());
      };
      auto sample_std = [&](const std::vector<double>& v, double mu) {
        if (v.size() < 2) return 0.0;
        double s = 0.0;
        for (double x : v) s += (x - mu) * (x - mu);
        return std::sqrt(s / static_cast<double>(v.size() - 1));
      };
      row.mean_f_n = mean(fs);
      row.mean_delta_a = mean(das);
      row.std_f_n = sample_std(fs, row.mean_f_n);
      row.std_delta_a = sample_std(das, row.mean_delta_a);
      rows.push_back(row);
    }
  }
  return rows;
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
  // delta_A is reported in absolute percentage points: 100*(A_end - A_start).
  out << "group_by,group_value,method,count,ik_failed,mean_f_N,mean_delta_A_points,"
         "std_f_N,std_delta_A_points\n";
  for (const AggregateRow& r : rows)
    out << r.group_by << ',' << r.group_value << ',' << method_name(r.method) << ','
        << r.count << ',' << r.failed << ',' << fmt_g17(r.mean_f_n) << ','
        << fmt_g17(r.mean_delta_a) << ',' << fmt_g17(r.std_f_n) << ','
        << fmt_g17(r.std_delta_a) << '\n';
}

void print_aggregate(const std::vector<AggregateRow>& rows, std::ostream& out) {
  out << std::left << std::setw(12) << "group" << std::setw(12) << "value"
      << std::setw(10) << "method" << std::right << std::setw(7) << "n" << std::setw(9)
      << "failed" << std::setw(12) << "mean f_N" << std::setw(14) << "dA [points]"
      << std::setw(12) << "std dA" << '\n';
  for (const AggregateRow& r : rows) {
    out << std::left << std::setw(12) << r.group_by << std::setw(12) << r.group_value
        << std::setw(10) << method_name(r.method) << std::right << std::setw(7)
        << r.count << std::setw(9) << r.failed << std::setw(12) << std::fixed
        << std::setprecision(4) << r.mean_f_n << std::setw(14) << std::setprecision(2)
        << r.mean_delta_a << std::setw(12) << r.std_delta_a << '\n';
    out.unsetf(std::ios::fixed);
  }
}

}  // namespace mts
