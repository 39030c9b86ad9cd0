#include "mts/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mts/errors.hpp"

namespace mts {

namespace {

struct Range {
  double lo{0.0}, hi{1.0};
  void include(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  static Range of(const std::vector<double>& vs, double pad) {
    Range r{vs.empty() ? 0.0 : vs.front(), vs.empty() ? 1.0 : vs.front()};
    for (double v : vs) r.include(v);
    if (r.hi - r.lo < 1e-9) {
      r.lo -= 0.5;
      r.hi += 0.5;
    }
    const double p = pad * (r.hi - r.lo);
    r.lo -= p;
    r.hi += p;
    return r;
  }
};

// Maps data coordinates into an SVG viewport rectangle (y flipped).
struct Axes {
  double x0, y0, w, h;
  Range rx, ry;
  double px(double x) const { return x0 + (x - rx.lo) / (rx.hi - rx.lo) * w; }
  double py(double y) const { return y0 + h - (y - ry.lo) / (ry.hi - ry.lo) * h; }
};

const char* kPalette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string polyline(const Axes& ax, const std::vector<double>& xs,
                     const std::vector<double>& ys, const std::string& color) {
  std::ostringstream svg;
  svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i)
    svg << ax.px(xs[i]) << ',' << ax.py(ys[i]) << ' ';
  svg << "\"/>\n";
  return svg.str();
}

std::string frame(const Axes& ax, const std::string& title, const std::string& xlabel,
                  const std::string& ylabel) {
  std::ostringstream svg;
  svg << "<rect x=\"" << ax.x0 << "\" y=\"" << ax.y0 << "\" width=\"" << ax.w
      << "\" height=\"" << ax.h << "\" fill=\"none\" stroke=\"#333\"/>\n";
  svg << "<text x=\"" << ax.x0 + ax.w / 2 << "\" y=\"" << ax.y0 - 8
      << "\" text-anchor=\"middle\" font-size=\"13\">" << title << "</text>\n";
  svg << "<text x=\"" << ax.x0 + ax.w / 2 << "\" y=\"" << ax.y0 + ax.h + 28
      << "\" text-anchor=\"middle\" font-size=\"11\">" << xlabel << "</text>\n";
  svg << "<text x=\"" << ax.x0 - 32 << "\" y=\"" << ax.y0 + ax.h / 2
      << "\" text-anchor=\"middle\" font-size=\"11\" transform=\"rotate(-90 "
      << ax.x0 - 32 << ' ' << ax.y0 + ax.h / 2 << ")\">" << ylabel << "</text>\n";
  return svg.str();
}

std::string marker(const Axes& ax, double x, double y, const std::string& color,
                   double r) {
  std::ostringstream svg;
  svg << "<circle cx=\"" << ax.px(x) << "\" cy=\"" << ax.py(y) << "\" r=\"" << r
      << "\" fill=\"" << color << "\"/>\n";
  return svg.str();
}

// Path projection panel onto two of the world axes (0=x, 1=y, 2=z).
std::string path_panel(const Axes& ax, const std::vector<PlottableTrajectory>& trajs,
                       const std::optional<SceneModel>& scene, int ax_a, int ax_b,
                       const std::string& title) {
  static const char* names[] = {"x [m]", "y [m]", "z [m]"};
  std::ostringstream svg;
  svg << frame(ax, title, names[ax_a], names[ax_b]);
  if (scene) {
    svg << "<circle cx=\"" << ax.px(scene->target.center(ax_a)) << "\" cy=\""
        << ax.py(scene->target.center(ax_b)) << "\" r=\""
        << ax.w * scene->target.radius / (ax.rx.hi - ax.rx.lo)
        << "\" fill=\"#d6272833\" stroke=\"#d62728\"/>\n";
    for (const Occluder& occ : scene->occluders)
      svg << "<circle cx=\"" << ax.px(occ.center(ax_a)) << "\" cy=\""
          << ax.py(occ.center(ax_b)) << "\" r=\""
          << ax.w * occ.half_extent / (ax.rx.hi - ax.rx.lo)
          << "\" fill=\"#2ca02c33\" stroke=\"#2ca02c\"/>\n";
  }
  for (std::size_t t = 0; t < trajs.size(); ++t) {
    std::vector<double> xs, ys;
    for (const Vec3& p : trajs[t].positions) {
      xs.push_back(p(ax_a));
      ys.push_back(p(ax_b));
    }
    const std::string color = kPalette[t % std::size(kPalette)];
    svg << polyline(ax, xs, ys, color);
    if (!xs.empty()) {
      svg << marker(ax, xs.front(), ys.front(), "#000", 3.0);
      svg << marker(ax, xs.back(), ys.back(), color, 3.0);
    }
  }
  return svg.str();
}

Axes layout_axes(double x0, double y0, double w, double h,
                 const std::vector<PlottableTrajectory>& trajs,
                 const std::optional<SceneModel>& scene, int ax_a, int ax_b) {
  std::vector<double> xs, ys;
  for (const auto& t : trajs)
    for (const Vec3& p : t.positions) {
      xs.push_back(p(ax_a));
      ys.push_back(p(ax_b));
    }
  if (scene) {
    for (int s : {-1, 1}) {
      xs.push_back(scene->target.center(ax_a) + s * scene->target.radius);
      ys.push_back(scene->target.center(ax_b) + s * scene->target.radius);
      for (const Occluder& occ : scene->occluders) {
        xs.push_back(occ.center(ax_a) + s * occ.half_extent);
        ys.push_back(occ.center(ax_b) + s * occ.half_extent);
      }
    }
  }
  return Axes{x0, y0, w, h, Range::of(xs, 0.1), Range::of(ys, 0.1)};
}

}  // namespace

PlottableTrajectory read_trajectory_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trajectory CSV " + path);
  PlottableTrajectory traj;
  traj.label = std::filesystem::path(path).stem().string();
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto pos = line.find("theta_deg=");
      if (pos != std::string::npos)
        traj.theta_deg = std::stod(line.substr(pos + 10));
      continue;
    }
    if (line.rfind("k,", 0) == 0 || line.rfind("termination,", 0) == 0) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.size() < 15) continue;
    traj.positions.emplace_back(std::stod(cols[1]), std::stod(cols[2]),
                                std::stod(cols[3]));
    traj.f_ref.push_back(std::stod(cols[9]));
  }
  if (traj.positions.empty())
    throw ConfigError("trajectory CSV has no step rows: " + path);
  if (traj.theta_deg)
    traj.label = "theta=" + std::to_string(static_cast<int>(*traj.theta_deg));
  return traj;
}

std::string trajectory_svg(const PlottableTrajectory& traj,
                           const std::optional<SceneModel>& scene) {
  return overlay_svg({traj}, scene);
}

std::string overlay_svg(const std::vector<PlottableTrajectory>& trajectories,
                        const std::optional<SceneModel>& scene) {
  if (trajectories.empty()) throw ConfigError("nothing to plot");
  const double panel_w = 300, panel_h = 260, margin = 60, gap = 60;
  const double width = 3 * panel_w + 2 * gap + 2 * margin;
  const double height = panel_h + 2 * margin + 20 * trajectories.size();

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\" font-family=\"sans-serif\">\n";

  const Axes xy = layout_axes(margin, margin, panel_w, panel_h, trajectories, scene, 0, 1);
  const Axes xz = layout_axes(margin + panel_w + gap, margin, panel_w, panel_h,
                              trajectories, scene, 0, 2);
  svg << path_panel(xy, trajectories, scene, 0, 1, "end-effector path (x-y)");
  svg << path_panel(xz, trajectories, scene, 0, 2, "end-effector path (x-z)");

  // Objective vs step panel.
  std::vector<double> all_f, all_k;
  for (const auto& t : trajectories) {
    for (std::size_t i = 0; i < t.f_ref.size(); ++i) all_k.push_back(double(i));
    all_f.insert(all_f.end(), t.f_ref.begin(), t.f_ref.end());
  }
  Axes fk{margin + 2 * (panel_w + gap), margin, panel_w, panel_h,
          Range::of(all_k, 0.02), Range::of(all_f, 0.1)};
  svg << frame(fk, "objective vs step", "step k", "f");
  for (std::size_t t = 0; t < trajectories.size(); ++t) {
    std::vector<double> ks(trajectories[t].f_ref.size());
    for (std::size_t i = 0; i < ks.size(); ++i) ks[i] = double(i);
    svg << polyline(fk, ks, trajectories[t].f_ref, kPalette[t % std::size(kPalette)]);
  }

  // Legend.
  for (std::size_t t = 0; t < trajectories.size(); ++t) {
    const double y = margin + panel_h + 40 + 18 * t;
    svg << "<rect x=\"" << margin << "\" y=\"" << y - 9
        << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[t % std::size(kPalette)]
        << "\"/>\n";
    svg << "<text x=\"" << margin + 18 << "\" y=\"" << y + 2 << "\" font-size=\"11\">"
        << trajectories[t].label << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace mts
