#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "refplan/core/types.hpp"
#include "refplan/envs/scenario.hpp"

namespace refplan::bench {

namespace detail {

inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline void svg_rect(std::string& out, const sbmp::AaBox& box, const std::string& style) {
  out += "<rect x=\"" + fmt(box.lo[0]) + "\" y=\"" + fmt(box.lo[1]) + "\" width=\"" +
         fmt(box.hi[0] - box.lo[0]) + "\" height=\"" + fmt(box.hi[1] - box.lo[1]) + "\" " + style +
         "/>\n";
}

inline void svg_polyline(std::string& out, const std::vector<State>& traj, std::size_t offset,
                         const std::string& style) {
  out += "<polyline points=\"";
  for (const auto& s : traj) {
    if (s.values.size() < offset + 2) continue;
    out += fmt(s.values[offset]) + "," + fmt(s.values[offset + 1]) + " ";
  }
  out += "\" " + style + "/>\n";
}

}  // namespace detail

// Renders the x/y projection of a trajectory over the scenario map. Joint
// multi-agent states (a multiple of three values wide) are split into one
// polyline per agent, the last one being the target.
inline std::string render_trajectory(const envs::Scenario& scenario,
                                     const std::vector<State>& trajectory) {
  for (const auto& s : trajectory) {
    if (s.values.size() < 2 || s.values.size() != trajectory.front().values.size())
      throw std::invalid_argument("render_trajectory: trace dimension mismatch");
  }
  const auto& b = scenario.workspace.bounds;
  const double w = b.hi[0] - b.lo[0];
  const double h = b.hi[1] - b.lo[1];
  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"" +
         detail::fmt(640.0 * h / (w > 0 ? w : 1.0)) + "\" viewBox=\"" + detail::fmt(b.lo[0]) +
         " " + detail::fmt(b.lo[1]) + " " + detail::fmt(w) + " " + detail::fmt(h) + "\">\n";
  // Flip the y axis so larger y renders upward.
  out += "<g transform=\"translate(0," + detail::fmt(b.hi[1] + b.lo[1]) + ") scale(1,-1)\">\n";
  out += "<rect x=\"" + detail::fmt(b.lo[0]) + "\" y=\"" + detail::fmt(b.lo[1]) + "\" width=\"" +
         detail::fmt(w) + "\" height=\"" + detail::fmt(h) + "\" fill=\"#fafafa\" stroke=\"#333\" stroke-width=\"0.2\"/>\n";

  for (const auto& box : scenario.workspace.boxes)
    detail::svg_rect(out, box, "fill=\"#9a9a9a\"");
  for (const auto& sph : scenario.workspace.spheres)
    out += "<circle cx=\"" + detail::fmt(sph.center[0]) + "\" cy=\"" + detail::fmt(sph.center[1]) +
           "\" r=\"" + detail::fmt(sph.radius) + "\" fill=\"#9a9a9a\"/>\n";
  for (const auto& lm : scenario.landmarks)
    detail::svg_rect(out, lm.box, "fill=\"#9b59b6\" fill-opacity=\"0.35\"");
  for (const auto& d : scenario.dangers)
    detail::svg_rect(out, d.box, "fill=\"#d64541\" fill-opacity=\"0.5\"");
  for (const auto& g : scenario.goals)
    detail::svg_rect(out, g.box, "fill=\"#2ecc71\" fill-opacity=\"0.55\"");
  for (const auto& sp : scenario.spawns)
    out += "<circle cx=\"" + detail::fmt(sp[0]) + "\" cy=\"" + detail::fmt(sp[1]) +
           "\" r=\"0.5\" fill=\"#e67e22\"/>\n";

  if (!trajectory.empty()) {
    const std::size_t dim = trajectory.front().values.size();
    if (dim >= 6 && dim % 3 == 0) {
      const std::size_t agents = dim / 3;
      for (std::size_t i = 0; i + 1 < agents; ++i)
        detail::svg_polyline(out, trajectory, 3 * i,
                             "fill=\"none\" stroke=\"#2980b9\" stroke-width=\"0.12\" stroke-opacity=\"0.8\"");
      detail::svg_polyline(out, trajectory, 3 * (agents - 1),
                           "fill=\"none\" stroke=\"#c0392b\" stroke-width=\"0.18\"");
    } else {
      detail::svg_polyline(out, trajectory, 0,
                           "fill=\"none\" stroke=\"#2980b9\" stroke-width=\"0.18\"");
    }
    const auto& last = trajectory.back();
    if (last.values.size() >= 2)
      out += "<circle cx=\"" + detail::fmt(last.values[0]) + "\" cy=\"" +
             detail::fmt(last.values[1]) + "\" r=\"0.35\" fill=\"#2c3e50\"/>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

inline void write_trajectory_svg(const envs::Scenario& scenario,
                                 const std::vector<State>& trajectory, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << render_trajectory(scenario, trajectory);
}

}  // namespace refplan::bench
