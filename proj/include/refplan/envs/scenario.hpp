#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "refplan/core/env.hpp"
#include "refplan/sbmp/geometry.hpp"

namespace refplan::envs {

// Axis-aligned named region (landmark, danger zone, goal, spawn area).
struct Region {
  sbmp::AaBox box;

  bool contains(const Config& q) const { return box.contains(q); }
  Config center() const { return box.center(); }
};

// Declarative world description shared by every environment: geometry,
// special regions, reward schedule, motion scale and noise parameters.
struct Scenario {
  std::string name;
  sbmp::Workspace workspace;
  std::vector<Region> landmarks;
  std::vector<Region> dangers;
  std::vector<Region> goals;
  std::vector<Config> spawns;
  RewardSchedule rewards;
  double step_size = 1.0;
  std::map<std::string, double> noise;  // named per-environment parameters
  std::uint64_t generator_seed = 0;     // provenance for generated worlds

  double noise_param(const std::string& key, double fallback) const {
    const auto it = noise.find(key);
    return it == noise.end() ? fallback : it->second;
  }

  bool in_any(const std::vector<Region>& regions, const Config& q) const {
    for (const auto& r : regions)
      if (r.contains(q)) return true;
    return false;
  }
};

// Representative points inside a region: the center plus each corner pulled
// inward by `inset` (clamped so the points stay interior). Subgoal sampling
// uses the spread so a localized belief still yields several distinct motion
// plans toward the same region rather than one fixed query.
inline std::vector<Config> region_spread(const Region& r, double inset) {
  const Config c = r.box.center();
  std::vector<Config> pts{c};
  const int corners = 1 << r.box.lo.dim;
  for (int mask = 0; mask < corners; ++mask) {
    Config p = c;
    bool distinct = false;
    for (int d = 0; d < r.box.lo.dim; ++d) {
      const double off = std::max(0.0, 0.5 * (r.box.hi[d] - r.box.lo[d]) - inset);
      if (off <= 0.0) continue;
      p[d] = c[d] + (((mask >> d) & 1) != 0 ? off : -off);
      distinct = true;
    }
    if (distinct) pts.push_back(p);
  }
  return pts;
}

inline nlohmann::json region_to_json(const Region& r) {
  return {{"lo", sbmp::config_to_json(r.box.lo)}, {"hi", sbmp::config_to_json(r.box.hi)}};
}

inline Region region_from_json(const nlohmann::json& j) {
  return Region{{sbmp::config_from_json(j.at("lo")), sbmp::config_from_json(j.at("hi"))}};
}

inline nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["workspace"] = sbmp::workspace_to_json(s.workspace);
  auto regions = [](const std::vector<Region>& rs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& r : rs) arr.push_back(region_to_json(r));
    return arr;
  };
  j["landmarks"] = regions(s.landmarks);
  j["dangers"] = regions(s.dangers);
  j["goals"] = regions(s.goals);
  j["spawns"] = nlohmann::json::array();
  for (const auto& sp : s.spawns) j["spawns"].push_back(sbmp::config_to_json(sp));
  j["rewards"] = {{"step", s.rewards.step}, {"goal", s.rewards.goal}, {"danger", s.rewards.danger}};
  j["step_size"] = s.step_size;
  j["noise"] = s.noise;
  j["generator_seed"] = s.generator_seed;
  return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  s.name = j.value("name", std::string());
  s.workspace = sbmp::workspace_from_json(j.at("workspace"));
  auto regions = [](const nlohmann::json& arr) {
    std::vector<Region> rs;
    for (const auto& r : arr) rs.push_back(region_from_json(r));
    return rs;
  };
  if (j.contains("landmarks")) s.landmarks = regions(j.at("landmarks"));
  if (j.contains("dangers")) s.dangers = regions(j.at("dangers"));
  if (j.contains("goals")) s.goals = regions(j.at("goals"));
  if (j.contains("spawns"))
    for (const auto& sp : j.at("spawns")) s.spawns.push_back(sbmp::config_from_json(sp));
  if (j.contains("rewards")) {
    s.rewards.step = j.at("rewards").value("step", -0.1);
    s.rewards.goal = j.at("rewards").value("goal", 0.0);
    s.rewards.danger = j.at("rewards").value("danger", 0.0);
  }
  s.step_size = j.value("step_size", 1.0);
  if (j.contains("noise"))
    s.noise = j.at("noise").get<std::map<std::string, double>>();
  s.generator_seed = j.value("generator_seed", std::uint64_t{0});
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_scenario: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return scenario_from_json(j);
}

inline void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_scenario: cannot open " + path);
  out << scenario_to_json(s).dump(2) << "\n";
}

}  // namespace refplan::envs
