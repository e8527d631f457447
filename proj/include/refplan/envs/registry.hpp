#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "refplan/envs/dronetag.hpp"
#include "refplan/envs/lightdark.hpp"
#include "refplan/envs/maze2d.hpp"
#include "refplan/envs/random3d.hpp"
#include "refplan/envs/scenario.hpp"

namespace refplan::envs {

enum class EnvId { lightdark, maze2d, random3d, dronetag };

inline EnvId parse_env_id(const std::string& name) {
  if (name == "lightdark") return EnvId::lightdark;
  if (name == "maze2d") return EnvId::maze2d;
  if (name == "random3d") return EnvId::random3d;
  if (name == "dronetag") return EnvId::dronetag;
  throw std::invalid_argument("unknown environment: " + name);
}

inline std::string env_name(EnvId id) {
  switch (id) {
    case EnvId::lightdark: return "lightdark";
    case EnvId::maze2d: return "maze2d";
    case EnvId::random3d: return "random3d";
    case EnvId::dronetag: return "dronetag";
  }
  return "?";
}

struct EpisodeLimits {
  int max_primitive_steps = 100;
  int max_cycles = 100;
};

// Per-environment planner presets: search depth counts macro levels, so the
// primitive horizon is roughly max_depth * max_macro_len.
inline SolverParams solver_defaults(EnvId id) {
  SolverParams p;
  switch (id) {
    case EnvId::lightdark:
      p.max_depth = 3;
      p.max_macro_len = 6;
      p.particle_count = 300;
      p.obs_resolution = 0.5;
      p.planning_budget_ms = 100;
      break;
    case EnvId::maze2d:
      p.max_depth = 6;
      p.max_macro_len = 16;
      p.particle_count = 500;
      // Landmark-sized cells: readings inside one landmark share a key, so a
      // macro that localizes funnels its simulations into one child instead
      // of spraying singleton children that never accumulate statistics.
      p.obs_resolution = 6.0;
      p.planning_budget_ms = 1000;
      break;
    case EnvId::random3d:
      p.max_depth = 6;
      p.max_macro_len = 16;
      p.particle_count = 500;
      p.obs_resolution = 1.0;
      p.planning_budget_ms = 1000;
      break;
    case EnvId::dronetag:
      p.max_depth = 5;
      p.max_macro_len = 5;
      p.particle_count = 300;
      p.obs_resolution = 1.0;
      p.planning_budget_ms = 1000;
      break;
  }
  return p;
}

inline EpisodeLimits episode_limits(EnvId id) {
  switch (id) {
    case EnvId::lightdark: return {100, 100};
    case EnvId::maze2d: return {800, 800};
    case EnvId::random3d: return {800, 800};
    case EnvId::dronetag: return {400, 40};
  }
  return {};
}

inline Scenario default_scenario(EnvId id, std::uint64_t seed) {
  switch (id) {
    case EnvId::lightdark: return lightdark_scenario(seed);
    case EnvId::maze2d: return maze2d_default_scenario();
    case EnvId::random3d: {
      Random3dSpec spec;
      spec.seed = seed;
      return random3d_generate(spec);
    }
    case EnvId::dronetag: return dronetag_default_scenario();
  }
  throw std::logic_error("default_scenario: bad env id");
}

// Scenario override comes from a file; environments whose scenario is drawn
// per episode (lightdark, random3d) fold the episode seed into generation.
inline EnvInstance make_instance(EnvId id, const std::optional<Scenario>& scenario,
                                 std::uint64_t seed, int particle_count) {
  switch (id) {
    case EnvId::lightdark: {
      const Scenario s = scenario ? *scenario : lightdark_scenario(seed);
      return make_lightdark_instance(s, seed, particle_count);
    }
    case EnvId::maze2d: {
      const Scenario s = scenario ? *scenario : maze2d_default_scenario();
      return make_maze2d_instance(s, seed, particle_count);
    }
    case EnvId::random3d: {
      Scenario s;
      if (scenario) {
        s = *scenario;
      } else {
        Random3dSpec spec;
        spec.seed = seed;
        s = random3d_generate(spec);
      }
      return make_random3d_instance(s, seed, particle_count);
    }
    case EnvId::dronetag: {
      const Scenario s = scenario ? *scenario : dronetag_default_scenario();
      return make_dronetag_instance(s, seed, particle_count);
    }
  }
  throw std::logic_error("make_instance: bad env id");
}

}  // namespace refplan::envs
