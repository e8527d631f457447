#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "refplan/core/rng.hpp"

namespace refplan {

// Point in the robot configuration space. Planning spaces here are at most
// three-dimensional (per-drone planning uses the 3D slice of the joint state),
// so inline storage keeps the hot planner loops allocation-free.
struct Config {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  int dim = 0;

  static Config xy(double x, double y) { return Config{{x, y, 0.0}, 2}; }
  static Config xyz(double x, double y, double z) { return Config{{x, y, z}, 3}; }

  double& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return v[static_cast<std::size_t>(i)]; }

  bool operator==(const Config& o) const { return dim == o.dim && v == o.v; }
};

inline double distance(const Config& a, const Config& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

inline Config lerp(const Config& a, const Config& b, double t) {
  Config r = a;
  for (int i = 0; i < a.dim; ++i) r[i] = a[i] + t * (b[i] - a[i]);
  return r;
}

// Environment state. Terminal states absorb: stepping them is a no-op with
// zero reward.
struct State {
  std::vector<double> values;
  bool terminal = false;
};

using ActionId = int;

// Fixed mapping between primitive action ids and axis moves, shared by every
// cardinal-motion environment: +x, -x, +y, -y, +z, -z.
struct CardinalModel {
  int dim = 2;

  int action_count() const { return 2 * dim; }
  int axis(ActionId a) const { return a / 2; }
  double sign(ActionId a) const { return (a % 2 == 0) ? 1.0 : -1.0; }
  ActionId action_for(int ax, double sgn) const { return 2 * ax + (sgn < 0.0 ? 1 : 0); }
};

struct MacroAction {
  std::vector<ActionId> actions;

  std::size_t size() const { return actions.size(); }
  bool operator==(const MacroAction& o) const { return actions == o.actions; }
  bool operator<(const MacroAction& o) const { return actions < o.actions; }

  std::string str() const {
    std::string s;
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (i) s += ':';
      s += std::to_string(actions[i]);
    }
    return s;
  }
};

enum class ObsKind : std::uint8_t { reading, null_obs, goal_feedback };

// One per-step observation: either a (<=3 dimensional) sensor reading or a
// distinguished symbol.
struct Observation {
  ObsKind kind = ObsKind::null_obs;
  std::array<double, 3> value{0.0, 0.0, 0.0};
  int dim = 0;

  static Observation null() { return Observation{}; }
  static Observation goal() { return Observation{ObsKind::goal_feedback, {}, 0}; }
  static Observation read1(double a) { return Observation{ObsKind::reading, {a, 0.0, 0.0}, 1}; }
  static Observation read2(double a, double b) {
    return Observation{ObsKind::reading, {a, b, 0.0}, 2};
  }
  static Observation read3(double a, double b, double c) {
    return Observation{ObsKind::reading, {a, b, c}, 3};
  }
};

using ObsKey = std::uint64_t;

// Continuous readings share a key when they fall in the same grid cell of
// width `resolution`; Null and goal feedback get their own reserved keys.
inline ObsKey observation_key(const Observation& o, double resolution) {
  if (o.kind == ObsKind::null_obs) return 0x6e756c6cull;       // "null"
  if (o.kind == ObsKind::goal_feedback) return 0x676f616cull;  // "goal"
  std::uint64_t h = fnv1a_init();
  h = fnv1a_mix(h, static_cast<std::uint64_t>(o.dim));
  for (int i = 0; i < o.dim; ++i) {
    const auto cell = static_cast<std::int64_t>(std::floor(o.value[static_cast<std::size_t>(i)] / resolution));
    h = fnv1a_mix(h, static_cast<std::uint64_t>(cell));
  }
  return h;
}

// Observation sequence generated while executing a macro action; shorter than
// the macro when execution stopped at a terminal state.
struct MacroObservation {
  std::vector<ObsKey> steps;

  ObsKey key() const {
    std::uint64_t h = fnv1a_init();
    h = fnv1a_mix(h, steps.size());
    for (ObsKey k : steps) h = fnv1a_mix(h, k);
    return h;
  }
};

struct SolverParams {
  double gamma = 0.99;
  double eta = 0.2;
  int max_depth = 6;          // D in the depth test `depth(h) > D`
  int particle_count = 300;   // root filter size
  double obs_resolution = 1.0;
  int max_macro_len = 8;
  int sbmp_retry_cap = 3;
  bool sample_root_action = false;  // default: mode of the soft policy
  bool replan_every_step = false;   // execute one primitive per cycle
  bool reuse_subtree = false;
  double planning_budget_ms = 1000.0;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must lie in (0,1)");
    if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
    if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    if (particle_count < 1) throw std::invalid_argument("particle_count must be >= 1");
    if (!(obs_resolution > 0.0)) throw std::invalid_argument("obs_resolution must be positive");
    if (max_macro_len < 1) throw std::invalid_argument("max_macro_len must be >= 1");
  }
};

// Planning budget: wall clock for benchmarking, simulation count for
// deterministic replay.
struct Budget {
  enum class Mode { wall_clock, simulations };
  Mode mode = Mode::wall_clock;
  double ms = 1000.0;
  long simulations = 0;

  static Budget wall(double milliseconds) { return Budget{Mode::wall_clock, milliseconds, 0}; }
  static Budget sims(long n) { return Budget{Mode::simulations, 0.0, n}; }
};

}  // namespace refplan
