#pragma once

#include <cmath>
#include <memory>
#include <stdexcept>

#include "refplan/core/belief.hpp"
#include "refplan/core/env.hpp"
#include "refplan/envs/lightdark.hpp"
#include "refplan/envs/scenario.hpp"
#include "refplan/sbmp/planner.hpp"

namespace refplan::envs {

// 3D navigation through randomized box clutter. Same motion family as the
// maze lifted to six cardinals: the intended direction fires w.p. 0.8,
// otherwise a uniformly chosen direction orthogonal to the intended axis.
// Landmarks gate 3D position readings; dangers terminate.
class Random3dEnv : public NavEnvironment {
 public:
  explicit Random3dEnv(Scenario scenario) : scenario_(std::move(scenario)) {
    sigma_landmark_ = scenario_.noise_param("sigma_landmark", 0.1);
    p_intended_ = scenario_.noise_param("p_intended", 0.8);
  }

  const Scenario& scenario() const { return scenario_; }

  int state_dim() const override { return 3; }
  RewardSchedule rewards() const override { return scenario_.rewards; }
  const sbmp::Workspace& workspace() const override { return scenario_.workspace; }
  double step_size() const override { return scenario_.step_size; }
  CardinalModel cardinal() const override { return CardinalModel{3}; }
  Config config_of(const State& s) const override {
    return Config::xyz(s.values[0], s.values[1], s.values[2]);
  }

  std::vector<Config> goal_points() const override { return spread_points(scenario_.goals); }

  bool config_in_goal(const Config& q) const override { return scenario_.in_any(scenario_.goals, q); }

  std::vector<Config> informative_points() const override {
    return spread_points(scenario_.landmarks);
  }

  bool in_landmark(const Config& q) const { return scenario_.in_any(scenario_.landmarks, q); }

  ActionId realize_action(ActionId intended, Rng& rng) const {
    const CardinalModel model = cardinal();
    const double u = rng.uniform01();
    if (u < p_intended_) return intended;
    // Four orthogonal directions share the error mass uniformly.
    const double frac = (u - p_intended_) / (1.0 - p_intended_);
    const int slot = std::min(3, static_cast<int>(frac * 4.0));
    const int ax = model.axis(intended);
    const int ortho = slot / 2 == 0 ? (ax + 1) % 3 : (ax + 2) % 3;
    return model.action_for(ortho, slot % 2 == 0 ? 1 : -1);
  }

  StepResult step(const State& s, ActionId a, Rng& rng) const override {
    StepResult r;
    if (s.terminal) {
      r.next = s;
      r.obs = Observation::null();
      r.terminal = true;
      return r;
    }
    const CardinalModel model = cardinal();
    const ActionId realized = realize_action(a, rng);
    Config q = config_of(s);
    Config cand = q;
    cand[model.axis(realized)] += model.sign(realized) * scenario_.step_size;
    if (scenario_.workspace.is_valid(cand)) q = cand;

    r.next.values = {q[0], q[1], q[2]};
    if (scenario_.in_any(scenario_.dangers, q)) {
      r.next.terminal = true;
      r.terminal = true;
      r.outcome = TerminalKind::danger;
      r.reward = scenario_.rewards.danger;
      r.obs = Observation::null();
      return r;
    }
    if (scenario_.in_any(scenario_.goals, q)) {
      r.next.terminal = true;
      r.terminal = true;
      r.outcome = TerminalKind::goal;
      r.reward = scenario_.rewards.goal;
      r.obs = Observation::goal();
      return r;
    }
    r.reward = scenario_.rewards.step;
    if (in_landmark(q)) {
      r.obs = Observation::read3(q[0] + rng.normal(0.0, sigma_landmark_),
                                 q[1] + rng.normal(0.0, sigma_landmark_),
                                 q[2] + rng.normal(0.0, sigma_landmark_));
    } else {
      r.obs = Observation::null();
    }
    return r;
  }

  double observation_likelihood(const Observation& o, const State& next, ActionId) const override {
    const Config q = Config::xyz(next.values[0], next.values[1], next.values[2]);
    switch (o.kind) {
      case ObsKind::goal_feedback:
        return scenario_.in_any(scenario_.goals, q) ? 1.0 : 0.0;
      case ObsKind::null_obs:
        // Filter updates only happen while the episode is live; a terminated
        // hypothesis cannot explain any further observation.
        if (next.terminal) return 0.0;
        return in_landmark(q) ? 0.0 : 1.0;
      case ObsKind::reading: {
        if (next.terminal || !in_landmark(q)) return 0.0;
        return normal_pdf(o.value[0], q[0], sigma_landmark_) *
               normal_pdf(o.value[1], q[1], sigma_landmark_) *
               normal_pdf(o.value[2], q[2], sigma_landmark_);
      }
    }
    return 0.0;
  }

 private:
  // Generated worlds can butt regions against obstacles, so spread points are
  // validity-filtered; the center is kept unconditionally as before.
  std::vector<Config> spread_points(const std::vector<Region>& regions) const {
    std::vector<Config> pts;
    for (const auto& r : regions) {
      pts.push_back(r.center());
      for (const auto& p : region_spread(r, step_size()))
        if (!(p == r.center()) && scenario_.workspace.is_valid(p)) pts.push_back(p);
    }
    return pts;
  }

  Scenario scenario_;
  double sigma_landmark_ = 0.1;
  double p_intended_ = 0.8;
};

struct Random3dSpec {
  std::uint64_t seed = 0;
  int obstacle_count = 100;
  int danger_count = 15;
  int landmark_count = 12;
};

inline double manhattan(const Config& a, const Config& b) {
  double d = 0.0;
  for (int i = 0; i < a.dim; ++i) d += std::fabs(a[i] - b[i]);
  return d;
}

namespace detail {

inline sbmp::AaBox random_box(Rng& rng, const sbmp::AaBox& bounds, double min_side,
                              double max_side_xy, double max_side_z) {
  Config lo = Config::xyz(0, 0, 0);
  Config hi = Config::xyz(0, 0, 0);
  for (int i = 0; i < 3; ++i) {
    const double max_side = i == 2 ? max_side_z : max_side_xy;
    const double side = rng.uniform(min_side, max_side);
    const double start = rng.uniform(bounds.lo[i], std::max(bounds.lo[i], bounds.hi[i] - side));
    lo[i] = start;
    hi[i] = std::min(bounds.hi[i], start + side);
  }
  return {lo, hi};
}

inline bool box_near(const sbmp::AaBox& box, const Config& p, double margin) {
  double d2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = std::max({box.lo[i] - p[i], p[i] - box.hi[i], 0.0});
    d2 += d * d;
  }
  return d2 <= margin * margin;
}

}  // namespace detail

// Seeded scenario generation with a feasibility certificate: obstacles are
// rejected near the spawn and goal, and the whole draw is retried until a
// motion plan from spawn to goal exists. Identical seeds reproduce identical
// scenarios byte for byte.
inline Scenario random3d_generate(const Random3dSpec& spec) {
  const sbmp::AaBox bounds{Config::xyz(0.0, 0.0, 0.0), Config::xyz(50.0, 50.0, 6.0)};
  const Config spawn = Config::xyz(25.0, 25.0, 3.0);
  const double clear_margin = 2.0;
  const double goal_half = 1.5;

  for (std::uint64_t attempt = 0; attempt < 64; ++attempt) {
    Rng rng(derive_seed(spec.seed, 0x3d3d, attempt));
    Scenario s;
    s.name = "random3d";
    s.workspace.bounds = bounds;
    s.rewards = {-0.1, 800.0, -800.0};
    s.step_size = 1.0;
    s.noise["sigma_landmark"] = 0.1;
    s.noise["p_intended"] = 0.8;
    s.generator_seed = spec.seed;
    s.spawns.push_back(spawn);

    // Goal at least 40 units of travel away from the spawn. The box is only
    // 50x50x6, so straight-line distance cannot reach 40 from the center;
    // the separation is measured in the L1 metric that cardinal motion
    // actually traverses.
    Config goal = spawn;
    bool placed = false;
    for (int i = 0; i < 4000; ++i) {
      Config g = Config::xyz(rng.uniform(goal_half, 50.0 - goal_half),
                             rng.uniform(goal_half, 50.0 - goal_half),
                             rng.uniform(goal_half, 6.0 - goal_half));
      if (manhattan(g, spawn) >= 40.0) {
        goal = g;
        placed = true;
        break;
      }
    }
    if (!placed) continue;
    s.goals.push_back(Region{{Config::xyz(goal[0] - goal_half, goal[1] - goal_half, goal[2] - goal_half),
                              Config::xyz(goal[0] + goal_half, goal[1] + goal_half, goal[2] + goal_half)}});

    auto clear_of_endpoints = [&](const sbmp::AaBox& box) {
      return !detail::box_near(box, spawn, clear_margin) && !detail::box_near(box, goal, clear_margin + goal_half);
    };

    int guard = 0;
    while (static_cast<int>(s.workspace.boxes.size()) < spec.obstacle_count && guard++ < 100000) {
      const auto box = detail::random_box(rng, bounds, 1.0, 4.0, 3.0);
      if (clear_of_endpoints(box)) s.workspace.boxes.push_back(box);
    }
    guard = 0;
    while (static_cast<int>(s.dangers.size()) < spec.danger_count && guard++ < 100000) {
      const auto box = detail::random_box(rng, bounds, 2.0, 5.0, 3.0);
      if (clear_of_endpoints(box)) s.dangers.push_back(Region{box});
    }
    guard = 0;
    while (static_cast<int>(s.landmarks.size()) < spec.landmark_count && guard++ < 100000) {
      const auto box = detail::random_box(rng, bounds, 2.0, 5.0, 3.0);
      s.landmarks.push_back(Region{box});
    }
    if (static_cast<int>(s.workspace.boxes.size()) < spec.obstacle_count) continue;

    // Dangers block motion plans too: certify against a workspace that
    // treats them as solid so the certified route never has to cross one.
    sbmp::Workspace hard = s.workspace;
    for (const auto& d : s.dangers) hard.boxes.push_back(d.box);
    sbmp::PlannerParams pp = sbmp::planner_params_for_step(s.step_size);
    pp.max_iterations = 30000;
    Rng plan_rng(derive_seed(spec.seed, 0x3d3e, attempt));
    const auto plan = sbmp::rrt_connect(hard, spawn, goal, pp, plan_rng);
    if (!plan.ok()) continue;
    return s;
  }
  throw std::runtime_error("random3d generation failed to certify a feasible scenario");
}

inline EnvInstance make_random3d_instance(const Scenario& scenario, std::uint64_t /*seed*/,
                                          int particle_count) {
  EnvInstance inst;
  inst.scenario = scenario;
  inst.env = std::make_shared<Random3dEnv>(scenario);
  const Config& spawn = scenario.spawns.at(0);
  inst.initial_state = State{{spawn[0], spawn[1], spawn[2]}, false};
  std::vector<State> particles(static_cast<std::size_t>(particle_count), inst.initial_state);
  inst.initial_belief = ParticleBelief::equal_weight(std::move(particles));
  return inst;
}

}  // namespace refplan::envs
