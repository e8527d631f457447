#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>

#include "refplan/core/belief.hpp"
#include "refplan/core/env.hpp"
#include "refplan/envs/lightdark.hpp"
#include "refplan/envs/scenario.hpp"
#include "refplan/sbmp/macro.hpp"
#include "refplan/solver/heuristic.hpp"
#include "refplan/solver/sampler.hpp"
#include "refplan/subgoals/heuristics.hpp"

namespace refplan::envs {

// Joint action over n drones, each picking one of 6 cardinals: base-6 digits,
// drone 0 least significant.
inline ActionId encode_joint_action(const std::vector<int>& per_drone) {
  ActionId id = 0;
  for (std::size_t i = per_drone.size(); i-- > 0;) id = id * 6 + per_drone[i];
  return id;
}

inline std::vector<int> decode_joint_action(ActionId id, int num_drones) {
  std::vector<int> per_drone(static_cast<std::size_t>(num_drones));
  for (int i = 0; i < num_drones; ++i) {
    per_drone[static_cast<std::size_t>(i)] = id % 6;
    id /= 6;
  }
  return per_drone;
}

// Multi-drone pursuit of an evading target on a torus in x/y. State layout is
// [drone_0 xyz, ..., drone_{n-1} xyz, target xyz]; drones move
// deterministically (clamped to bounds, blocked by obstacles), then the
// target flees the nearest drone whenever one is close, teleporting across
// the x/y edges. Position readings of the target are shared by all drones
// when any of them is within sensing range.
class DroneTagEnv : public Environment {
 public:
  explicit DroneTagEnv(Scenario scenario, int num_drones = 4)
      : scenario_(std::move(scenario)), num_drones_(num_drones) {
    sigma_reading_ = scenario_.noise_param("sigma_reading", 0.2);
    capture_radius_ = scenario_.noise_param("capture_radius", 1.5);
    sense_radius_ = scenario_.noise_param("sense_radius", 5.0);
    evade_radius_ = scenario_.noise_param("evade_radius", 4.0);
    action_count_ = 1;
    for (int i = 0; i < num_drones_; ++i) action_count_ *= 6;
  }

  const Scenario& scenario() const { return scenario_; }
  int num_drones() const { return num_drones_; }
  double step_size() const { return scenario_.step_size; }
  double capture_radius() const { return capture_radius_; }
  double sense_radius() const { return sense_radius_; }
  double evade_radius() const { return evade_radius_; }
  const sbmp::Workspace& per_drone_workspace() const { return scenario_.workspace; }

  int action_count() const override { return action_count_; }
  int state_dim() const override { return 3 * (num_drones_ + 1); }
  RewardSchedule rewards() const override { return scenario_.rewards; }

  Config drone_config(const State& s, int i) const {
    const auto base = static_cast<std::size_t>(3 * i);
    return Config::xyz(s.values[base], s.values[base + 1], s.values[base + 2]);
  }
  Config target_config(const State& s) const {
    const auto base = static_cast<std::size_t>(3 * num_drones_);
    return Config::xyz(s.values[base], s.values[base + 1], s.values[base + 2]);
  }

  double min_drone_distance(const State& s, const Config& target) const {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < num_drones_; ++i) best = std::min(best, distance(drone_config(s, i), target));
    return best;
  }

  // Target boundary rule: wrap around in x and y, clamp in z.
  Config apply_target_bounds(Config q) const {
    const auto& b = scenario_.workspace.bounds;
    for (int i = 0; i < 2; ++i) {
      const double span = b.hi[i] - b.lo[i];
      if (q[i] < b.lo[i]) q[i] += span;
      if (q[i] > b.hi[i]) q[i] -= span;
    }
    q[2] = std::clamp(q[2], b.lo[2], b.hi[2]);
    return q;
  }

  StepResult step(const State& s, ActionId a, Rng& rng) const override {
    StepResult r;
    if (s.terminal) {
      r.next = s;
      r.obs = Observation::null();
      r.terminal = true;
      return r;
    }
    const auto per_drone = decode_joint_action(a, num_drones_);
    const CardinalModel model{3};
    const auto& world = scenario_.workspace;

    r.next = s;
    for (int i = 0; i < num_drones_; ++i) {
      Config q = drone_config(s, i);
      Config cand = q;
      cand[model.axis(per_drone[static_cast<std::size_t>(i)])] +=
          model.sign(per_drone[static_cast<std::size_t>(i)]) * scenario_.step_size;
      for (int d = 0; d < 3; ++d) cand[d] = std::clamp(cand[d], world.bounds.lo[d], world.bounds.hi[d]);
      if (world.is_valid(cand)) q = cand;
      const auto base = static_cast<std::size_t>(3 * i);
      r.next.values[base] = q[0];
      r.next.values[base + 1] = q[1];
      r.next.values[base + 2] = q[2];
    }

    Config target = target_config(s);
    if (min_drone_distance(r.next, target) > capture_radius_) {
      target = move_target(r.next, target, rng);
      const auto base = static_cast<std::size_t>(3 * num_drones_);
      r.next.values[base] = target[0];
      r.next.values[base + 1] = target[1];
      r.next.values[base + 2] = target[2];
    }

    const double dist = min_drone_distance(r.next, target);
    if (dist <= capture_radius_) {
      r.next.terminal = true;
      r.terminal = true;
      r.outcome = TerminalKind::capture;
      r.reward = scenario_.rewards.goal;
      r.obs = Observation::null();
      return r;
    }
    r.reward = scenario_.rewards.step;
    if (dist <= sense_radius_) {
      r.obs = Observation::read3(target[0] + rng.normal(0.0, sigma_reading_),
                                 target[1] + rng.normal(0.0, sigma_reading_),
                                 target[2] + rng.normal(0.0, sigma_reading_));
    } else {
      r.obs = Observation::null();
    }
    return r;
  }

  double observation_likelihood(const Observation& o, const State& next, ActionId) const override {
    const Config target = target_config(next);
    const bool sensed = !next.terminal && min_drone_distance(next, target) <= sense_radius_;
    switch (o.kind) {
      case ObsKind::goal_feedback:
        return 0.0;
      case ObsKind::null_obs:
        return sensed ? 0.0 : 1.0;
      case ObsKind::reading: {
        if (!sensed) return 0.0;
        return normal_pdf(o.value[0], target[0], sigma_reading_) *
               normal_pdf(o.value[1], target[1], sigma_reading_) *
               normal_pdf(o.value[2], target[2], sigma_reading_);
      }
    }
    return 0.0;
  }

 private:
  // Evasive when pressed, otherwise a uniform random cardinal move. Evasion
  // picks the move maximizing the post-teleport distance to the closest
  // drone; ties go to the lowest action id.
  Config move_target(const State& drones_moved, const Config& target, Rng& rng) const {
    const CardinalModel model{3};
    if (min_drone_distance(drones_moved, target) <= evade_radius_) {
      Config best = target;
      double best_dist = -1.0;
      for (int m = 0; m < 6; ++m) {
        Config cand = target;
        cand[model.axis(m)] += model.sign(m) * scenario_.step_size;
        cand = apply_target_bounds(cand);
        const double d = min_drone_distance(drones_moved, cand);
        if (d > best_dist) {
          best_dist = d;
          best = cand;
        }
      }
      return best;
    }
    const int m = rng.uniform_int(6);
    Config cand = target;
    cand[model.axis(m)] += model.sign(m) * scenario_.step_size;
    return apply_target_bounds(cand);
  }

  Scenario scenario_;
  int num_drones_;
  int action_count_;
  double sigma_reading_ = 0.2;
  double capture_radius_ = 1.5;
  double sense_radius_ = 5.0;
  double evade_radius_ = 4.0;
};

inline Scenario dronetag_default_scenario() {
  Scenario s;
  s.name = "dronetag";
  s.workspace.bounds = {Config::xyz(0.0, 0.0, 0.0), Config::xyz(30.0, 30.0, 4.0)};
  s.spawns.push_back(Config::xyz(14.0, 14.0, 2.0));
  s.spawns.push_back(Config::xyz(16.0, 14.0, 2.0));
  s.spawns.push_back(Config::xyz(14.0, 16.0, 2.0));
  s.spawns.push_back(Config::xyz(16.0, 16.0, 2.0));
  s.rewards = {-0.1, 500.0, 0.0};
  s.step_size = 0.5;
  s.noise["sigma_reading"] = 0.2;
  s.noise["capture_radius"] = 1.5;
  s.noise["sense_radius"] = 5.0;
  s.noise["evade_radius"] = 4.0;
  return s;
}

// Drones start at their spawn formation; the target position is hidden, so
// both the true state and every belief particle draw it uniformly from free
// space.
inline EnvInstance make_dronetag_instance(const Scenario& scenario, std::uint64_t seed,
                                          int particle_count, int num_drones = 4) {
  EnvInstance inst;
  inst.scenario = scenario;
  inst.env = std::make_shared<DroneTagEnv>(scenario, num_drones);

  Rng rng(derive_seed(seed, 0xd207, 1));
  auto joint_with_target = [&](const Config& t) {
    State s;
    s.values.reserve(static_cast<std::size_t>(3 * (num_drones + 1)));
    for (int i = 0; i < num_drones; ++i) {
      const Config& q = scenario.spawns.at(static_cast<std::size_t>(i));
      s.values.insert(s.values.end(), {q[0], q[1], q[2]});
    }
    s.values.insert(s.values.end(), {t[0], t[1], t[2]});
    return s;
  };
  inst.initial_state = joint_with_target(scenario.workspace.sample_valid(rng));
  std::vector<State> particles;
  particles.reserve(static_cast<std::size_t>(particle_count));
  for (int i = 0; i < particle_count; ++i)
    particles.push_back(joint_with_target(scenario.workspace.sample_valid(rng)));
  inst.initial_belief = ParticleBelief::equal_weight(std::move(particles));
  return inst;
}

// Reference policy for the pursuit team: hypothesize a joint state from the
// belief, assign per-drone subgoals (nearest drone chases the hypothesized
// target), plan each drone's path, and zip the per-drone action sequences
// into joint macro steps. Drones that finish early oscillate in place.
class DroneMacroSampler : public solver::MacroSampler {
 public:
  DroneMacroSampler(const DroneTagEnv& env, const SolverParams& solver_params)
      : env_(env),
        params_(solver_params),
        planner_(sbmp::planner_params_for_step(env.step_size())) {}

  solver::MacroSampleResult sample(const solver::BeliefView& belief, const State& s,
                                   Rng& rng) override {
    solver::MacroSampleResult result;
    const int n = env_.num_drones();
    const auto& world = env_.per_drone_workspace();
    const CardinalModel model{3};

    const State& hypothesis = belief.sample(rng);
    std::vector<Config> subgoals;
    try {
      subgoals = subgoals::assign_drone_subgoals(hypothesis, n, world, rng);
    } catch (const std::exception&) {
      result.fallback = true;
      result.macro.actions = {rng.uniform_int(env_.action_count())};
      return result;
    }

    std::vector<std::vector<ActionId>> seqs(static_cast<std::size_t>(n));
    std::size_t longest = 1;
    for (int i = 0; i < n; ++i) {
      const Config start = env_.drone_config(s, i);
      auto& seq = seqs[static_cast<std::size_t>(i)];
      if (world.is_valid(start)) {
        auto plan = sbmp::rrt_connect(world, start, subgoals[static_cast<std::size_t>(i)],
                                      planner_, rng);
        ++result.calls;
        if (plan.ok()) {
          seq = sbmp::fashion_macro_action(*plan.path, env_.step_size(), params_.max_macro_len,
                                           model)
                    .actions;
        } else {
          ++result.failures;
        }
      } else {
        ++result.calls;
        ++result.failures;
      }
      if (seq.empty()) seq.push_back(rng.uniform_int(6));
      longest = std::max(longest, seq.size());
    }

    const auto joint_len =
        std::min(longest, static_cast<std::size_t>(std::max(1, params_.max_macro_len)));
    for (auto& seq : seqs) {
      const ActionId last = seq.back();
      std::size_t pad = 0;
      while (seq.size() < joint_len) {
        // Oscillate: opposite direction on the same axis, then back.
        seq.push_back(pad++ % 2 == 0 ? (last ^ 1) : last);
      }
      seq.resize(joint_len);
    }
    for (std::size_t k = 0; k < joint_len; ++k) {
      std::vector<int> per_drone(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) per_drone[static_cast<std::size_t>(i)] = seqs[static_cast<std::size_t>(i)][k];
      result.macro.actions.push_back(encode_joint_action(per_drone));
    }
    return result;
  }

 private:
  const DroneTagEnv& env_;
  SolverParams params_;
  sbmp::PlannerParams planner_;
};

// Optimistic capture value: the closest drone closes the remaining gap in a
// straight line, one step per tick, paying step costs on the way.
class DroneTagHeuristic : public solver::ValueHeuristic {
 public:
  DroneTagHeuristic(const DroneTagEnv& env, double gamma) : env_(env), gamma_(gamma) {}

  Result evaluate(const State& s, Rng&) override {
    if (s.terminal) return {0.0, 0, 0};
    const double gap = env_.min_drone_distance(s, env_.target_config(s)) - env_.capture_radius();
    const int steps = std::max(0, static_cast<int>(std::ceil(gap / env_.step_size())));
    double value = std::pow(gamma_, steps) * env_.rewards().goal;
    double disc = 1.0;
    for (int i = 0; i < steps; ++i) {
      value += disc * env_.rewards().step;
      disc *= gamma_;
    }
    return {value, 0, 0};
  }

 private:
  const DroneTagEnv& env_;
  double gamma_;
};

}  // namespace refplan::envs
