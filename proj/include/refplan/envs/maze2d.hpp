#pragma once

#include <cmath>
#include <memory>

#include "refplan/core/belief.hpp"
#include "refplan/core/env.hpp"
#include "refplan/envs/lightdark.hpp"
#include "refplan/envs/scenario.hpp"

namespace refplan::envs {

// Walled 2D maze with slippery motion: the intended direction is realized
// with probability 0.8, otherwise one of the two orthogonal directions fires
// (0.1 each). Colliding moves are cancelled. Position readings are only
// available inside landmark regions; danger regions terminate with a large
// penalty.
class Maze2dEnv : public NavEnvironment {
 public:
  explicit Maze2dEnv(Scenario scenario) : scenario_(std::move(scenario)) {
    sigma_landmark_ = scenario_.noise_param("sigma_landmark", 0.1);
    p_intended_ = scenario_.noise_param("p_intended", 0.8);
  }

  const Scenario& scenario() const { return scenario_; }

  int state_dim() const override { return 2; }
  RewardSchedule rewards() const override { return scenario_.rewards; }
  const sbmp::Workspace& workspace() const override { return scenario_.workspace; }
  double step_size() const override { return scenario_.step_size; }
  CardinalModel cardinal() const override { return CardinalModel{2}; }
  Config config_of(const State& s) const override { return Config::xy(s.values[0], s.values[1]); }

  std::vector<Config> goal_points() const override {
    std::vector<Config> pts;
    for (const auto& g : scenario_.goals)
      for (const auto& p : region_spread(g, step_size())) pts.push_back(p);
    return pts;
  }

  bool config_in_goal(const Config& q) const override { return scenario_.in_any(scenario_.goals, q); }

  std::vector<Config> informative_points() const override {
    std::vector<Config> pts;
    for (const auto& lm : scenario_.landmarks)
      for (const auto& p : region_spread(lm, step_size())) pts.push_back(p);
    return pts;
  }

  bool in_landmark(const Config& q) const { return scenario_.in_any(scenario_.landmarks, q); }

  ActionId realize_action(ActionId intended, Rng& rng) const {
    const CardinalModel model = cardinal();
    const double u = rng.uniform01();
    if (u < p_intended_) return intended;
    const int ortho = 1 - model.axis(intended);
    const double rest = 0.5 * (1.0 - p_intended_);
    return model.action_for(ortho, u < p_intended_ + rest ? 1 : -1);
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

    r.next.values = {q[0], q[1]};
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
      r.obs = Observation::read2(q[0] + rng.normal(0.0, sigma_landmark_),
                                 q[1] + rng.normal(0.0, sigma_landmark_));
    } else {
      r.obs = Observation::null();
    }
    return r;
  }

  double observation_likelihood(const Observation& o, const State& next, ActionId) const override {
    const Config q = Config::xy(next.values[0], next.values[1]);
    switch (o.kind) {
      case ObsKind::goal_feedback:
        return scenario_.in_any(scenario_.goals, q) ? 1.0 : 0.0;
      case ObsKind::null_obs:
        // The filter only runs while the episode is live, so a hypothesis
        // that already terminated (danger entry) is inconsistent with
        // receiving any further observation.
        if (next.terminal) return 0.0;
        return in_landmark(q) ? 0.0 : 1.0;
      case ObsKind::reading: {
        if (next.terminal || !in_landmark(q)) return 0.0;
        return normal_pdf(o.value[0], q[0], sigma_landmark_) *
               normal_pdf(o.value[1], q[1], sigma_landmark_);
      }
    }
    return 0.0;
  }

 private:
  Scenario scenario_;
  double sigma_landmark_ = 0.1;
  double p_intended_ = 0.8;
};

// Three-wall weave with two symmetric spawn hypotheses. The walls force an
// over-under-over route (over wall A, under wall B, back up over wall C), and
// each crossing is spanned by a landmark band, so any route east localizes
// the robot right before the next risky segment: band 1 covers the corridor
// above wall A, band 2 the duck under wall B, band 3 the climb-out before
// wall C. The danger blocks sit on the blind shortest path (mid-corridor and
// on the goal approach), leaving narrow safe lanes that only a localized
// robot can thread reliably.
inline Scenario maze2d_default_scenario() {
  Scenario s;
  s.name = "maze2d";
  s.workspace.bounds = {Config::xy(0.0, 0.0), Config::xy(50.0, 50.0)};
  s.workspace.boxes.push_back({Config::xy(12.0, 0.0), Config::xy(14.0, 38.0)});
  s.workspace.boxes.push_back({Config::xy(24.0, 12.0), Config::xy(26.0, 50.0)});
  s.workspace.boxes.push_back({Config::xy(36.0, 0.0), Config::xy(38.0, 38.0)});
  s.landmarks.push_back(Region{{Config::xy(16.0, 39.0), Config::xy(22.0, 50.0)}});
  s.landmarks.push_back(Region{{Config::xy(19.0, 0.0), Config::xy(25.0, 11.0)}});
  s.landmarks.push_back(Region{{Config::xy(29.0, 39.0), Config::xy(35.0, 50.0)}});
  s.dangers.push_back(Region{{Config::xy(31.0, 20.0), Config::xy(34.0, 26.0)}});
  s.dangers.push_back(Region{{Config::xy(40.0, 22.0), Config::xy(44.0, 28.0)}});
  s.goals.push_back(Region{{Config::xy(46.0, 22.0), Config::xy(50.0, 28.0)}});
  s.spawns.push_back(Config::xy(5.0, 45.0));
  s.spawns.push_back(Config::xy(5.0, 5.0));
  s.rewards = {-0.1, 800.0, -800.0};
  s.step_size = 1.0;
  s.noise["sigma_landmark"] = 0.1;
  s.noise["p_intended"] = 0.8;
  return s;
}

// Equal split of particles over the spawn hypotheses; the true spawn is a
// seeded coin flip.
inline EnvInstance make_maze2d_instance(const Scenario& scenario, std::uint64_t seed,
                                        int particle_count) {
  EnvInstance inst;
  inst.scenario = scenario;
  inst.env = std::make_shared<Maze2dEnv>(scenario);

  Rng rng(derive_seed(seed, 0x3a2e, 1));
  const auto& spawns = scenario.spawns;
  if (spawns.empty()) throw std::runtime_error("maze scenario has no spawns");
  const Config& truth = spawns[rng.uniform_int(static_cast<int>(spawns.size()))];
  inst.initial_state = State{{truth[0], truth[1]}, false};

  std::vector<State> particles;
  particles.reserve(static_cast<std::size_t>(particle_count));
  for (int i = 0; i < particle_count; ++i) {
    const Config& q = spawns[static_cast<std::size_t>(i) % spawns.size()];
    particles.push_back(State{{q[0], q[1]}, false});
  }
  inst.initial_belief = ParticleBelief::equal_weight(std::move(particles));
  return inst;
}

}  // namespace refplan::envs
