#pragma once

#include <cmath>
#include <memory>

#include "refplan/core/belief.hpp"
#include "refplan/core/env.hpp"
#include "refplan/envs/scenario.hpp"

namespace refplan::envs {

inline double normal_pdf(double x, double mean, double sigma) {
  const double z = (x - mean) / sigma;
  return std::exp(-0.5 * z * z) / (sigma * 2.5066282746310005024);
}

// Planar navigation with position readings whose noise grows with distance
// from a vertical light stripe. Motion is deterministic; all uncertainty is
// in the initial belief and the sensor. Entering the goal region terminates
// with a distinguished feedback observation.
class LightDarkEnv : public NavEnvironment {
 public:
  explicit LightDarkEnv(Scenario scenario) : scenario_(std::move(scenario)) {
    stripe_x_ = scenario_.noise_param("stripe_x", 0.0);
    sigma_min_ = scenario_.noise_param("sigma_min", 0.05);
    sigma_slope_ = scenario_.noise_param("sigma_slope", 0.3);
  }

  const Scenario& scenario() const { return scenario_; }
  double stripe_x() const { return stripe_x_; }

  double sigma_at(const Config& q) const {
    return sigma_min_ + sigma_slope_ * std::fabs(q[0] - stripe_x_);
  }

  int state_dim() const override { return 2; }
  RewardSchedule rewards() const override { return scenario_.rewards; }
  const sbmp::Workspace& workspace() const override { return scenario_.workspace; }
  double step_size() const override { return scenario_.step_size; }
  CardinalModel cardinal() const override { return CardinalModel{2}; }
  Config config_of(const State& s) const override { return Config::xy(s.values[0], s.values[1]); }

  std::vector<Config> goal_points() const override {
    std::vector<Config> pts;
    for (const auto& g : scenario_.goals) pts.push_back(g.center());
    return pts;
  }

  bool config_in_goal(const Config& q) const override { return scenario_.in_any(scenario_.goals, q); }

  // The stripe itself is the informative set, discretized along y.
  std::vector<Config> informative_points() const override {
    std::vector<Config> pts;
    const auto& b = scenario_.workspace.bounds;
    for (double y = b.lo[1]; y <= b.hi[1] + 1e-9; y += 1.0)
      pts.push_back(Config::xy(stripe_x_, y));
    return pts;
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
    Config q = config_of(s);
    q[model.axis(a)] += model.sign(a) * scenario_.step_size;
    q = scenario_.workspace.clamp(q);

    r.next.values = {q[0], q[1]};
    if (scenario_.in_any(scenario_.goals, q)) {
      r.next.terminal = true;
      r.terminal = true;
      r.outcome = TerminalKind::goal;
      r.reward = scenario_.rewards.goal;
      r.obs = Observation::goal();
      return r;
    }
    r.reward = scenario_.rewards.step;
    const double sigma = sigma_at(q);
    r.obs = Observation::read2(q[0] + rng.normal(0.0, sigma), q[1] + rng.normal(0.0, sigma));
    return r;
  }

  double observation_likelihood(const Observation& o, const State& next, ActionId) const override {
    const Config q = Config::xy(next.values[0], next.values[1]);
    const bool in_goal = scenario_.in_any(scenario_.goals, q);
    switch (o.kind) {
      case ObsKind::goal_feedback:
        return in_goal ? 1.0 : 0.0;
      case ObsKind::null_obs:
        return next.terminal ? 1.0 : 0.0;
      case ObsKind::reading: {
        if (in_goal || next.terminal) return 0.0;
        const double sigma = sigma_at(q);
        return normal_pdf(o.value[0], q[0], sigma) * normal_pdf(o.value[1], q[1], sigma);
      }
    }
    return 0.0;
  }

 private:
  Scenario scenario_;
  double stripe_x_ = 0.0;
  double sigma_min_ = 0.05;
  double sigma_slope_ = 0.3;
};

// Freshly randomized stripe/goal/start placement: all three mutually at
// least 4 units apart inside the 8x8 box.
inline Scenario lightdark_scenario(std::uint64_t seed) {
  Scenario s;
  s.name = "lightdark";
  s.workspace.bounds = {Config::xy(0.0, 0.0), Config::xy(8.0, 8.0)};
  s.step_size = 0.5;
  s.rewards = {-0.1, 100.0, 0.0};

  Rng rng(derive_seed(seed, 0x11d5, 0));
  const double goal_r = 0.5;
  for (;;) {
    const double stripe = rng.uniform(0.0, 8.0);
    const Config goal = Config::xy(rng.uniform(goal_r, 8.0 - goal_r), rng.uniform(goal_r, 8.0 - goal_r));
    const Config init = Config::xy(rng.uniform(0.0, 8.0), rng.uniform(0.0, 8.0));
    if (std::fabs(goal[0] - stripe) < 4.0) continue;
    if (std::fabs(init[0] - stripe) < 4.0) continue;
    if (distance(goal, init) < 4.0) continue;
    s.noise["stripe_x"] = stripe;
    s.noise["sigma_min"] = 0.05;
    s.noise["sigma_slope"] = 0.3;
    s.noise["sigma0"] = 0.75;
    s.goals.push_back(Region{{Config::xy(goal[0] - goal_r, goal[1] - goal_r),
                              Config::xy(goal[0] + goal_r, goal[1] + goal_r)}});
    s.spawns.push_back(init);
    s.generator_seed = seed;
    return s;
  }
}

struct EnvInstance {
  std::shared_ptr<Environment> env;
  Scenario scenario;
  State initial_state;
  ParticleBelief initial_belief;
};

// True start and belief particles share the Gaussian around the nominal
// spawn, so the initial belief is consistent with the hidden state.
inline EnvInstance make_lightdark_instance(const Scenario& scenario, std::uint64_t seed,
                                           int particle_count) {
  EnvInstance inst;
  inst.scenario = scenario;
  auto env = std::make_shared<LightDarkEnv>(scenario);

  Rng rng(derive_seed(seed, 0x11d5, 1));
  const double sigma0 = scenario.noise_param("sigma0", 0.75);
  const Config nominal = scenario.spawns.at(0);
  auto draw = [&](Rng& r) {
    Config q = Config::xy(nominal[0] + r.normal(0.0, sigma0), nominal[1] + r.normal(0.0, sigma0));
    q = scenario.workspace.clamp(q);
    return State{{q[0], q[1]}, false};
  };
  inst.initial_state = draw(rng);
  std::vector<State> particles;
  particles.reserve(static_cast<std::size_t>(particle_count));
  for (int i = 0; i < particle_count; ++i) particles.push_back(draw(rng));
  inst.initial_belief = ParticleBelief::equal_weight(std::move(particles));
  inst.env = std::move(env);
  return inst;
}

}  // namespace refplan::envs
