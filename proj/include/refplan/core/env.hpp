#pragma once

#include <vector>

#include "refplan/core/rng.hpp"
#include "refplan/core/types.hpp"

namespace refplan {

namespace sbmp {
struct Workspace;  // defined in refplan/sbmp/geometry.hpp
}

enum class TerminalKind { none, goal, danger, capture };

struct StepResult {
  State next;
  Observation obs;
  double reward = 0.0;
  bool terminal = false;
  TerminalKind outcome = TerminalKind::none;
};

struct RewardSchedule {
  double step = -0.1;
  double goal = 0.0;
  double danger = 0.0;

  double span() const {
    double lo = step, hi = step;
    for (double v : {goal, danger, step}) {
      lo = v < lo ? v : lo;
      hi = v > hi ? v : hi;
    }
    return hi - lo;
  }
};

// Generative interface the planners consume: sample a transition, and score
// an observation against a successor state (for the particle filter).
class Environment {
 public:
  virtual ~Environment() = default;

  virtual int action_count() const = 0;
  virtual int state_dim() const = 0;
  virtual StepResult step(const State& s, ActionId a, Rng& rng) const = 0;
  virtual double observation_likelihood(const Observation& o, const State& next,
                                        ActionId a) const = 0;
  virtual RewardSchedule rewards() const = 0;
};

// Cardinal-motion navigation environment with a geometric workspace. These
// are the environments the sampling-based reference policy understands.
class NavEnvironment : public Environment {
 public:
  virtual const sbmp::Workspace& workspace() const = 0;
  virtual double step_size() const = 0;
  virtual CardinalModel cardinal() const = 0;
  virtual Config config_of(const State& s) const = 0;
  // Goal configurations (region centers) used as planner targets; empty for
  // pursuit tasks.
  virtual std::vector<Config> goal_points() const = 0;
  virtual bool config_in_goal(const Config& q) const = 0;
  // Landmark/informative configurations for the subgoal heuristics.
  virtual std::vector<Config> informative_points() const = 0;

  int action_count() const override { return cardinal().action_count(); }
};

}  // namespace refplan
