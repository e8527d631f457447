#pragma once

#include <limits>

#include "refplan/core/belief.hpp"
#include "refplan/core/env.hpp"
#include "refplan/sbmp/macro.hpp"
#include "refplan/sbmp/planner.hpp"
#include "refplan/solver/sampler.hpp"

namespace refplan::baselines {

// Goal-seeking reference policy without search: plan straight to the nearest
// goal point from the given state. Used by the belief-space motion planning
// baseline and as a starvation fallback.
class GoalSeekSampler : public solver::MacroSampler {
 public:
  GoalSeekSampler(const NavEnvironment& env, int max_macro_len)
      : env_(env),
        max_macro_len_(max_macro_len),
        planner_(sbmp::planner_params_for_step(env.step_size())) {}

  solver::MacroSampleResult sample(const solver::BeliefView&, const State& s, Rng& rng) override {
    solver::MacroSampleResult result;
    const Config start = env_.config_of(s);
    const auto& world = env_.workspace();
    const auto goals = env_.goal_points();
    if (!goals.empty() && world.is_valid(start)) {
      const Config* nearest = &goals.front();
      double best = std::numeric_limits<double>::infinity();
      for (const auto& g : goals) {
        const double d = distance(start, g);
        if (d < best) {
          best = d;
          nearest = &g;
        }
      }
      auto plan = sbmp::rrt_connect(world, start, *nearest, planner_, rng);
      ++result.calls;
      if (plan.ok()) {
        result.macro = sbmp::fashion_macro_action(*plan.path, env_.step_size(), max_macro_len_,
                                                  env_.cardinal());
        return result;
      }
      ++result.failures;
    } else {
      ++result.calls;
      ++result.failures;
    }
    result.fallback = true;
    result.macro.actions = {rng.uniform_int(env_.action_count())};
    return result;
  }

 private:
  const NavEnvironment& env_;
  int max_macro_len_;
  sbmp::PlannerParams planner_;
};

// Belief-space motion planning without a search tree: hypothesize one state
// from the current belief, ask the reference policy for a macro, and commit
// to it. All lookahead value reasoning is skipped.
inline solver::MacroSampleResult bvamp_step(solver::MacroSampler& sampler,
                                            const ParticleBelief& belief, Rng& rng) {
  solver::BeliefView view;
  view.weighted = &belief;
  const State s = belief.sample(rng);
  return sampler.sample(view, s, rng);
}

}  // namespace refplan::baselines
