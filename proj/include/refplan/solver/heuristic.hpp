#pragma once

#include <cmath>
#include <unordered_map>

#include "refplan/core/env.hpp"
#include "refplan/sbmp/macro.hpp"
#include "refplan/sbmp/planner.hpp"

namespace refplan::solver {

// Leaf value estimate for states beyond the tree depth.
class ValueHeuristic {
 public:
  struct Result {
    double value = 0.0;
    int sbmp_calls = 0;
    int sbmp_failures = 0;
  };

  virtual ~ValueHeuristic() = default;
  virtual Result evaluate(const State& s, Rng& rng) = 0;
};

// For tasks without goal regions (pursuit).
class ZeroHeuristic : public ValueHeuristic {
 public:
  Result evaluate(const State&, Rng&) override { return {}; }
};

// Plans a path from the state to the nearest goal and prices it as if the
// fashioned (untruncated) macro executed noise-free:
//   gamma^L * R_goal + sum_{i<L} gamma^i * R_step.
// Returns R_goal inside a goal region and 0 when planning fails. Values are
// memoized on a grid, so repeat visits to the same neighborhood skip the
// planner.
class GoalPathHeuristic : public ValueHeuristic {
 public:
  GoalPathHeuristic(const NavEnvironment& env, double gamma, bool cache = true)
      : env_(env),
        gamma_(gamma),
        cache_enabled_(cache),
        planner_(sbmp::planner_params_for_step(env.step_size())) {}

  Result evaluate(const State& s, Rng&) override {
    Result res;
    if (s.terminal) return res;
    const auto goals = env_.goal_points();
    if (goals.empty()) return res;

    const Config q = env_.config_of(s);
    const RewardSchedule rewards = env_.rewards();
    if (env_.config_in_goal(q)) {
      res.value = rewards.goal;
      return res;
    }

    const std::uint64_t key = cell_key(q);
    if (cache_enabled_) {
      const auto it = cache_.find(key);
      if (it != cache_.end()) {
        res.value = it->second;
        return res;
      }
    }

    const Config* nearest = &goals.front();
    double best = distance(q, *nearest);
    for (const auto& g : goals) {
      const double d = distance(q, g);
      if (d < best) {
        best = d;
        nearest = &g;
      }
    }

    // Seeded by the grid cell, so a leaf's value does not depend on the order
    // in which the search visits it.
    Rng plan_rng(key);
    auto plan = sbmp::rrt_connect(env_.workspace(), q, *nearest, planner_, plan_rng);
    ++res.sbmp_calls;
    if (!plan.ok()) {
      ++res.sbmp_failures;
      if (cache_enabled_) cache_.emplace(key, 0.0);
      return res;
    }

    const MacroAction macro =
        sbmp::fashion_macro_action_unbounded(*plan.path, env_.step_size(), env_.cardinal());
    const auto len = static_cast<double>(macro.size());
    double step_sum = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < macro.size(); ++i) {
      step_sum += scale;
      scale *= gamma_;
    }
    res.value = std::pow(gamma_, len) * rewards.goal + step_sum * rewards.step;
    if (cache_enabled_) cache_.emplace(key, res.value);
    return res;
  }

 private:
  std::uint64_t cell_key(const Config& q) const {
    std::uint64_t h = fnv1a_init();
    for (int d = 0; d < q.dim; ++d) {
      const auto cell = static_cast<std::int64_t>(std::floor(q[d] / env_.step_size()));
      h = fnv1a_mix(h, static_cast<std::uint64_t>(cell));
    }
    return h;
  }

  const NavEnvironment& env_;
  double gamma_;
  bool cache_enabled_;
  sbmp::PlannerParams planner_;
  std::unordered_map<std::uint64_t, double> cache_;
};

}  // namespace refplan::solver
