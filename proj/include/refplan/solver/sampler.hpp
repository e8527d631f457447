#pragma once

#include <cmath>
#include <functional>
#include <unordered_map>
#include <vector>

#include "refplan/core/belief.hpp"
#include "refplan/core/env.hpp"
#include "refplan/sbmp/macro.hpp"
#include "refplan/sbmp/planner.hpp"
#include "refplan/subgoals/heuristics.hpp"

namespace refplan::solver {

// Read-only view over a node's belief: the root carries the weighted filter
// belief, interior nodes an unweighted particle list.
struct BeliefView {
  const ParticleBelief* weighted = nullptr;
  const std::vector<State>* particles = nullptr;

  std::size_t size() const { return weighted ? weighted->size() : particles->size(); }
  const State& state(std::size_t i) const {
    return weighted ? weighted->state(i) : (*particles)[i];
  }
  double weight(std::size_t i) const {
    return weighted ? weighted->weight(i) : 1.0 / static_cast<double>(particles->size());
  }
  const State& sample(Rng& rng) const {
    if (weighted) return weighted->sample(rng);
    return (*particles)[rng.uniform_int(static_cast<int>(particles->size()))];
  }
};

struct MacroSampleResult {
  MacroAction macro;
  int calls = 0;     // SBMP invocations
  int failures = 0;  // failed SBMP invocations
  bool fallback = false;
};

// Reference-policy macro source. Implementations own their failure handling;
// the returned macro is always non-empty.
class MacroSampler {
 public:
  virtual ~MacroSampler() = default;
  virtual MacroSampleResult sample(const BeliefView& belief, const State& s, Rng& rng) = 0;
};

// Uniform-random primitive actions of fixed length (the degenerate reference
// without any motion planning).
class UniformPrimitiveSampler : public MacroSampler {
 public:
  UniformPrimitiveSampler(int action_count, int length = 1)
      : action_count_(action_count), length_(length) {}

  MacroSampleResult sample(const BeliefView&, const State&, Rng& rng) override {
    MacroSampleResult r;
    for (int i = 0; i < length_; ++i) r.macro.actions.push_back(rng.uniform_int(action_count_));
    return r;
  }

 private:
  int action_count_;
  int length_;
};

// Test hook: arbitrary callable as the reference policy.
class FunctionSampler : public MacroSampler {
 public:
  using Fn = std::function<MacroSampleResult(const BeliefView&, const State&, Rng&)>;
  explicit FunctionSampler(Fn fn) : fn_(std::move(fn)) {}
  MacroSampleResult sample(const BeliefView& b, const State& s, Rng& rng) override {
    return fn_(b, s, rng);
  }

 private:
  Fn fn_;
};

// Subgoal-directed reference policy: draw a subgoal from the configured
// heuristic, plan a collision-free path to it, and fashion the path into a
// macro action. SBMP failures retry with fresh subgoals up to the cap, then
// fall back to one uniform-random primitive.
//
// Planning is deterministic per query: the planner's generator is seeded from
// the (start, subgoal) grid cells, so repeat queries return the same macro and
// the tree accumulates visits on it instead of minting a fresh edge per
// simulation. Results (including failures) are memoized on the same key, so
// repeat queries skip the planner entirely.
class SbmpMacroSampler : public MacroSampler {
 public:
  SbmpMacroSampler(const NavEnvironment& env, subgoals::HeuristicMode mode, double epsilon,
                   const SolverParams& solver_params)
      : env_(env),
        mode_(mode),
        epsilon_(epsilon),
        params_(solver_params),
        planner_(sbmp::planner_params_for_step(env.step_size())) {}

  const sbmp::PlannerParams& planner_params() const { return planner_; }
  void set_planner_params(const sbmp::PlannerParams& p) {
    planner_ = p;
    cache_.clear();
  }

  MacroSampleResult sample(const BeliefView& belief, const State& s, Rng& rng) override {
    MacroSampleResult result;
    const Config start = env_.config_of(s);
    const auto& world = env_.workspace();

    if (world.is_valid(start)) {
      subgoals::SubgoalContext ctx;
      ctx.current = start;
      ctx.goals = env_.goal_points();
      ctx.informative = env_.informative_points();
      ctx.bounds = world.bounds;
      if (mode_ == subgoals::HeuristicMode::entropy) {
        ctx.belief_positions.reserve(belief.size());
        ctx.belief_weights.reserve(belief.size());
        for (std::size_t i = 0; i < belief.size(); ++i) {
          ctx.belief_positions.push_back(env_.config_of(belief.state(i)));
          ctx.belief_weights.push_back(belief.weight(i));
        }
      }

      for (int attempt = 0; attempt <= params_.sbmp_retry_cap; ++attempt) {
        const Config subgoal = subgoals::epsilon_wrap(
            epsilon_, world, rng, [&](Rng& r) { return subgoals::sample_subgoal(mode_, ctx, r); });
        const std::uint64_t key = query_key(start, subgoal, attempt);
        ++result.calls;

        const auto cached = cache_.find(key);
        if (cached != cache_.end()) {
          if (!cached->second.actions.empty()) {
            result.macro = cached->second;
            return result;
          }
          ++result.failures;
          continue;
        }

        Rng plan_rng(key);
        auto plan = sbmp::rrt_connect(world, start, subgoal, planner_, plan_rng);
        if (plan.ok()) {
          result.macro = sbmp::fashion_macro_action(*plan.path, env_.step_size(),
                                                    params_.max_macro_len, env_.cardinal());
          cache_.emplace(key, result.macro);
          return result;
        }
        ++result.failures;
        cache_.emplace(key, MacroAction{});
      }
    } else {
      ++result.calls;
      ++result.failures;
    }

    result.fallback = true;
    result.macro.actions = {rng.uniform_int(env_.action_count())};
    return result;
  }

 private:
  std::uint64_t query_key(const Config& from, const Config& to, int attempt) const {
    const double step = env_.step_size();
    std::uint64_t h = fnv1a_init();
    for (int d = 0; d < from.dim; ++d)
      h = fnv1a_mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(from[d] / step))));
    for (int d = 0; d < to.dim; ++d)
      h = fnv1a_mix(h, static_cast<std::uint64_t>(static_cast<std::int64_t>(std::floor(to[d] / step))));
    h = fnv1a_mix(h, static_cast<std::uint64_t>(attempt));
    return h;
  }

  const NavEnvironment& env_;
  subgoals::HeuristicMode mode_;
  double epsilon_;
  SolverParams params_;
  sbmp::PlannerParams planner_;
  std::unordered_map<std::uint64_t, MacroAction> cache_;
};

}  // namespace refplan::solver
