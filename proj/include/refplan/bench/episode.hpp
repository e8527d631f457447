#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "refplan/baselines/bvamp.hpp"
#include "refplan/baselines/pomcp.hpp"
#include "refplan/baselines/rpomcp.hpp"
#include "refplan/core/filter.hpp"
#include "refplan/envs/registry.hpp"
#include "refplan/solver/ref_solver.hpp"

namespace refplan::bench {

enum class SolverKind { nop, ref_basic, pomcp, rpomcp, bvamp };

inline SolverKind parse_solver_kind(const std::string& name) {
  if (name == "nop") return SolverKind::nop;
  if (name == "ref-basic") return SolverKind::ref_basic;
  if (name == "pomcp") return SolverKind::pomcp;
  if (name == "r-pomcp") return SolverKind::rpomcp;
  if (name == "b-vamp") return SolverKind::bvamp;
  throw std::invalid_argument("unknown solver: " + name);
}

inline std::string solver_kind_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::nop: return "nop";
    case SolverKind::ref_basic: return "ref-basic";
    case SolverKind::pomcp: return "pomcp";
    case SolverKind::rpomcp: return "r-pomcp";
    case SolverKind::bvamp: return "b-vamp";
  }
  return "?";
}

struct SolverConfig {
  SolverKind kind = SolverKind::nop;
  subgoals::HeuristicMode heuristic = subgoals::HeuristicMode::uniform;
  double epsilon = 0.0;
  SolverParams params;  // env preset, possibly overridden
  Budget budget = Budget::wall(1000.0);
  double ucb_c = 0.0;      // 0: derive from the environment's reward span
  int rollout_depth = 60;  // primitive horizon for the UCT baselines
  int menu_size = 8;       // frozen macro menu width (macro UCT baseline)
};

struct EpisodeRecord {
  std::uint64_t seed = 0;
  bool success = false;
  TerminalKind outcome = TerminalKind::none;
  double total_reward = 0.0;  // undiscounted sum of step rewards
  int steps = 0;              // primitive steps executed
  int cycles = 0;             // planning cycles
  long sampler_calls = 0;
  long sampler_failures = 0;
  int starved = 0;
  double wall_ms = 0.0;  // kept out of the deterministic artifacts
  std::vector<State> trajectory;
  std::optional<envs::Scenario> scenario_used;  // populated with the trajectory

  double sampler_failure_rate() const {
    return sampler_calls > 0 ? static_cast<double>(sampler_failures) /
                                   static_cast<double>(sampler_calls)
                             : 0.0;
  }
};

namespace detail {

struct CycleDecision {
  MacroAction macro;
  bool starved = false;
  long sampler_calls = 0;
  long sampler_failures = 0;
};

// One planning cycle: belief in, committed macro out. `on_executed` lets the
// driver reuse its tree across cycles given what was actually executed.
struct PlanDriver {
  std::function<CycleDecision(const ParticleBelief&, Rng&)> decide;
  std::function<void(const MacroAction&, const MacroObservation&, bool)> on_executed;
};

}  // namespace detail

// Runs one episode: repeatedly plan from the current belief, execute the
// committed macro primitive by primitive against the true (hidden) state,
// and filter the belief with the real observations. Terminal outcomes of
// goal or capture count as success.
inline EpisodeRecord run_episode(envs::EnvId env_id, const std::optional<envs::Scenario>& scenario,
                                 const SolverConfig& cfg, const envs::EpisodeLimits& limits,
                                 std::uint64_t seed, bool capture_trajectory = false) {
  auto inst = envs::make_instance(env_id, scenario, seed, cfg.params.particle_count);
  Environment& env = *inst.env;
  auto* nav = dynamic_cast<NavEnvironment*>(inst.env.get());
  auto* drone = dynamic_cast<envs::DroneTagEnv*>(inst.env.get());

  Rng world_rng(derive_seed(seed, 0x0e70, 2));
  Rng plan_rng(derive_seed(seed, 0x0e70, 3));
  Rng filter_rng(derive_seed(seed, 0x0e70, 4));

  const double ucb_c = cfg.ucb_c > 0.0 ? cfg.ucb_c : env.rewards().span();

  auto make_reference_sampler = [&]() -> std::unique_ptr<solver::MacroSampler> {
    if (drone) return std::make_unique<envs::DroneMacroSampler>(*drone, cfg.params);
    return std::make_unique<solver::SbmpMacroSampler>(*nav, cfg.heuristic, cfg.epsilon,
                                                      cfg.params);
  };
  auto make_heuristic = [&]() -> std::unique_ptr<solver::ValueHeuristic> {
    if (drone) return std::make_unique<envs::DroneTagHeuristic>(*drone, cfg.params.gamma);
    return std::make_unique<solver::GoalPathHeuristic>(*nav, cfg.params.gamma);
  };

  std::unique_ptr<solver::MacroSampler> sampler;
  std::unique_ptr<solver::ValueHeuristic> heuristic;
  std::unique_ptr<solver::RefSolver> ref_solver;
  std::unique_ptr<baselines::Pomcp> pomcp;
  std::unique_ptr<baselines::Rpomcp> rpomcp;
  std::unique_ptr<solver::BeliefNode> retained;

  detail::PlanDriver driver;
  switch (cfg.kind) {
    case SolverKind::nop:
    case SolverKind::ref_basic: {
      if (cfg.kind == SolverKind::nop) {
        sampler = make_reference_sampler();
      } else {
        sampler = std::make_unique<solver::UniformPrimitiveSampler>(env.action_count(), 1);
      }
      heuristic = make_heuristic();
      ref_solver = std::make_unique<solver::RefSolver>(env, *sampler, *heuristic, cfg.params);
      auto last_tree = std::make_shared<std::optional<solver::SearchTree>>();
      driver.decide = [&, last_tree](const ParticleBelief& belief, Rng& rng) {
        detail::CycleDecision dec;
        auto res = ref_solver->plan(belief, cfg.budget, rng, std::move(retained));
        retained = nullptr;
        dec.sampler_calls = res.tree.stats.sampler_calls;
        dec.sampler_failures = res.tree.stats.sampler_failures;
        if (res.starved) {
          dec.starved = true;
          solver::BeliefView view;
          view.weighted = &belief;
          dec.macro = sampler->sample(view, belief.sample(rng), rng).macro;
        } else if (cfg.params.sample_root_action) {
          dec.macro = solver::sample_root_action(res.tree, rng).macro;
        } else {
          dec.macro = solver::select_root_action(res.tree).macro;
        }
        *last_tree = std::move(res.tree);
        return dec;
      };
      if (cfg.params.reuse_subtree) {
        driver.on_executed = [&, last_tree](const MacroAction& macro, const MacroObservation& obs,
                                            bool full) {
          if (full && last_tree->has_value())
            retained = solver::extract_subtree(**last_tree, macro, obs.key());
        };
      }
      break;
    }
    case SolverKind::pomcp: {
      baselines::PomcpParams pp;
      pp.gamma = cfg.params.gamma;
      pp.ucb_c = ucb_c;
      pp.max_depth = cfg.rollout_depth;
      pp.obs_resolution = cfg.params.obs_resolution;
      pomcp = std::make_unique<baselines::Pomcp>(env, pp);
      driver.decide = [&](const ParticleBelief& belief, Rng& rng) {
        detail::CycleDecision dec;
        auto out = pomcp->plan(belief, cfg.budget, rng);
        dec.macro.actions = {out.action};
        dec.starved = out.starved;
        return dec;
      };
      break;
    }
    case SolverKind::rpomcp: {
      sampler = make_reference_sampler();
      baselines::RpomcpParams rp;
      rp.gamma = cfg.params.gamma;
      rp.ucb_c = ucb_c;
      rp.max_depth = cfg.params.max_depth;
      rp.menu_size = cfg.menu_size;
      rp.rollout_depth = cfg.rollout_depth;
      rp.obs_resolution = cfg.params.obs_resolution;
      rpomcp = std::make_unique<baselines::Rpomcp>(env, *sampler, rp);
      driver.decide = [&](const ParticleBelief& belief, Rng& rng) {
        detail::CycleDecision dec;
        auto out = rpomcp->plan(belief, cfg.budget, rng);
        dec.macro = std::move(out.macro);
        dec.starved = out.starved;
        dec.sampler_calls = out.sampler_calls;
        dec.sampler_failures = out.sampler_failures;
        return dec;
      };
      break;
    }
    case SolverKind::bvamp: {
      if (drone) {
        sampler = std::make_unique<envs::DroneMacroSampler>(*drone, cfg.params);
      } else {
        sampler = std::make_unique<baselines::GoalSeekSampler>(*nav, cfg.params.max_macro_len);
      }
      driver.decide = [&](const ParticleBelief& belief, Rng& rng) {
        detail::CycleDecision dec;
        auto out = baselines::bvamp_step(*sampler, belief, rng);
        dec.macro = std::move(out.macro);
        dec.sampler_calls = out.calls;
        dec.sampler_failures = out.failures;
        return dec;
      };
      break;
    }
  }

  EpisodeRecord rec;
  rec.seed = seed;
  State state = inst.initial_state;
  ParticleBelief belief = inst.initial_belief;
  if (capture_trajectory) {
    rec.trajectory.push_back(state);
    rec.scenario_used = inst.scenario;
  }

  const auto t0 = std::chrono::steady_clock::now();
  bool done = false;
  while (!done && rec.cycles < limits.max_cycles && rec.steps < limits.max_primitive_steps) {
    if (belief.all_terminal()) break;
    detail::CycleDecision dec = driver.decide(belief, plan_rng);
    ++rec.cycles;
    rec.starved += dec.starved ? 1 : 0;
    rec.sampler_calls += dec.sampler_calls;
    rec.sampler_failures += dec.sampler_failures;
    if (dec.macro.actions.empty()) continue;

    const std::size_t count =
        cfg.params.replan_every_step ? 1 : dec.macro.actions.size();
    MacroObservation executed;
    bool full = true;
    for (std::size_t i = 0; i < count; ++i) {
      const ActionId a = dec.macro.actions[i];
      const StepResult step = env.step(state, a, world_rng);
      rec.total_reward += step.reward;
      ++rec.steps;
      state = step.next;
      if (capture_trajectory) rec.trajectory.push_back(state);
      executed.steps.push_back(observation_key(step.obs, cfg.params.obs_resolution));
      if (step.terminal) {
        rec.outcome = step.outcome;
        rec.success = step.outcome == TerminalKind::goal || step.outcome == TerminalKind::capture;
        done = true;
        full = false;
        break;
      }
      auto upd = belief_update(belief, env, a, step.obs, cfg.params.particle_count, filter_rng);
      belief = std::move(upd.posterior);
      if (rec.steps >= limits.max_primitive_steps) {
        done = true;
        full = i + 1 == count;
        break;
      }
    }
    if (driver.on_executed) driver.on_executed(dec.macro, executed, full && count == dec.macro.actions.size());
  }
  rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

}  // namespace refplan::bench
