#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <memory>
#include <vector>

#include "refplan/core/belief.hpp"
#include "refplan/core/env.hpp"
#include "refplan/solver/sampler.hpp"

namespace refplan::baselines {

struct RpomcpParams {
  double gamma = 0.99;
  double ucb_c = 100.0;
  int max_depth = 6;       // macro levels
  int menu_size = 8;       // frozen macro candidates per node
  int rollout_depth = 40;  // primitive depth cap for expansion rollouts
  double obs_resolution = 1.0;

  void validate() const {
    if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("rpomcp: gamma in (0,1)");
    if (ucb_c < 0.0) throw std::invalid_argument("rpomcp: ucb_c >= 0");
    if (max_depth < 1) throw std::invalid_argument("rpomcp: max_depth >= 1");
    if (menu_size < 1) throw std::invalid_argument("rpomcp: menu_size >= 1");
    if (obs_resolution <= 0.0) throw std::invalid_argument("rpomcp: obs_resolution > 0");
  }
};

// UCB tree search over macro actions: every node freezes a menu of macro
// candidates drawn from the reference sampler on first visit, then treats the
// menu as its discrete action set. Backups discount by the executed macro
// length; children are keyed by the macro observation sequence. The chosen
// root macro is executed in full.
class Rpomcp {
 public:
  struct Node;
  struct MenuEntry {
    MacroAction macro;
    int n = 0;
    double q = 0.0;
    std::map<ObsKey, std::unique_ptr<Node>> children;
  };
  struct Node {
    int n = 0;
    bool menu_built = false;
    std::vector<MenuEntry> menu;
  };

  struct PlanOutcome {
    MacroAction macro;
    int simulations = 0;
    int sampler_calls = 0;
    int sampler_failures = 0;
    bool starved = false;
  };

  Rpomcp(const Environment& env, solver::MacroSampler& sampler, RpomcpParams params)
      : env_(env), sampler_(sampler), params_(params) {
    params_.validate();
  }

  const Node* root() const { return root_.get(); }

  PlanOutcome plan(const ParticleBelief& belief, Budget budget, Rng& rng) {
    root_ = std::make_unique<Node>();
    out_ = PlanOutcome{};
    if (belief.all_terminal()) {
      PlanOutcome out;
      out.starved = true;
      out.macro.actions = {rng.uniform_int(env_.action_count())};
      return out;
    }
    solver::BeliefView view;
    view.weighted = &belief;

    const auto start = std::chrono::steady_clock::now();
    for (;;) {
      if (budget.mode == Budget::Mode::simulations) {
        if (out_.simulations >= budget.simulations) break;
      } else {
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        if (static_cast<double>(elapsed.count()) >= budget.ms) break;
      }
      State s = belief.sample(rng);
      if (s.terminal) continue;
      simulate(root_.get(), view, s, 0, rng);
      ++out_.simulations;
    }

    const MenuEntry* best = nullptr;
    for (const auto& entry : root_->menu) {
      if (entry.n == 0) continue;
      if (best == nullptr || entry.q > best->q || (entry.q == best->q && entry.n > best->n)) {
        best = &entry;
      }
    }
    PlanOutcome out = out_;
    if (best == nullptr) {
      out.starved = true;
      out.macro.actions = {rng.uniform_int(env_.action_count())};
    } else {
      out.macro = best->macro;
    }
    return out;
  }

  double simulate(Node* node, const solver::BeliefView& root_view, const State& s, int depth,
                  Rng& rng) {
    if (s.terminal || depth >= params_.max_depth) return 0.0;

    if (!node->menu_built) {
      node->menu.reserve(static_cast<std::size_t>(params_.menu_size));
      for (int i = 0; i < params_.menu_size; ++i) {
        auto sampled = sampler_.sample(root_view, s, rng);
        out_.sampler_calls += sampled.calls;
        out_.sampler_failures += sampled.failures;
        MenuEntry entry;
        entry.macro = std::move(sampled.macro);
        node->menu.push_back(std::move(entry));
      }
      node->menu_built = true;
    }

    MenuEntry* entry = nullptr;
    for (auto& e : node->menu) {
      if (e.n == 0) {
        entry = &e;
        break;
      }
    }
    if (entry == nullptr) {
      const double log_n = std::log(static_cast<double>(std::max(1, node->n)));
      double best_score = -std::numeric_limits<double>::infinity();
      for (auto& e : node->menu) {
        const double score = e.q + params_.ucb_c * std::sqrt(log_n / static_cast<double>(e.n));
        if (score > best_score) {
          best_score = score;
          entry = &e;
        }
      }
    }

    // Roll the macro through the generative model, stopping at terminals.
    State cur = s;
    double reward = 0.0;
    double disc = 1.0;
    bool terminal = false;
    MacroObservation macro_obs;
    std::size_t executed = 0;
    for (ActionId a : entry->macro.actions) {
      const StepResult step = env_.step(cur, a, rng);
      reward += disc * step.reward;
      disc *= params_.gamma;
      cur = step.next;
      ++executed;
      macro_obs.steps.push_back(observation_key(step.obs, params_.obs_resolution));
      if (step.terminal) {
        terminal = true;
        break;
      }
    }

    double ret;
    if (terminal) {
      ret = reward;
    } else {
      const double macro_disc = std::pow(params_.gamma, static_cast<double>(executed));
      const ObsKey key = macro_obs.key();
      auto it = entry->children.find(key);
      if (it == entry->children.end()) {
        entry->children.emplace(key, std::make_unique<Node>());
        ret = reward + macro_disc * rollout(cur, rng);
      } else {
        ret = reward + macro_disc * simulate(it->second.get(), root_view, cur, depth + 1, rng);
      }
    }
    node->n += 1;
    entry->n += 1;
    entry->q += (ret - entry->q) / static_cast<double>(entry->n);
    return ret;
  }

  double rollout(State s, Rng& rng) {
    double total = 0.0;
    double disc = 1.0;
    for (int depth = 0; !s.terminal && depth < params_.rollout_depth; ++depth) {
      const StepResult step = env_.step(s, rng.uniform_int(env_.action_count()), rng);
      total += disc * step.reward;
      disc *= params_.gamma;
      s = step.next;
      if (step.terminal) break;
    }
    return total;
  }

 private:
  const Environment& env_;
  solver::MacroSampler& sampler_;
  RpomcpParams params_;
  std::unique_ptr<Node> root_;
  PlanOutcome out_;
};

}  // namespace refplan::baselines
