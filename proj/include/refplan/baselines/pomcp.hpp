#pragma once

#include <chrono>
#include <cmath>
#include <map>
#include <memory>

#include "refplan/core/belief.hpp"
#include "refplan/core/env.hpp"

namespace refplan::baselines {

struct PomcpParams {
  double gamma = 0.99;
  double ucb_c = 100.0;  // exploration constant, scaled to the reward span
  int max_depth = 60;    // primitive horizon for both tree and rollouts
  double obs_resolution = 1.0;

  void validate() const {
    if (gamma <= 0.0 || gamma >= 1.0) throw std::invalid_argument("pomcp: gamma in (0,1)");
    if (ucb_c < 0.0) throw std::invalid_argument("pomcp: ucb_c >= 0");
    if (max_depth < 1) throw std::invalid_argument("pomcp: max_depth >= 1");
    if (obs_resolution <= 0.0) throw std::invalid_argument("pomcp: obs_resolution > 0");
  }
};

// Monte Carlo tree search over primitive actions with UCB1 action selection,
// sample-mean Q backups, and uniform-random rollouts from newly expanded
// nodes. Each planning cycle builds a fresh tree from the current belief and
// returns the primitive action with the highest Q estimate.
class Pomcp {
 public:
  struct Node;
  struct Edge {
    int n = 0;
    double q = 0.0;
    std::map<ObsKey, std::unique_ptr<Node>> children;
  };
  struct Node {
    int n = 0;
    int tried = 0;  // next untried action id; actions are tried in id order
    std::map<ActionId, Edge> edges;
  };

  struct PlanOutcome {
    ActionId action = 0;
    int simulations = 0;
    bool starved = false;
  };

  Pomcp(const Environment& env, PomcpParams params) : env_(env), params_(params) {
    params_.validate();
  }

  const Node* root() const { return root_.get(); }

  PlanOutcome plan(const ParticleBelief& belief, Budget budget, Rng& rng) {
    root_ = std::make_unique<Node>();
    PlanOutcome out;
    if (belief.all_terminal()) {
      out.starved = true;
      out.action = rng.uniform_int(env_.action_count());
      return out;
    }
    const auto start = std::chrono::steady_clock::now();
    for (;;) {
      if (budget.mode == Budget::Mode::simulations) {
        if (out.simulations >= budget.simulations) break;
      } else {
        const auto elapsed =
            std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);
        if (static_cast<double>(elapsed.count()) >= budget.ms) break;
      }
      State s = belief.sample(rng);
      if (s.terminal) continue;
      simulate(root_.get(), s, 0, rng);
      ++out.simulations;
    }

    const Edge* best = nullptr;
    ActionId best_action = 0;
    for (const auto& [a, edge] : root_->edges) {
      if (edge.n == 0) continue;
      if (best == nullptr || edge.q > best->q || (edge.q == best->q && edge.n > best->n)) {
        best = &edge;
        best_action = a;
      }
    }
    if (best == nullptr) {
      out.starved = true;
      out.action = rng.uniform_int(env_.action_count());
    } else {
      out.action = best_action;
    }
    return out;
  }

  double simulate(Node* node, const State& s, int depth, Rng& rng) {
    if (s.terminal || depth >= params_.max_depth) return 0.0;

    ActionId a;
    if (node->tried < env_.action_count()) {
      a = node->tried++;
    } else {
      const double log_n = std::log(static_cast<double>(std::max(1, node->n)));
      double best_score = -std::numeric_limits<double>::infinity();
      a = 0;
      for (const auto& [act, edge] : node->edges) {
        const double score =
            edge.q + params_.ucb_c * std::sqrt(log_n / static_cast<double>(edge.n));
        if (score > best_score) {
          best_score = score;
          a = act;
        }
      }
    }

    const StepResult step = env_.step(s, a, rng);
    Edge& edge = node->edges[a];
    double ret;
    if (step.terminal) {
      ret = step.reward;
    } else {
      const ObsKey key = observation_key(step.obs, params_.obs_resolution);
      auto it = edge.children.find(key);
      if (it == edge.children.end()) {
        edge.children.emplace(key, std::make_unique<Node>());
        ret = step.reward + params_.gamma * rollout(step.next, depth + 1, rng);
      } else {
        ret = step.reward + params_.gamma * simulate(it->second.get(), step.next, depth + 1, rng);
      }
    }
    node->n += 1;
    edge.n += 1;
    edge.q += (ret - edge.q) / static_cast<double>(edge.n);
    return ret;
  }

  double rollout(State s, int depth, Rng& rng) {
    double total = 0.0;
    double disc = 1.0;
    while (!s.terminal && depth < params_.max_depth) {
      const StepResult step = env_.step(s, rng.uniform_int(env_.action_count()), rng);
      total += disc * step.reward;
      disc *= params_.gamma;
      s = step.next;
      if (step.terminal) break;
      ++depth;
    }
    return total;
  }

 private:
  const Environment& env_;
  PomcpParams params_;
  std::unique_ptr<Node> root_;
};

}  // namespace refplan::baselines
