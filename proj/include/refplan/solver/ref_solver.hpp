#pragma once

#include <chrono>
#include <cmath>
#include <memory>

#include "refplan/core/env.hpp"
#include "refplan/core/math.hpp"
#include "refplan/solver/heuristic.hpp"
#include "refplan/solver/sampler.hpp"
#include "refplan/solver/tree.hpp"

namespace refplan::solver {

// Test hook recording the raw samples behind every maintained statistic, so a
// shadow recomputation can audit the incremental updates.
class SolverObserver {
 public:
  virtual ~SolverObserver() = default;
  virtual void on_backup(const BeliefNode&, const MacroAction&, ObsKey, double) {}
  virtual void on_leaf_visit(const BeliefNode&, double) {}
  virtual void on_terminal_sample(const BeliefNode&) {}
};

struct PlanResult {
  SearchTree tree;
  bool starved = false;
};

// Anytime belief-tree solver over sampled macro actions. Each simulation
// draws a state from the node's particles, asks the reference policy for a
// macro, rolls the generative model through it, and maintains the soft
// (log-sum-exp) Bellman statistics along the sampled path.
class RefSolver {
 public:
  RefSolver(const Environment& env, MacroSampler& sampler, ValueHeuristic& heuristic,
            SolverParams params)
      : env_(env), sampler_(sampler), heuristic_(heuristic), params_(params) {
    params_.validate();
  }

  const SolverParams& params() const { return params_; }
  void set_observer(SolverObserver* obs) { observer_ = obs; }

  PlanResult plan(const ParticleBelief& root_belief, const Budget& budget, Rng& rng,
                  std::unique_ptr<BeliefNode> reuse_root = nullptr) {
    PlanResult result;
    result.tree.params = params_;
    if (reuse_root) {
      rebase_depth(*reuse_root, reuse_root->depth);
      result.tree.root = std::move(reuse_root);
      result.tree.stats.nodes = count_nodes(*result.tree.root);
    } else {
      result.tree.root = std::make_unique<BeliefNode>();
    }
    result.tree.root->root_belief = &root_belief;
    tree_ = &result.tree;

    const auto t0 = std::chrono::steady_clock::now();
    for (;;) {
      if (budget.mode == Budget::Mode::simulations) {
        if (result.tree.stats.simulations >= budget.simulations) break;
      } else {
        const double elapsed =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        if (elapsed >= budget.ms) break;
      }
      simulate(*result.tree.root, rng);
      ++result.tree.stats.simulations;
    }

    tree_ = nullptr;
    result.starved = result.tree.stats.simulations == 0;
    return result;
  }

  // One root-to-leaf simulation pass; exposed for the statistics tests.
  double simulate(BeliefNode& node, Rng& rng) {
    const State& s = node.sample_particle(rng);

    if (s.terminal) {
      if (observer_) observer_->on_terminal_sample(node);
      return 0.0;
    }

    if (node.depth > params_.max_depth) {
      const auto h = heuristic_.evaluate(s, rng);
      if (tree_) {
        tree_->stats.heuristic_calls += h.sbmp_calls;
        tree_->stats.heuristic_failures += h.sbmp_failures;
      }
      node.n += 1;
      node.v += (h.value - node.v) / static_cast<double>(node.n);
      node.w = std::exp(params_.eta * node.v);
      if (observer_) observer_->on_leaf_visit(node, h.value);
      return h.value;
    }

    auto sampled = sampler_.sample(belief_view(node), s, rng);
    if (tree_) {
      tree_->stats.sampler_calls += sampled.calls;
      tree_->stats.sampler_failures += sampled.failures;
      tree_->stats.sampler_fallbacks += sampled.fallback ? 1 : 0;
    }

    // Roll the generative model through the macro (early stop on terminal).
    State cur = s;
    std::vector<double> rewards;
    MacroObservation obs;
    rewards.reserve(sampled.macro.size());
    obs.steps.reserve(sampled.macro.size());
    for (ActionId a : sampled.macro.actions) {
      const StepResult sr = env_.step(cur, a, rng);
      rewards.push_back(sr.reward);
      obs.steps.push_back(observation_key(sr.obs, params_.obs_resolution));
      cur = sr.next;
      if (sr.terminal) break;
    }
    const double r = discounted_macro_reward(rewards, params_.gamma);

    auto [edge_it, edge_created] = node.edges.try_emplace(sampled.macro);
    ActionEdge& edge = edge_it->second;
    if (edge_created) edge.macro = sampled.macro;

    const ObsKey okey = obs.key();
    auto child_it = edge.children.find(okey);
    if (child_it == edge.children.end()) {
      auto child = std::make_unique<BeliefNode>();
      child->depth = node.depth + 1;
      child_it = edge.children.emplace(okey, std::move(child)).first;
      if (tree_) ++tree_->stats.nodes;
    }
    child_it->second->particles.push_back(cur);

    if (observer_) observer_->on_backup(node, sampled.macro, okey, r);
    return maintain_expectation(node, edge, *child_it->second, r, rng);
  }

  // Incremental update of (N, R_hat, D_hat, W, V) along one sampled branch:
  //   w <- N(h) W(h) - N(ha) exp(eta [R(ha) + gamma^{|a|} D(ha)])
  //   p <- N(ha) D(ha) - N(hao) V(hao)
  //   N(ha) += 1;  R(ha) += (r - R(ha)) / N(ha)
  //   recurse into the child, then
  //   D(ha) <- (p + N(hao) V(hao)) / N(ha)
  //   W(h) <- (w + N(ha) exp(eta [R(ha) + gamma^{|a|} D(ha)])) / N(h)
  // The child statistics are read after the recursive call, so the branch
  // contribution is always count * current-estimate.
  double maintain_expectation(BeliefNode& node, ActionEdge& edge, BeliefNode& child, double r,
                              Rng& rng) {
    const double eta = params_.eta;
    const double disc = std::pow(params_.gamma, static_cast<double>(edge.macro.size()));

    double w_partial = 0.0;
    if (!node.log_mode)
      w_partial = static_cast<double>(node.n) * node.w -
                  static_cast<double>(edge.n) * std::exp(eta * (edge.r_hat + disc * edge.d_hat));

    const double p =
        static_cast<double>(edge.n) * edge.d_hat - static_cast<double>(child.n) * child.v;

    edge.n += 1;
    edge.r_hat += (r - edge.r_hat) / static_cast<double>(edge.n);

    simulate(child, rng);

    edge.d_hat =
        (p + static_cast<double>(child.n) * child.v) / static_cast<double>(edge.n);
    node.n += 1;

    if (!node.log_mode) {
      node.w = (w_partial + static_cast<double>(edge.n) * std::exp(eta * (edge.r_hat + disc * edge.d_hat))) /
               static_cast<double>(node.n);
      if (!std::isfinite(node.w) || node.w <= 0.0) node.log_mode = true;
    }
    if (node.log_mode) {
      node.v = node_value_log_space(node, eta, params_.gamma);
      node.w = std::exp(eta * node.v);
    } else {
      node.v = std::log(node.w) / eta;
    }
    return node.v;
  }

 private:
  static BeliefView belief_view(const BeliefNode& node) {
    BeliefView view;
    if (node.root_belief != nullptr)
      view.weighted = node.root_belief;
    else
      view.particles = &node.particles;
    return view;
  }

  static void rebase_depth(BeliefNode& node, int offset) {
    node.depth -= offset;
    for (auto& [macro, edge] : node.edges)
      for (auto& [obs, child] : edge.children) rebase_depth(*child, offset);
  }

  static long count_nodes(const BeliefNode& node) {
    long total = 1;
    for (const auto& [macro, edge] : node.edges)
      for (const auto& [obs, child] : edge.children) total += count_nodes(*child);
    return total;
  }

  const Environment& env_;
  MacroSampler& sampler_;
  ValueHeuristic& heuristic_;
  SolverParams params_;
  SolverObserver* observer_ = nullptr;
  SearchTree* tree_ = nullptr;
};

// Score used for root action selection: log N(ha) + eta (R_hat + gamma^{|a|} D_hat),
// the log of the soft-policy weight.
inline double edge_score(const ActionEdge& edge, double eta, double gamma) {
  return std::log(static_cast<double>(edge.n)) +
         eta * (edge.r_hat + std::pow(gamma, static_cast<double>(edge.macro.size())) * edge.d_hat);
}

// Mode of the soft policy at the root; ties broken by higher visit count,
// then by lower macro-action id (map order).
inline const ActionEdge& select_root_action(const SearchTree& tree) {
  if (!tree.root || tree.root->edges.empty())
    throw std::runtime_error("select_root_action: tree has no root children");
  const ActionEdge* best = nullptr;
  double best_score = 0.0;
  for (const auto& [macro, edge] : tree.root->edges) {
    if (edge.n == 0) continue;
    const double score = edge_score(edge, tree.params.eta, tree.params.gamma);
    if (best == nullptr || score > best_score || (score == best_score && edge.n > best->n)) {
      best = &edge;
      best_score = score;
    }
  }
  if (best == nullptr) throw std::runtime_error("select_root_action: no visited edges");
  return *best;
}

// Draw from the soft policy at the root instead of taking its mode.
inline const ActionEdge& sample_root_action(const SearchTree& tree, Rng& rng) {
  if (!tree.root || tree.root->edges.empty())
    throw std::runtime_error("sample_root_action: tree has no root children");
  std::vector<const ActionEdge*> edges;
  std::vector<double> scores;
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& [macro, edge] : tree.root->edges) {
    if (edge.n == 0) continue;
    edges.push_back(&edge);
    scores.push_back(edge_score(edge, tree.params.eta, tree.params.gamma));
    shift = std::max(shift, scores.back());
  }
  if (edges.empty()) throw std::runtime_error("sample_root_action: no visited edges");
  double total = 0.0;
  for (double& s : scores) {
    s = std::exp(s - shift);
    total += s;
  }
  double u = rng.uniform01() * total;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    u -= scores[i];
    if (u < 0.0) return *edges[i];
  }
  return *edges.back();
}

// Detach the subtree reached by executing `macro` and observing `obs`, for
// root reuse across planning cycles.
inline std::unique_ptr<BeliefNode> extract_subtree(SearchTree& tree, const MacroAction& macro,
                                                   ObsKey obs) {
  if (!tree.root) return nullptr;
  auto edge_it = tree.root->edges.find(macro);
  if (edge_it == tree.root->edges.end()) return nullptr;
  auto child_it = edge_it->second.children.find(obs);
  if (child_it == edge_it->second.children.end()) return nullptr;
  auto subtree = std::move(child_it->second);
  edge_it->second.children.erase(child_it);
  subtree->root_belief = nullptr;
  return subtree;
}

}  // namespace refplan::solver
