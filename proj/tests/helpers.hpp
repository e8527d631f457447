#pragma once

// Shared fixtures and independent oracles for the test suite. Everything here
// recomputes expected values from first principles, separately from the
// library's incremental implementations.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "refplan/refplan.hpp"

namespace testutil {

using namespace refplan;

// ---------------------------------------------------------------------------
// numeric comparisons

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool close_rel(double a, double b, double tol) { return rel_err(a, b) <= tol; }

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return xs.empty() ? 0.0 : s / static_cast<double>(xs.size());
}

inline double sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

// Binomial frequency check: |count/n - p| <= k * sqrt(p(1-p)/n).
inline bool freq_within_sigma(long count, long n, double p, double k) {
  const double phat = static_cast<double>(count) / static_cast<double>(n);
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  return std::abs(phat - p) <= k * sigma;
}

// ---------------------------------------------------------------------------
// brute-force segment validation oracle: dense sampling far below the
// implementation's resolution

inline bool segment_free_dense(const sbmp::Workspace& world, const Config& a, const Config& b,
                               int samples) {
  for (int i = 0; i <= samples; ++i) {
    const double t = static_cast<double>(i) / samples;
    if (!world.is_valid(lerp(a, b, t))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// lattice BFS reachability certifier for cardinal-motion workspaces

struct BfsResult {
  bool reachable = false;
  int steps = -1;
};

template <typename GoalFn, typename ValidFn>
inline BfsResult lattice_bfs(const Config& start, double step, ValidFn valid, GoalFn in_goal,
                             int max_cells = 2000000) {
  const int dim = start.dim;
  using Cell = std::array<int, 3>;
  auto to_config = [&](const Cell& c) {
    Config q = start;
    for (int d = 0; d < dim; ++d) q[d] = start[d] + step * c[static_cast<std::size_t>(d)];
    return q;
  };
  std::set<Cell> seen;
  std::deque<std::pair<Cell, int>> frontier;
  const Cell origin{0, 0, 0};
  if (!valid(start)) return {};
  seen.insert(origin);
  frontier.emplace_back(origin, 0);
  while (!frontier.empty()) {
    auto [cell, dist] = frontier.front();
    frontier.pop_front();
    const Config q = to_config(cell);
    if (in_goal(q)) return {true, dist};
    if (static_cast<int>(seen.size()) > max_cells) break;
    for (int d = 0; d < dim; ++d) {
      for (int sgn : {1, -1}) {
        Cell next = cell;
        next[static_cast<std::size_t>(d)] += sgn;
        if (seen.count(next)) continue;
        if (!valid(to_config(next))) continue;
        seen.insert(next);
        frontier.emplace_back(next, dist + 1);
      }
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// tiny two-state POMDP with an exact finite-horizon soft value oracle

// States 0 and 1 (values[0]); two actions; two observations (read1(0), read1(1)).
// trans[s][a] is the probability the next state is 0; obs0[s'] the probability
// of observing symbol 0 from next state s'; reward[s][a] is deterministic.
class TinyPomdp : public Environment {
 public:
  std::array<std::array<double, 2>, 2> trans{{{0.9, 0.3}, {0.2, 0.7}}};
  std::array<double, 2> obs0{0.85, 0.25};
  std::array<std::array<double, 2>, 2> reward{{{1.0, 0.0}, {-0.5, 2.0}}};

  int action_count() const override { return 2; }
  int state_dim() const override { return 1; }

  StepResult step(const State& s, ActionId a, Rng& rng) const override {
    StepResult r;
    if (s.terminal) {
      r.next = s;
      r.obs = Observation::null();
      return r;
    }
    const int si = state_index(s);
    r.reward = reward[static_cast<std::size_t>(si)][static_cast<std::size_t>(a)];
    const int ni = rng.bernoulli(trans[static_cast<std::size_t>(si)][static_cast<std::size_t>(a)]) ? 0 : 1;
    r.next.values = {static_cast<double>(ni)};
    const int oi = rng.bernoulli(obs0[static_cast<std::size_t>(ni)]) ? 0 : 1;
    r.obs = Observation::read1(static_cast<double>(oi));
    return r;
  }

  double observation_likelihood(const Observation& o, const State& next, ActionId) const override {
    if (o.kind != ObsKind::reading) return 0.0;
    const int ni = state_index(next);
    const double p0 = obs0[static_cast<std::size_t>(ni)];
    return obs_index(o) == 0 ? p0 : 1.0 - p0;
  }

  RewardSchedule rewards() const override { return RewardSchedule{0.0, 2.0, -0.5}; }

  static int state_index(const State& s) { return s.values[0] < 0.5 ? 0 : 1; }
  static int obs_index(const Observation& o) { return o.value[0] < 0.5 ? 0 : 1; }
};

// Exact soft value over the scalar belief b = P(state 0):
//   V_d(b) = (1/eta) log sum_a ref(a) exp(eta [R(b,a) + gamma sum_o P(o|b,a) V_{d+1}(tau(b,a,o))])
// with V_d = 0 once d exceeds max_depth, matching a zero-valued leaf heuristic.
inline double tiny_soft_value(const TinyPomdp& env, double b, int depth, int max_depth,
                              double gamma, double eta, const std::array<double, 2>& ref) {
  if (depth > max_depth) return 0.0;
  std::vector<double> weights(2), scores(2);
  for (int a = 0; a < 2; ++a) {
    const auto au = static_cast<std::size_t>(a);
    const double r = b * env.reward[0][au] + (1.0 - b) * env.reward[1][au];
    const double pn0 = b * env.trans[0][au] + (1.0 - b) * env.trans[1][au];
    double future = 0.0;
    for (int o = 0; o < 2; ++o) {
      const double z0 = o == 0 ? env.obs0[0] : 1.0 - env.obs0[0];
      const double z1 = o == 0 ? env.obs0[1] : 1.0 - env.obs0[1];
      const double po = pn0 * z0 + (1.0 - pn0) * z1;
      if (po <= 0.0) continue;
      const double bn = pn0 * z0 / po;
      future += po * tiny_soft_value(env, bn, depth + 1, max_depth, gamma, eta, ref);
    }
    weights[au] = ref[au];
    scores[au] = eta * (r + gamma * future);
  }
  return log_sum_exp_weighted(weights, scores) / eta;
}

// Reference macro sampler for TinyPomdp: single-step macros drawn from ref.
inline solver::FunctionSampler tiny_ref_sampler(double p_action0) {
  return solver::FunctionSampler([p_action0](const solver::BeliefView&, const State&, Rng& rng) {
    solver::MacroSampleResult r;
    r.macro.actions.push_back(rng.bernoulli(p_action0) ? 0 : 1);
    return r;
  });
}

// ---------------------------------------------------------------------------
// shadow recomputation of the maintained tree statistics
//
// The observer records the raw samples (macro rewards per edge, heuristic
// values per leaf). recompute_tree then rebuilds every N, R_hat, D_hat, V and
// W from those samples and the final tree shape, entirely ignoring the
// incrementally maintained numbers, and reports the worst relative mismatch.

struct RecordingObserver : solver::SolverObserver {
  std::map<std::pair<const solver::BeliefNode*, MacroAction>, std::vector<double>> edge_rewards;
  std::map<const solver::BeliefNode*, std::vector<double>> leaf_values;
  long terminal_samples = 0;

  void on_backup(const solver::BeliefNode& node, const MacroAction& macro, ObsKey,
                 double r) override {
    edge_rewards[{&node, macro}].push_back(r);
  }
  void on_leaf_visit(const solver::BeliefNode& leaf, double value) override {
    leaf_values[&leaf].push_back(value);
  }
  void on_terminal_sample(const solver::BeliefNode&) override { ++terminal_samples; }
};

struct RecomputeReport {
  double max_rel_err = 0.0;
  long nodes_checked = 0;
  bool structure_ok = true;

  void note(double got, double want) { max_rel_err = std::max(max_rel_err, rel_err(got, want)); }
  void require(bool ok) { structure_ok = structure_ok && ok; }
};

struct NodeRecompute {
  long n = 0;
  double v = 0.0;
};

inline NodeRecompute recompute_node(const solver::BeliefNode& node, const RecordingObserver& log,
                                    double eta, double gamma, RecomputeReport& report) {
  ++report.nodes_checked;
  NodeRecompute out;

  if (node.edges.empty()) {
    const auto it = log.leaf_values.find(&node);
    if (it != log.leaf_values.end()) {
      out.n = static_cast<long>(it->second.size());
      out.v = mean_of(it->second);
    }
    report.require(out.n == node.n);
    report.note(node.v, out.v);
    if (!node.log_mode) report.note(node.w, std::exp(eta * out.v));
    return out;
  }

  // interior: a node is either a leaf or interior on trees built without
  // subtree reuse, never both
  report.require(log.leaf_values.find(&node) == log.leaf_values.end());

  std::vector<double> ws, xs;
  long n_total = 0;
  for (const auto& [macro, edge] : node.edges) {
    const auto it = log.edge_rewards.find({&node, macro});
    const long n_edge = it == log.edge_rewards.end() ? 0 : static_cast<long>(it->second.size());
    report.require(n_edge == edge.n);

    double sum_nv = 0.0;
    for (const auto& [okey, child] : edge.children) {
      const NodeRecompute c = recompute_node(*child, log, eta, gamma, report);
      sum_nv += static_cast<double>(c.n) * c.v;
    }
    if (n_edge == 0) continue;

    const double r_hat = mean_of(it->second);
    const double d_hat = sum_nv / static_cast<double>(n_edge);
    report.note(edge.r_hat, r_hat);
    report.note(edge.d_hat, d_hat);

    const double disc = std::pow(gamma, static_cast<double>(macro.size()));
    ws.push_back(static_cast<double>(n_edge));
    xs.push_back(eta * (r_hat + disc * d_hat));
    n_total += n_edge;
  }

  report.require(n_total == node.n);
  out.n = n_total;
  if (n_total == 0) return out;

  out.v = (log_sum_exp_weighted(ws, xs) - std::log(static_cast<double>(n_total))) / eta;
  report.note(node.v, out.v);
  if (!node.log_mode) report.note(node.w, std::exp(eta * out.v));
  return out;
}

inline RecomputeReport recompute_tree(const solver::BeliefNode& root, const RecordingObserver& log,
                                      double eta, double gamma) {
  RecomputeReport report;
  recompute_node(root, log, eta, gamma, report);
  return report;
}

// ---------------------------------------------------------------------------
// two-armed bandit environment for baseline sanity tests: each action leads
// straight to a terminal state with a fixed reward

class BanditEnv : public Environment {
 public:
  std::array<double, 2> payout{1.0, 0.0};

  int action_count() const override { return 2; }
  int state_dim() const override { return 1; }

  StepResult step(const State& s, ActionId a, Rng&) const override {
    StepResult r;
    if (s.terminal) {
      r.next = s;
      r.obs = Observation::null();
      return r;
    }
    r.reward = payout[static_cast<std::size_t>(a)];
    r.next.values = {1.0};
    r.next.terminal = true;
    r.terminal = true;
    r.outcome = TerminalKind::goal;
    r.obs = Observation::null();
    return r;
  }

  double observation_likelihood(const Observation& o, const State&, ActionId) const override {
    return o.kind == ObsKind::null_obs ? 1.0 : 0.0;
  }

  RewardSchedule rewards() const override { return RewardSchedule{0.0, 1.0, 0.0}; }
};

inline ParticleBelief fresh_belief(int n, double value = 0.0) {
  std::vector<State> states(static_cast<std::size_t>(n));
  for (auto& s : states) s.values = {value};
  return ParticleBelief::equal_weight(std::move(states));
}

}  // namespace testutil
