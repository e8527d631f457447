#pragma once

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "refplan/core/belief.hpp"
#include "refplan/core/math.hpp"
#include "refplan/core/types.hpp"

namespace refplan::solver {

struct BeliefNode;

// Macro-action edge. r_hat is the running mean of sampled discounted macro
// rewards, d_hat the maintained expectation of child values weighted by
// visit counts, discounted by gamma^{macro length} in the parent backup.
struct ActionEdge {
  MacroAction macro;
  long n = 0;
  double r_hat = 0.0;
  double d_hat = 0.0;
  std::map<ObsKey, std::unique_ptr<BeliefNode>> children;
};

struct BeliefNode {
  int depth = 0;
  long n = 0;
  double w = 1.0;  // maintained expectation; exp(eta * 0) for a fresh node
  double v = 0.0;
  // Set when w left the representable range; from then on v is authoritative
  // and recomputed in log space after every backup.
  bool log_mode = false;
  std::vector<State> particles;
  const ParticleBelief* root_belief = nullptr;  // set on the root only
  std::map<MacroAction, ActionEdge> edges;

  const State& sample_particle(Rng& rng) const {
    if (root_belief != nullptr) return root_belief->sample(rng);
    if (particles.empty()) throw std::logic_error("BeliefNode: no particles to sample");
    return particles[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(particles.size())))];
  }
};

// log-space recomputation of a node's value from its edge statistics:
// V = (1/eta) [ logsumexp_a( log N(ha) + eta (R(ha) + gamma^{|a|} D(ha)) ) - log N(h) ].
inline double node_value_log_space(const BeliefNode& node, double eta, double gamma) {
  double shift = -std::numeric_limits<double>::infinity();
  for (const auto& [macro, edge] : node.edges) {
    if (edge.n == 0) continue;
    const double x = std::log(static_cast<double>(edge.n)) +
                     eta * (edge.r_hat + std::pow(gamma, static_cast<double>(edge.macro.size())) * edge.d_hat);
    shift = std::max(shift, x);
  }
  if (shift == -std::numeric_limits<double>::infinity()) return 0.0;
  double acc = 0.0;
  for (const auto& [macro, edge] : node.edges) {
    if (edge.n == 0) continue;
    const double x = std::log(static_cast<double>(edge.n)) +
                     eta * (edge.r_hat + std::pow(gamma, static_cast<double>(edge.macro.size())) * edge.d_hat);
    acc += std::exp(x - shift);
  }
  return (shift + std::log(acc) - std::log(static_cast<double>(node.n))) / eta;
}

struct TreeStats {
  long simulations = 0;
  long nodes = 1;  // root
  long sampler_calls = 0;
  long sampler_failures = 0;
  long sampler_fallbacks = 0;
  long heuristic_calls = 0;
  long heuristic_failures = 0;

  double sampler_failure_rate() const {
    return sampler_calls > 0 ? static_cast<double>(sampler_failures) / static_cast<double>(sampler_calls)
                             : 0.0;
  }
};

struct SearchTree {
  std::unique_ptr<BeliefNode> root;
  SolverParams params;
  TreeStats stats;
};

inline nlohmann::ordered_json dump_node(const BeliefNode& node) {
  nlohmann::ordered_json j;
  j["depth"] = node.depth;
  j["N"] = node.n;
  j["W"] = node.w;
  j["V"] = node.v;
  j["particles"] = node.particles.size();
  if (!node.edges.empty()) {
    nlohmann::ordered_json edges = nlohmann::ordered_json::object();
    for (const auto& [macro, edge] : node.edges) {
      nlohmann::ordered_json e;
      e["N"] = edge.n;
      e["R_hat"] = edge.r_hat;
      e["D_hat"] = edge.d_hat;
      nlohmann::ordered_json children = nlohmann::ordered_json::object();
      char key[32];
      for (const auto& [obs, child] : edge.children) {
        std::snprintf(key, sizeof key, "%016llx", static_cast<unsigned long long>(obs));
        children[key] = dump_node(*child);
      }
      e["children"] = std::move(children);
      edges[macro.str()] = std::move(e);
    }
    j["edges"] = std::move(edges);
  }
  return j;
}

// Debug/oracle dump of every maintained statistic in the tree.
inline nlohmann::ordered_json dump_tree(const SearchTree& tree) {
  nlohmann::ordered_json j;
  j["eta"] = tree.params.eta;
  j["gamma"] = tree.params.gamma;
  j["simulations"] = tree.stats.simulations;
  j["nodes"] = tree.stats.nodes;
  j["root"] = tree.root ? dump_node(*tree.root) : nlohmann::ordered_json();
  return j;
}

}  // namespace refplan::solver
