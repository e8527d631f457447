#pragma once

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "refplan/core/belief.hpp"
#include "refplan/sbmp/geometry.hpp"

namespace refplan::subgoals {

enum class HeuristicMode { uniform, distance, entropy };

inline const char* heuristic_name(HeuristicMode m) {
  switch (m) {
    case HeuristicMode::uniform: return "uniform";
    case HeuristicMode::distance: return "distance";
    default: return "entropy";
  }
}

inline HeuristicMode parse_heuristic(const std::string& name) {
  if (name == "uniform") return HeuristicMode::uniform;
  if (name == "distance") return HeuristicMode::distance;
  if (name == "entropy") return HeuristicMode::entropy;
  throw std::invalid_argument("unknown heuristic: " + name);
}

// Shannon entropy of the particle positions over a grid, normalized by the
// log cell count of the bounding box so the result lies in [0, 1].
inline double normalized_entropy(const std::vector<Config>& positions,
                                 const std::vector<double>& weights, const sbmp::AaBox& bounds,
                                 double grid_resolution) {
  if (positions.empty()) throw std::invalid_argument("normalized_entropy: empty belief");
  if (!(grid_resolution > 0.0))
    throw std::invalid_argument("normalized_entropy: resolution must be positive");

  const int dim = bounds.lo.dim;
  double total_cells = 1.0;
  std::array<std::int64_t, 3> counts{1, 1, 1};
  for (int d = 0; d < dim; ++d) {
    counts[static_cast<std::size_t>(d)] = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil((bounds.hi[d] - bounds.lo[d]) / grid_resolution)));
    total_cells *= static_cast<double>(counts[static_cast<std::size_t>(d)]);
  }
  if (total_cells <= 1.0) return 0.0;

  std::map<std::array<std::int64_t, 3>, double> mass;
  double total_w = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const double w = weights.empty() ? 1.0 : weights[i];
    if (w <= 0.0) continue;
    std::array<std::int64_t, 3> cell{0, 0, 0};
    for (int d = 0; d < dim; ++d) {
      auto c = static_cast<std::int64_t>(
          std::floor((positions[i][d] - bounds.lo[d]) / grid_resolution));
      c = std::clamp<std::int64_t>(c, 0, counts[static_cast<std::size_t>(d)] - 1);
      cell[static_cast<std::size_t>(d)] = c;
    }
    mass[cell] += w;
    total_w += w;
  }

  double h = 0.0;
  for (const auto& [cell, m] : mass) {
    const double p = m / total_w;
    if (p > 0.0) h -= p * std::log(p);
  }
  const double norm = h / std::log(total_cells);
  return std::clamp(norm, 0.0, 1.0);
}

struct SubgoalContext {
  std::vector<Config> belief_positions;
  std::vector<double> belief_weights;
  Config current;
  std::vector<Config> goals;
  std::vector<Config> informative;
  sbmp::AaBox bounds;
  double goal_prob = 0.5;
  double grid_resolution = 2.0;
  double distance_floor = 1e-3;
};

namespace detail {

inline Config pick_goal(const SubgoalContext& ctx, Rng& rng) {
  if (ctx.goals.empty()) throw std::invalid_argument("sample_subgoal: no goal configurations");
  return ctx.goals[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(ctx.goals.size())))];
}

// Informative configuration weighted by inverse distance from the current
// configuration (closer landmarks are preferred).
inline Config pick_informative_by_distance(const SubgoalContext& ctx, Rng& rng) {
  std::vector<double> w(ctx.informative.size());
  double total = 0.0;
  for (std::size_t i = 0; i < ctx.informative.size(); ++i) {
    w[i] = 1.0 / (distance(ctx.current, ctx.informative[i]) + ctx.distance_floor);
    total += w[i];
  }
  double u = rng.uniform01() * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    u -= w[i];
    if (u < 0.0) return ctx.informative[i];
  }
  return ctx.informative.back();
}

}  // namespace detail

// Subgoal selection for the reference policy. All modes collapse to the goal
// when there is nothing informative to visit.
inline Config sample_subgoal(HeuristicMode mode, const SubgoalContext& ctx, Rng& rng) {
  if (ctx.informative.empty()) return detail::pick_goal(ctx, rng);

  switch (mode) {
    case HeuristicMode::uniform: {
      if (rng.bernoulli(ctx.goal_prob)) return detail::pick_goal(ctx, rng);
      return ctx.informative[static_cast<std::size_t>(
          rng.uniform_int(static_cast<int>(ctx.informative.size())))];
    }
    case HeuristicMode::distance: {
      if (rng.bernoulli(ctx.goal_prob)) return detail::pick_goal(ctx, rng);
      return detail::pick_informative_by_distance(ctx, rng);
    }
    case HeuristicMode::entropy: {
      const double h = normalized_entropy(ctx.belief_positions, ctx.belief_weights, ctx.bounds,
                                          ctx.grid_resolution);
      if (ctx.goals.empty() && h < 1.0)
        throw std::invalid_argument("sample_subgoal: entropy mode needs goals");
      if (rng.bernoulli(1.0 - h)) return detail::pick_goal(ctx, rng);
      return detail::pick_informative_by_distance(ctx, rng);
    }
  }
  throw std::logic_error("sample_subgoal: unknown mode");
}

// Epsilon-greedy exploration wrapper: with probability epsilon the subgoal is
// a uniformly drawn collision-free configuration instead of the heuristic's.
template <typename Inner>
Config epsilon_wrap(double epsilon, const sbmp::Workspace& world, Rng& rng, Inner&& inner) {
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon_wrap: epsilon in [0,1]");
  if (epsilon > 0.0 && rng.bernoulli(epsilon)) return world.sample_valid(rng);
  return inner(rng);
}

// Joint-pursuit subgoal assignment for one hypothesized joint state: the
// drone closest to the target position is tasked with it, every other drone
// gets a uniformly drawn free configuration. Ties go to the lowest index.
// Joint layout: [drone_0 xyz, ..., drone_{n-1} xyz, target xyz].
inline std::vector<Config> assign_drone_subgoals(const State& joint, int num_drones,
                                                 const sbmp::Workspace& per_drone_world, Rng& rng) {
  const auto need = static_cast<std::size_t>(3 * (num_drones + 1));
  if (joint.values.size() < need) throw std::invalid_argument("drone_subgoals: bad joint state");

  const Config target = Config::xyz(joint.values[need - 3], joint.values[need - 2],
                                    joint.values[need - 1]);
  int nearest = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < num_drones; ++i) {
    const auto base = static_cast<std::size_t>(3 * i);
    const Config pos = Config::xyz(joint.values[base], joint.values[base + 1], joint.values[base + 2]);
    const double d = distance(pos, target);
    if (d < best) {
      best = d;
      nearest = i;
    }
  }

  std::vector<Config> subgoals(static_cast<std::size_t>(num_drones));
  for (int i = 0; i < num_drones; ++i) {
    subgoals[static_cast<std::size_t>(i)] =
        (i == nearest) ? target : per_drone_world.sample_valid(rng);
  }
  return subgoals;
}

// Belief-level wrapper: hypothesize by sampling one joint state.
inline std::vector<Config> drone_subgoals(const ParticleBelief& belief, int num_drones,
                                          const sbmp::Workspace& per_drone_world, Rng& rng) {
  return assign_drone_subgoals(belief.sample(rng), num_drones, per_drone_world, rng);
}

}  // namespace refplan::subgoals
