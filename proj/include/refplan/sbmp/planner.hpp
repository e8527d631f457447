#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <vector>

#include "refplan/sbmp/geometry.hpp"
#include "refplan/sbmp/validate.hpp"

namespace refplan::sbmp {

using Path = std::vector<Config>;

struct PlannerParams {
  double step_extend = 1.0;          // tree extension step
  double validation_resolution = 0.25;
  int batch_width = 8;
  int max_iterations = 4000;
  double time_limit_ms = 0.0;        // 0 disables the clock: iteration-bounded, deterministic
  int simplify_rounds = 32;

  ValidateParams validate() const { return ValidateParams{validation_resolution, batch_width}; }
};

// Conventional defaults tied to the environment's primitive step.
inline PlannerParams planner_params_for_step(double step_size) {
  PlannerParams p;
  p.step_extend = 2.0 * step_size;
  p.validation_resolution = 0.25 * step_size;
  return p;
}

enum class PlanFailure { none, invalid_endpoint, timeout };

struct PathResult {
  std::optional<Path> path;
  PlanFailure failure = PlanFailure::none;

  bool ok() const { return path.has_value(); }
};

inline double path_length(const Path& p) {
  double len = 0.0;
  for (std::size_t i = 1; i < p.size(); ++i) len += distance(p[i - 1], p[i]);
  return len;
}

inline bool validate_path(const Workspace& world, const Path& p, const ValidateParams& params) {
  if (p.empty()) return false;
  if (!world.is_valid(p.front())) return false;
  for (std::size_t i = 1; i < p.size(); ++i)
    if (!validate_motion(world, p[i - 1], p[i], params)) return false;
  return true;
}

namespace detail {

// Motion acceptance for the planner. The batched sampled check rejects
// cheaply; the exact segment test certifies the survivors, so an accepted
// motion is clear at every interpolated point and the final path re-validates
// at any sampling resolution, not just the one it was planned at.
inline bool motion_ok(const Workspace& world, const Config& a, const Config& b,
                      const PlannerParams& params) {
  return validate_motion(world, a, b, params.validate()) && motion_clear_exact(world, a, b);
}

}  // namespace detail

// Random shortcutting: repeatedly try to splice a straight segment between
// two random waypoints, then drop interior waypoints that a direct motion
// makes redundant. Length never increases.
inline Path simplify_path(const Workspace& world, Path path, const PlannerParams& params, Rng& rng) {
  if (path.size() <= 2) return path;

  for (int round = 0; round < params.simplify_rounds && path.size() > 2; ++round) {
    const int n = static_cast<int>(path.size());
    int i = rng.uniform_int(n - 1);
    int j = rng.uniform_int(n);
    if (i > j) std::swap(i, j);
    if (j - i < 2) continue;
    if (detail::motion_ok(world, path[static_cast<std::size_t>(i)], path[static_cast<std::size_t>(j)], params))
      path.erase(path.begin() + i + 1, path.begin() + j);
  }

  // Deterministic prune pass.
  Path pruned;
  pruned.push_back(path.front());
  std::size_t anchor = 0;
  for (std::size_t k = 1; k + 1 < path.size(); ++k) {
    if (!detail::motion_ok(world, path[anchor], path[k + 1], params)) {
      pruned.push_back(path[k]);
      anchor = k;
    }
  }
  pruned.push_back(path.back());
  return pruned;
}

namespace detail {

struct Tree {
  std::vector<Config> nodes;
  std::vector<int> parent;

  int add(const Config& q, int par) {
    nodes.push_back(q);
    parent.push_back(par);
    return static_cast<int>(nodes.size()) - 1;
  }

  int nearest(const Config& q) const {
    int best = 0;
    double best_d = distance(nodes[0], q);
    for (std::size_t i = 1; i < nodes.size(); ++i) {
      const double d = distance(nodes[i], q);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(i);
      }
    }
    return best;
  }
};

enum class Extend { trapped, advanced, reached };

inline Extend extend_tree(const Workspace& world, Tree& tree, const Config& target,
                          const PlannerParams& params, int& out_node) {
  const int near = tree.nearest(target);
  const Config& q_near = tree.nodes[static_cast<std::size_t>(near)];
  const double d = distance(q_near, target);
  Config q_new = target;
  bool reached = true;
  if (d > params.step_extend) {
    q_new = lerp(q_near, target, params.step_extend / d);
    reached = false;
  }
  if (!world.is_valid(q_new) || !motion_ok(world, q_near, q_new, params))
    return Extend::trapped;
  out_node = tree.add(q_new, near);
  return reached ? Extend::reached : Extend::advanced;
}

inline Path extract(const Tree& tree, int node) {
  Path p;
  for (int cur = node; cur >= 0; cur = tree.parent[static_cast<std::size_t>(cur)])
    p.push_back(tree.nodes[static_cast<std::size_t>(cur)]);
  std::reverse(p.begin(), p.end());
  return p;
}

}  // namespace detail

// Bidirectional RRT-Connect. A direct-connection precheck handles the common
// open-space query without growing trees. Deterministic for a fixed seed when
// time_limit_ms is 0.
inline PathResult rrt_connect(const Workspace& world, const Config& start, const Config& goal,
                              const PlannerParams& params, Rng& rng) {
  if (!world.is_valid(start) || !world.is_valid(goal))
    return {std::nullopt, PlanFailure::invalid_endpoint};

  if (detail::motion_ok(world, start, goal, params)) {
    if (start == goal) return {Path{start}, PlanFailure::none};
    return {Path{start, goal}, PlanFailure::none};
  }

  const auto t0 = std::chrono::steady_clock::now();
  detail::Tree a, b;
  a.add(start, -1);
  b.add(goal, -1);
  bool swapped = false;  // true when `a` is the goal tree

  for (int iter = 0; iter < params.max_iterations; ++iter) {
    if (params.time_limit_ms > 0.0) {
      const double elapsed =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      if (elapsed > params.time_limit_ms) return {std::nullopt, PlanFailure::timeout};
    }

    Config q_rand;
    q_rand.dim = world.dim();
    for (int d = 0; d < q_rand.dim; ++d)
      q_rand[d] = rng.uniform(world.bounds.lo[d], world.bounds.hi[d]);

    int new_a = -1;
    if (detail::extend_tree(world, a, q_rand, params, new_a) != detail::Extend::trapped) {
      const Config& bridge = a.nodes[static_cast<std::size_t>(new_a)];
      int new_b = -1;
      detail::Extend status = detail::Extend::advanced;
      while (status == detail::Extend::advanced)
        status = detail::extend_tree(world, b, bridge, params, new_b);
      if (status == detail::Extend::reached) {
        Path pa = detail::extract(a, new_a);
        Path pb = detail::extract(b, new_b);
        std::reverse(pb.begin(), pb.end());
        // pa ends at the bridge configuration, pb starts there.
        pa.insert(pa.end(), pb.begin() + 1, pb.end());
        if (swapped) std::reverse(pa.begin(), pa.end());
        return {simplify_path(world, std::move(pa), params, rng), PlanFailure::none};
      }
    }
    std::swap(a, b);
    swapped = !swapped;
  }
  return {std::nullopt, PlanFailure::timeout};
}

}  // namespace refplan::sbmp
