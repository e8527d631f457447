#pragma once

#include <cmath>
#include <limits>

#include "refplan/core/types.hpp"
#include "refplan/sbmp/planner.hpp"

namespace refplan::sbmp {

namespace detail {

// Axis preference on exact ties: N (+y) over E (+x) over U (+z).
inline int tie_rank(int axis) { return axis == 1 ? 0 : (axis == 0 ? 1 : 2); }

inline int best_axis(const Config& residual) {
  int best = 0;
  for (int ax = 1; ax < residual.dim; ++ax) {
    const double cand = std::fabs(residual[ax]);
    const double cur = std::fabs(residual[best]);
    if (cand > cur || (cand == cur && tie_rank(ax) < tie_rank(best))) best = ax;
  }
  return best;
}

}  // namespace detail

// Turn a geometric path into a sequence of primitive cardinal actions: each
// segment is decomposed greedily, always stepping the axis with the largest
// outstanding residual. Residuals carry across waypoints, so the nominal
// endpoint stays within step_size/2 per axis of the path end (unless the
// macro was truncated by max_len).
inline MacroAction fashion_macro_action(const Path& path, double step_size, int max_len,
                                        const CardinalModel& model) {
  MacroAction macro;
  if (path.empty() || max_len < 1) return macro;

  Config nominal = path.front();
  for (std::size_t wp = 1; wp < path.size(); ++wp) {
    for (;;) {
      Config residual = path[wp];
      for (int d = 0; d < residual.dim; ++d) residual[d] -= nominal[d];
      const int axis = detail::best_axis(residual);
      if (std::fabs(residual[axis]) < 0.5 * step_size) break;
      const double sgn = residual[axis] >= 0.0 ? 1.0 : -1.0;
      macro.actions.push_back(model.action_for(axis, sgn));
      nominal[axis] += sgn * step_size;
      if (static_cast<int>(macro.actions.size()) >= max_len) return macro;
    }
  }

  if (macro.actions.empty()) {
    // Degenerate path shorter than one step: hold the nearest cardinal.
    Config residual = path.back();
    for (int d = 0; d < residual.dim; ++d) residual[d] -= path.front()[d];
    const int axis = detail::best_axis(residual);
    const double sgn = residual[axis] >= 0.0 ? 1.0 : -1.0;
    macro.actions.push_back(model.action_for(axis, sgn));
  }
  return macro;
}

inline MacroAction fashion_macro_action_unbounded(const Path& path, double step_size,
                                                  const CardinalModel& model) {
  return fashion_macro_action(path, step_size, std::numeric_limits<int>::max() / 2, model);
}

// Nominal (noise-free, collision-free) endpoint of a macro.
inline Config nominal_rollout(const Config& start, const MacroAction& macro, double step_size,
                              const CardinalModel& model) {
  Config q = start;
  for (ActionId a : macro.actions) q[model.axis(a)] += model.sign(a) * step_size;
  return q;
}

}  // namespace refplan::sbmp
