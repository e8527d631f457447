#pragma once

// Umbrella header for the whole library.

#include "refplan/baselines/bvamp.hpp"
#include "refplan/baselines/pomcp.hpp"
#include "refplan/baselines/rpomcp.hpp"
#include "refplan/bench/episode.hpp"
#include "refplan/bench/harness.hpp"
#include "refplan/bench/svg.hpp"
#include "refplan/core/belief.hpp"
#include "refplan/core/env.hpp"
#include "refplan/core/filter.hpp"
#include "refplan/core/math.hpp"
#include "refplan/core/rng.hpp"
#include "refplan/core/types.hpp"
#include "refplan/envs/registry.hpp"
#include "refplan/sbmp/geometry.hpp"
#include "refplan/sbmp/macro.hpp"
#include "refplan/sbmp/planner.hpp"
#include "refplan/sbmp/validate.hpp"
#include "refplan/solver/heuristic.hpp"
#include "refplan/solver/ref_solver.hpp"
#include "refplan/solver/sampler.hpp"
#include "refplan/solver/tree.hpp"
#include "refplan/subgoals/heuristics.hpp"
