#pragma once

#include <vector>

#include "refplan/core/belief.hpp"
#include "refplan/core/env.hpp"

namespace refplan {

struct BeliefUpdateResult {
  ParticleBelief posterior;
  // True when every propagated particle had zero likelihood and the update
  // fell back to the transition-only prediction.
  bool reinvigorated = false;
};

namespace detail {

// Propagate every particle through the transition model and weight it by the
// likelihood of the real observation. Weights are unnormalized.
inline void propagate_and_weight(const ParticleBelief& belief, const Environment& env, ActionId a,
                                 const Observation& real_obs, Rng& rng,
                                 std::vector<State>& out_states, std::vector<double>& out_weights) {
  out_states.clear();
  out_weights.clear();
  out_states.reserve(belief.size());
  out_weights.reserve(belief.size());
  for (std::size_t i = 0; i < belief.size(); ++i) {
    State next;
    if (belief.state(i).terminal) {
      next = belief.state(i);  // absorbing
    } else {
      next = env.step(belief.state(i), a, rng).next;
    }
    const double lik = env.observation_likelihood(real_obs, next, a);
    out_weights.push_back(belief.weight(i) * lik);
    out_states.push_back(std::move(next));
  }
}

inline ParticleBelief systematic_resample(const std::vector<State>& states,
                                          const std::vector<double>& weights, int count, Rng& rng) {
  double total = 0.0;
  for (double w : weights) total += w;
  std::vector<State> out;
  out.reserve(static_cast<std::size_t>(count));
  const double stride = total / count;
  double pointer = rng.uniform01() * stride;
  double acc = 0.0;
  std::size_t i = 0;
  for (int k = 0; k < count; ++k) {
    const double target = pointer + k * stride;
    while (acc + weights[i] < target && i + 1 < weights.size()) {
      acc += weights[i];
      ++i;
    }
    out.push_back(states[i]);
  }
  return ParticleBelief::equal_weight(std::move(out));
}

}  // namespace detail

// One sequential importance resampling step. On total weight collapse the
// posterior is the transition-only prediction (observation ignored) and the
// result is flagged.
inline BeliefUpdateResult belief_update(const ParticleBelief& belief, const Environment& env,
                                        ActionId a, const Observation& real_obs, int particle_count,
                                        Rng& rng) {
  std::vector<State> states;
  std::vector<double> weights;
  detail::propagate_and_weight(belief, env, a, real_obs, rng, states, weights);

  double total = 0.0;
  for (double w : weights) total += w;

  BeliefUpdateResult result;
  if (total <= 0.0) {
    std::vector<double> uniform(states.size(), 1.0);
    result.posterior = detail::systematic_resample(states, uniform, particle_count, rng);
    result.reinvigorated = true;
  } else {
    result.posterior = detail::systematic_resample(states, weights, particle_count, rng);
  }
  return result;
}

}  // namespace refplan
