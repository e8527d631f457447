#pragma once

#include <stdexcept>
#include <vector>

#include "refplan/core/rng.hpp"
#include "refplan/core/types.hpp"

namespace refplan {

// Weighted particle set. Treated as immutable once built; filter updates
// produce a fresh belief.
class ParticleBelief {
 public:
  ParticleBelief() = default;

  ParticleBelief(std::vector<State> states, std::vector<double> weights)
      : states_(std::move(states)), weights_(std::move(weights)) {
    if (states_.empty()) throw std::invalid_argument("ParticleBelief: no particles");
    if (states_.size() != weights_.size())
      throw std::invalid_argument("ParticleBelief: weight count mismatch");
    normalize();
  }

  static ParticleBelief equal_weight(std::vector<State> states) {
    std::vector<double> w(states.size(), 1.0);
    return ParticleBelief(std::move(states), std::move(w));
  }

  std::size_t size() const { return states_.size(); }
  const std::vector<State>& states() const { return states_; }
  const std::vector<double>& weights() const { return weights_; }
  const State& state(std::size_t i) const { return states_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  const State& sample(Rng& rng) const {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i < weights_.size(); ++i) {
      acc += weights_[i];
      if (u < acc) return states_[i];
    }
    return states_.back();
  }

  bool all_terminal() const {
    for (std::size_t i = 0; i < states_.size(); ++i)
      if (weights_[i] > 0.0 && !states_[i].terminal) return false;
    return true;
  }

 private:
  void normalize() {
    double total = 0.0;
    for (double w : weights_) {
      if (w < 0.0) throw std::invalid_argument("ParticleBelief: negative weight");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("ParticleBelief: zero total weight");
    for (double& w : weights_) w /= total;
  }

  std::vector<State> states_;
  std::vector<double> weights_;
};

}  // namespace refplan
