#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace refplan {

// KL divergence between finite distributions on the same support.
// Throws when p places mass where q has none.
inline double kl_divergence(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: size mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) throw std::domain_error("kl_divergence: support violation");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

// log(sum_i w_i * exp(x_i)) with a max shift; entries with w_i == 0 are
// ignored entirely so their x_i may be arbitrary.
inline double log_sum_exp_weighted(const std::vector<double>& w, const std::vector<double>& x) {
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) shift = std::max(shift, x[i]);
  if (shift == -std::numeric_limits<double>::infinity())
    throw std::domain_error("log_sum_exp_weighted: empty support");
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i)
    if (w[i] > 0.0) acc += w[i] * std::exp(x[i] - shift);
  return shift + std::log(acc);
}

// Soft maximum of q under reference weights: (1/eta) log sum_a ref(a) exp(eta q(a)).
// Equals the optimum of  sum_a pi(a) q(a) - (1/eta) KL(pi || ref)  over pi.
inline double soft_value(const std::vector<double>& reference, const std::vector<double>& q_values,
                         double eta) {
  if (reference.size() != q_values.size()) throw std::invalid_argument("soft_value: size mismatch");
  if (!(eta > 0.0)) throw std::invalid_argument("soft_value: eta must be positive");
  std::vector<double> scaled(q_values.size());
  for (std::size_t i = 0; i < q_values.size(); ++i) scaled[i] = eta * q_values[i];
  return log_sum_exp_weighted(reference, scaled) / eta;
}

// Maximizer of the KL-penalized objective: pi(a) proportional to ref(a) exp(eta q(a)).
inline std::vector<double> soft_policy(const std::vector<double>& reference,
                                       const std::vector<double>& q_values, double eta) {
  if (reference.size() != q_values.size()) throw std::invalid_argument("soft_policy: size mismatch");
  if (!(eta > 0.0)) throw std::invalid_argument("soft_policy: eta must be positive");
  double shift = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < reference.size(); ++i)
    if (reference[i] > 0.0) shift = std::max(shift, eta * q_values[i]);
  if (shift == -std::numeric_limits<double>::infinity())
    throw std::domain_error("soft_policy: reference has empty support");
  std::vector<double> pi(reference.size(), 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    if (reference[i] <= 0.0) continue;
    pi[i] = reference[i] * std::exp(eta * q_values[i] - shift);
    total += pi[i];
  }
  for (double& w : pi) w /= total;
  return pi;
}

// sum_i gamma^i r_i for the rewards collected along a macro action.
inline double discounted_macro_reward(const std::vector<double>& rewards, double gamma) {
  double acc = 0.0;
  double scale = 1.0;
  for (double r : rewards) {
    acc += scale * r;
    scale *= gamma;
  }
  return acc;
}

}  // namespace refplan
