#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "cocoa/dist.hpp"

namespace oracles {

// Reference implementations that sum directly over probabilities, with no
// log-sum-exp or other stabilization. Used to cross-check the log-space
// production code on moderate vocab sizes.

inline double entropy_ref(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p) h -= x * std::log(x);
  return h;
}

inline double kl_ref(const std::vector<double>& p, const std::vector<double>& q) {
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += p[i] * (std::log(p[i]) - std::log(q[i]));
  return d;
}

inline double renyi_ref(const std::vector<double>& p, const std::vector<double>& q,
                        double alpha) {
  if (alpha == 1.0) return kl_ref(p, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    acc += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
  return std::log(acc) / (alpha - 1.0);
}

inline double jsd_ref(const std::vector<double>& p, const std::vector<double>& q) {
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = 0.5 * (p[i] + q[i]);
  return 0.5 * kl_ref(p, m) + 0.5 * kl_ref(q, m);
}

inline double sigmoid_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline cocoa::TokenDistribution random_distribution(std::mt19937_64& rng, int vocab) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> logits(static_cast<std::size_t>(vocab));
  for (auto& v : logits) v = 8.0 * unit(rng) - 4.0;
  return cocoa::TokenDistribution::from_logits(logits);
}

inline double total_variation_vec(const std::vector<double>& a, const std::vector<double>& b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) tv += std::abs(a[i] - b[i]);
  return 0.5 * tv;
}

}  // namespace oracles
