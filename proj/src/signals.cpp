#include "cocoa/signals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cocoa {

namespace {

void check_match(const TokenDistribution& p, const TokenDistribution& q) {
  if (p.vocab_size() != q.vocab_size()) {
    throw std::invalid_argument("divergence needs matching vocabularies, got " +
                                std::to_string(p.vocab_size()) + " and " +
                                std::to_string(q.vocab_size()));
  }
}

}  // namespace

RenyiOrder::RenyiOrder(double v) : value(v) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument("Renyi order must be a positive finite real");
  }
}

double renyi_divergence(const TokenDistribution& p, const TokenDistribution& q, RenyiOrder order) {
  check_match(p, q);
  const double a = order.value;
  if (a == 1.0) return kl_divergence(p, q);

  // log sum exp of a*log p_i + (1-a)*log q_i.
  const auto& lp = p.log_probs();
  const auto& lq = q.log_probs();
  const size_t n = lp.size();
  std::vector<double> terms(n);
  double max_term = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < n; ++i) {
    terms[i] = a * lp[i] + (1.0 - a) * lq[i];
    max_term = std::max(max_term, terms[i]);
  }
  double sum = 0.0;
  for (size_t i = 0; i < n; ++i) sum += std::exp(terms[i] - max_term);
  const double log_sum = max_term + std::log(sum);
  return std::max(log_sum / (a - 1.0), 0.0);
}

double kl_divergence(const TokenDistribution& p, const TokenDistribution& q) {
  check_match(p, q);
  const auto& pp = p.probs();
  const auto& lp = p.log_probs();
  const auto& lq = q.log_probs();
  double d = 0.0;
  for (size_t i = 0; i < pp.size(); ++i) d += pp[i] * (lp[i] - lq[i]);
  return std::max(d, 0.0);
}

double jsd(const TokenDistribution& p, const TokenDistribution& q) {
  check_match(p, q);
  const auto& pp = p.probs();
  const auto& qq = q.probs();
  double d = 0.0;
  for (size_t i = 0; i < pp.size(); ++i) {
    const double log_m = std::log(0.5 * (pp[i] + qq[i]));
    d += 0.5 * pp[i] * (p.log_probs()[i] - log_m) + 0.5 * qq[i] * (q.log_probs()[i] - log_m);
  }
  return std::max(d, 0.0);
}

double entropy_gap(const TokenDistribution& prior, const TokenDistribution& ctx) {
  check_match(prior, ctx);
  return entropy(prior) - entropy(ctx);
}

}  // namespace cocoa
