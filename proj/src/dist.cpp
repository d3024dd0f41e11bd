#include "cocoa/dist.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cocoa {

namespace {

void check_vocab(size_t n) {
  if (n < 2) {
    throw std::invalid_argument("distribution needs a vocabulary of at least 2 tokens, got " +
                                std::to_string(n));
  }
}

}  // namespace

TokenDistribution TokenDistribution::finish(std::vector<double> probs) {
  double total = 0.0;
  for (double& p : probs) {
    p = std::max(p, kProbFloor);
    total += p;
  }
  TokenDistribution d;
  d.log_probs_.resize(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) {
    probs[i] /= total;
    d.log_probs_[i] = std::log(probs[i]);
  }
  d.probs_ = std::move(probs);
  return d;
}

TokenDistribution TokenDistribution::from_logits(std::span<const double> logits) {
  check_vocab(logits.size());
  double max_logit = logits[0];
  for (double x : logits) {
    if (!std::isfinite(x)) throw std::invalid_argument("logits must be finite");
    max_logit = std::max(max_logit, x);
  }
  std::vector<double> probs(logits.size());
  double sum = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    probs[i] = std::exp(logits[i] - max_logit);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return finish(std::move(probs));
}

TokenDistribution TokenDistribution::from_probs(std::span<const double> probs) {
  check_vocab(probs.size());
  double sum = 0.0;
  for (double p : probs) {
    if (!std::isfinite(p)) throw std::invalid_argument("probabilities must be finite");
    if (p < 0.0) throw std::invalid_argument("probabilities must be nonnegative");
    sum += p;
  }
  if (sum <= 0.0) throw std::invalid_argument("probabilities must not all be zero");
  std::vector<double> scaled(probs.size());
  for (size_t i = 0; i < probs.size(); ++i) scaled[i] = probs[i] / sum;
  return finish(std::move(scaled));
}

TokenDistribution TokenDistribution::uniform(int vocab_size) {
  check_vocab(static_cast<size_t>(std::max(vocab_size, 0)));
  std::vector<double> probs(static_cast<size_t>(vocab_size), 1.0 / vocab_size);
  return finish(std::move(probs));
}

TokenDistribution TokenDistribution::one_hot(int vocab_size, TokenId peak) {
  check_vocab(static_cast<size_t>(std::max(vocab_size, 0)));
  if (peak < 0 || peak >= vocab_size) throw std::invalid_argument("one_hot peak out of range");
  std::vector<double> probs(static_cast<size_t>(vocab_size), 0.0);
  probs[static_cast<size_t>(peak)] = 1.0;
  return finish(std::move(probs));
}

double entropy(const TokenDistribution& d) {
  double h = 0.0;
  const auto& p = d.probs();
  const auto& lp = d.log_probs();
  for (size_t i = 0; i < p.size(); ++i) h -= p[i] * lp[i];
  return std::max(h, 0.0);
}

double margin(const TokenDistribution& d) {
  const auto [first, second] = top2(d);
  return d.prob(first) - d.prob(second);
}

std::pair<TokenId, TokenId> top2(const TokenDistribution& d) {
  const auto& p = d.probs();
  // Lowest index wins ties because scanning replaces only on strict >.
  size_t best = 0, runner = 1;
  if (p[1] > p[0]) { best = 1; runner = 0; }
  for (size_t i = 2; i < p.size(); ++i) {
    if (p[i] > p[best]) {
      runner = best;
      best = i;
    } else if (p[i] > p[runner]) {
      runner = i;
    }
  }
  return {static_cast<TokenId>(best), static_cast<TokenId>(runner)};
}

double total_variation(const TokenDistribution& a, const TokenDistribution& b) {
  if (a.vocab_size() != b.vocab_size()) {
    throw std::invalid_argument("total_variation needs matching vocabularies");
  }
  double l1 = 0.0;
  for (int i = 0; i < a.vocab_size(); ++i) l1 += std::abs(a.prob(i) - b.prob(i));
  return 0.5 * l1;
}

}  // namespace cocoa
