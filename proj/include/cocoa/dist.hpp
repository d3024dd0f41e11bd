#pragma once

/**
 * @file dist.hpp
 * @brief Normalized token distributions in log space.
 *
 * Every distribution is stored as natural-log probabilities over a fixed
 * vocabulary. Construction normalizes, floors each probability at kProbFloor
 * and renormalizes once, so downstream code can take logs and ratios without
 * guarding against zeros.
 */

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace cocoa {

/// Token index into the vocabulary. Id 0 is reserved as the end-of-sequence
/// token throughout the project.
using TokenId = std::int32_t;

inline constexpr TokenId kEndToken = 0;

/// Floor applied to every probability after normalization.
inline constexpr double kProbFloor = 1e-12;

/// Smallest margin fed to a logarithm by the gating code.
inline constexpr double kMarginFloor = 1e-6;

// =============================================================================
// TokenDistribution
// =============================================================================

/**
 * A probability distribution over token ids [0, vocab_size).
 *
 * Invariants (enforced at construction):
 *  - vocab_size >= 2
 *  - log_probs are finite and exp(log_probs) sums to 1 within 1e-9
 *  - every probability is at least ~kProbFloor (floored, then renormalized
 *    once, so entries may sit a hair under the floor after renormalization)
 */
class TokenDistribution {
 public:
  /// Normalizes raw logits (shift-invariant softmax with max subtraction).
  /// Throws std::invalid_argument on non-finite input or vocab < 2.
  static TokenDistribution from_logits(std::span<const double> logits);

  /// Normalizes nonnegative weights (e.g. plain probabilities). Zeros are
  /// lifted to the floor. Throws std::invalid_argument on negative entries,
  /// non-finite input, all-zero input, or vocab < 2.
  static TokenDistribution from_probs(std::span<const double> probs);

  /// Uniform distribution over `vocab_size` tokens.
  static TokenDistribution uniform(int vocab_size);

  /// Distribution with all mass on `peak` (before flooring).
  static TokenDistribution one_hot(int vocab_size, TokenId peak);

  int vocab_size() const { return static_cast<int>(log_probs_.size()); }
  const std::vector<double>& log_probs() const { return log_probs_; }
  const std::vector<double>& probs() const { return probs_; }

  double log_prob(TokenId t) const { return log_probs_[static_cast<size_t>(t)]; }
  double prob(TokenId t) const { return probs_[static_cast<size_t>(t)]; }

 private:
  TokenDistribution() = default;

  /// Floors `probs` (assumed to sum to ~1) at kProbFloor, renormalizes once
  /// and derives the log representation.
  static TokenDistribution finish(std::vector<double> probs);

  std::vector<double> log_probs_;
  std::vector<double> probs_;
};

// =============================================================================
// Distribution statistics
// =============================================================================

/// Shannon entropy -sum(p log p) in nats. Always within [0, log vocab_size]
/// up to floating-point slack.
double entropy(const TokenDistribution& d);

/// Top-1 minus top-2 probability, in [0, 1]. Ties resolve to the lowest
/// token index, so the raw value can be exactly 0. Callers that take a log
/// clamp to [kMarginFloor, 1] first (see blend_weight).
double margin(const TokenDistribution& d);

/// The two most probable token ids, ordered by descending probability with
/// ascending-index tie-breaking. Requires vocab_size >= 2.
std::pair<TokenId, TokenId> top2(const TokenDistribution& d);

/// Total variation distance (half the L1 gap). Test and diagnostics helper.
double total_variation(const TokenDistribution& a, const TokenDistribution& b);

}  // namespace cocoa
