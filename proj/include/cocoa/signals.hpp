#pragma once

/**
 * @file signals.hpp
 * @brief Divergence and entropy signals between a prior and a contextual
 *        token distribution.
 *
 * All results are in nats. Argument order matters: the conflict signals are
 * measured from the prior towards the contextual distribution, i.e.
 * renyi_divergence(prior, ctx, order).
 */

#include "cocoa/dist.hpp"

namespace cocoa {

/**
 * Order parameter for the Renyi divergence. Must be positive; order 1 is
 * handled as the KL limit.
 */
struct RenyiOrder {
  double value = 0.5;

  explicit RenyiOrder(double v);
};

/// D_order(p || q) = 1/(order-1) * log sum_i p_i^order q_i^(1-order),
/// evaluated in log space with max subtraction. Order 1 dispatches to
/// kl_divergence. Round-off negatives are clamped to 0.
double renyi_divergence(const TokenDistribution& p, const TokenDistribution& q, RenyiOrder order);

/// KL(p || q) = sum_i p_i (log p_i - log q_i), clamped at 0.
double kl_divergence(const TokenDistribution& p, const TokenDistribution& q);

/// Jensen-Shannon divergence 0.5 KL(p||m) + 0.5 KL(q||m) with m the
/// elementwise average. Symmetric, bounded by log 2.
double jsd(const TokenDistribution& p, const TokenDistribution& q);

/// Entropy gap H(prior) - H(ctx). Positive when the contextual distribution
/// is the sharper one.
double entropy_gap(const TokenDistribution& prior, const TokenDistribution& ctx);

}  // namespace cocoa
