#pragma once

/**
 * @file strategies.hpp
 * @brief Decoding adjustments that reconcile a prior and a contextual
 *        distribution at one decode step.
 *
 * The adaptive strategy ("cocoa") scores how much the two distributions
 * conflict, converts the score into a gating weight, and geometrically
 * interpolates the two distributions with that weight. The remaining
 * strategies are contrastive baselines that share the same call shape.
 */

#include <string>
#include <utility>

#include "cocoa/dist.hpp"
#include "cocoa/signals.hpp"

namespace cocoa {

// =============================================================================
// Configuration
// =============================================================================

/// Which way the conflict score enters the gating logit. `kProse` treats a
/// high conflict score as a push towards the contextual distribution;
/// `kLiteral` keeps the opposite sign. kProse is the default behavior.
enum class GateOrientation { kProse, kLiteral };

GateOrientation parse_gate_orientation(const std::string& name);
std::string to_string(GateOrientation o);

/// Switches that remove individual ingredients of the adaptive gate.
/// Defaults correspond to the full strategy.
struct AblationSwitches {
  bool use_renyi = true;        ///< include the divergence term in the score
  bool use_kl_instead = false;  ///< swap the Renyi divergence for KL
  bool use_entropy_gap = true;  ///< include the entropy-gap term in the score
  bool use_peakedness = true;   ///< include the margin term in the gate
  bool adaptive_gating = true;  ///< false: ignore signals, use fixed_lambda
};

struct StrategyConfig {
  double renyi_order = 0.5;   ///< divergence order for the conflict score
  double gamma = 1.0;         ///< weight of the entropy gap in the score
  double delta = 1e-8;        ///< score bias
  double z = 5.0;             ///< margin exponent in the gate (> 1)
  double cad_alpha = 1.0;     ///< contrast strength for cad/coiecd
  double coiecd_threshold = 0.25;  ///< divergence level that switches coiecd on
  GateOrientation gate_orientation = GateOrientation::kProse;
  AblationSwitches ablation;
  double fixed_lambda = 0.5;  ///< gate output when adaptive_gating is off

  /// Throws std::invalid_argument when a field is out of its documented range.
  void validate() const;
};

// =============================================================================
// Per-step diagnostics
// =============================================================================

/// Signals and gate values recorded at every decode step. `d_alpha` is the
/// divergence configured for the conflict score (KL when use_kl_instead is
/// set); `jsd_value` is always the Jensen-Shannon divergence so traces stay
/// comparable across strategies.
struct StepDiagnostics {
  double d_alpha = 0.0;
  double jsd_value = 0.0;
  double entropy_gap = 0.0;
  double margin = 0.0;
  double conflict_score = 0.5;  ///< in (0, 1)
  double lambda = 0.5;          ///< in [0, 1]
  TokenId chosen = 0;
};

// =============================================================================
// Gating primitives
// =============================================================================

/// Conflict score sigma(d_alpha + gamma * gap + delta), clamped to
/// [1e-12, 1 - 1e-12]. Callers pass 0 for terms their ablation disables.
double conflict_score(double d_alpha, double gap, const StrategyConfig& cfg);

/// Gating weight from the contextual margin m and conflict score s.
/// Prose orientation: sigma(z * log m + log(s / (1 - s))); the literal
/// orientation negates the score term. m is clamped to [kMarginFloor, 1]
/// and s away from {0, 1} before logs. With use_peakedness off the margin
/// term is dropped; with adaptive_gating off this returns fixed_lambda.
double blend_weight(double m, double s, const StrategyConfig& cfg);

/// Geometric interpolation: log q = lambda * log ctx + (1 - lambda) * log
/// prior, renormalized. lambda 0 and 1 reproduce the inputs within 1e-12
/// total variation.
TokenDistribution power_blend(const TokenDistribution& prior, const TokenDistribution& ctx,
                              double lambda);

/// Computes the full diagnostics block for one step: divergence, JSD,
/// entropy gap, contextual margin, conflict score and gating weight under
/// `cfg`. `chosen` is left at 0 for the caller to fill.
StepDiagnostics diagnose(const TokenDistribution& prior, const TokenDistribution& ctx,
                         const StrategyConfig& cfg);

// =============================================================================
// Strategies
// =============================================================================

/// Adaptive gated blend. Returns the adjusted distribution plus the
/// diagnostics that produced it (output == power_blend with diag.lambda).
std::pair<TokenDistribution, StepDiagnostics> cocoa_adjust(const TokenDistribution& prior,
                                                           const TokenDistribution& ctx,
                                                           const StrategyConfig& cfg);

/// Static contrast: log q proportional to (1 + alpha) * log ctx - alpha *
/// log prior.
TokenDistribution cad_adjust(const TokenDistribution& prior, const TokenDistribution& ctx,
                             double alpha);

/// Contrast whose strength is the JSD between ctx and prior at this step.
/// diag.jsd_value carries the strength actually used.
std::pair<TokenDistribution, StepDiagnostics> adacad_adjust(const TokenDistribution& prior,
                                                            const TokenDistribution& ctx);

/// Applies cad_adjust with cfg.cad_alpha when jsd(ctx, prior) reaches
/// cfg.coiecd_threshold, otherwise returns ctx unchanged.
TokenDistribution coiecd_adjust(const TokenDistribution& prior, const TokenDistribution& ctx,
                                const StrategyConfig& cfg);

/// Confidence-scheduled contrast: alpha is max(ctx) when the contextual
/// distribution is the more confident one, else 1 - max(prior).
TokenDistribution confcd_adjust(const TokenDistribution& prior, const TokenDistribution& ctx);

/// Argmax with lowest-index tie-breaking.
TokenId greedy_select(const TokenDistribution& d);

// =============================================================================
// Strategy dispatch
// =============================================================================

enum class Strategy { kGreedy, kCad, kCoiecd, kConfcd, kAdacad, kCocoa };

/// Parses one of: greedy, cad, coiecd, confcd, adacad, cocoa. Throws
/// std::invalid_argument naming the valid set otherwise.
Strategy parse_strategy(const std::string& name);
std::string to_string(Strategy s);

/// Adjusted distribution for `strategy` at this step. `diag` must come from
/// diagnose() on the same pair so the gated strategy reuses its lambda.
TokenDistribution apply_strategy(Strategy strategy, const TokenDistribution& prior,
                                 const TokenDistribution& ctx, const StrategyConfig& cfg,
                                 const StepDiagnostics& diag);

}  // namespace cocoa
