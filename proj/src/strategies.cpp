#include "cocoa/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace cocoa {

namespace {

constexpr double kScoreClamp = 1e-12;

double stable_sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

TokenDistribution blend_from_log_weights(const std::vector<double>& lw) {
  return TokenDistribution::from_logits(lw);
}

}  // namespace

GateOrientation parse_gate_orientation(const std::string& name) {
  if (name == "prose") return GateOrientation::kProse;
  if (name == "literal") return GateOrientation::kLiteral;
  throw std::invalid_argument("unknown gate orientation '" + name + "' (valid: prose, literal)");
}

std::string to_string(GateOrientation o) {
  return o == GateOrientation::kProse ? "prose" : "literal";
}

void StrategyConfig::validate() const {
  if (!(renyi_order > 0.0) || !std::isfinite(renyi_order)) {
    throw std::invalid_argument("renyi_order must be positive");
  }
  if (!std::isfinite(gamma)) throw std::invalid_argument("gamma must be finite");
  if (!std::isfinite(delta)) throw std::invalid_argument("delta must be finite");
  if (!(z >= 0.0) || !std::isfinite(z)) throw std::invalid_argument("z must be nonnegative");
  if (!(cad_alpha >= 0.0) || !std::isfinite(cad_alpha)) {
    throw std::invalid_argument("cad_alpha must be nonnegative");
  }
  if (!(coiecd_threshold >= 0.0) || !std::isfinite(coiecd_threshold)) {
    throw std::invalid_argument("coiecd_threshold must be nonnegative");
  }
  if (!(fixed_lambda >= 0.0 && fixed_lambda <= 1.0)) {
    throw std::invalid_argument("fixed_lambda must be within [0, 1]");
  }
}

double conflict_score(double d_alpha, double gap, const StrategyConfig& cfg) {
  const double s = stable_sigmoid(d_alpha + cfg.gamma * gap + cfg.delta);
  return std::clamp(s, kScoreClamp, 1.0 - kScoreClamp);
}

double blend_weight(double m, double s, const StrategyConfig& cfg) {
  if (!cfg.ablation.adaptive_gating) return cfg.fixed_lambda;
  const double m_clamped = std::clamp(m, kMarginFloor, 1.0);
  const double s_clamped = std::clamp(s, kScoreClamp, 1.0 - kScoreClamp);
  const double score_logit = std::log(s_clamped / (1.0 - s_clamped));
  double arg = cfg.gate_orientation == GateOrientation::kProse ? score_logit : -score_logit;
  if (cfg.ablation.use_peakedness) arg += cfg.z * std::log(m_clamped);
  return std::clamp(stable_sigmoid(arg), kScoreClamp, 1.0 - kScoreClamp);
}

TokenDistribution power_blend(const TokenDistribution& prior, const TokenDistribution& ctx,
                              double lambda) {
  if (prior.vocab_size() != ctx.vocab_size()) {
    throw std::invalid_argument("power_blend needs matching vocabularies");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("power_blend lambda must be within [0, 1]");
  }
  const auto& lp = prior.log_probs();
  const auto& lc = ctx.log_probs();
  std::vector<double> lw(lp.size());
  for (size_t i = 0; i < lw.size(); ++i) lw[i] = lambda * lc[i] + (1.0 - lambda) * lp[i];
  return blend_from_log_weights(lw);
}

StepDiagnostics diagnose(const TokenDistribution& prior, const TokenDistribution& ctx,
                         const StrategyConfig& cfg) {
  StepDiagnostics diag;
  diag.d_alpha = cfg.ablation.use_kl_instead
                     ? kl_divergence(prior, ctx)
                     : renyi_divergence(prior, ctx, RenyiOrder(cfg.renyi_order));
  diag.jsd_value = jsd(ctx, prior);
  diag.entropy_gap = entropy_gap(prior, ctx);
  diag.margin = margin(ctx);
  const double d_term = cfg.ablation.use_renyi ? diag.d_alpha : 0.0;
  const double gap_term = cfg.ablation.use_entropy_gap ? diag.entropy_gap : 0.0;
  diag.conflict_score = conflict_score(d_term, gap_term, cfg);
  diag.lambda = blend_weight(diag.margin, diag.conflict_score, cfg);
  return diag;
}

std::pair<TokenDistribution, StepDiagnostics> cocoa_adjust(const TokenDistribution& prior,
                                                           const TokenDistribution& ctx,
                                                           const StrategyConfig& cfg) {
  StepDiagnostics diag = diagnose(prior, ctx, cfg);
  return {power_blend(prior, ctx, diag.lambda), diag};
}

TokenDistribution cad_adjust(const TokenDistribution& prior, const TokenDistribution& ctx,
                             double alpha) {
  if (prior.vocab_size() != ctx.vocab_size()) {
    throw std::invalid_argument("cad_adjust needs matching vocabularies");
  }
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("cad_adjust alpha must be nonnegative");
  }
  const auto& lp = prior.log_probs();
  const auto& lc = ctx.log_probs();
  std::vector<double> lw(lp.size());
  for (size_t i = 0; i < lw.size(); ++i) lw[i] = (1.0 + alpha) * lc[i] - alpha * lp[i];
  return blend_from_log_weights(lw);
}

std::pair<TokenDistribution, StepDiagnostics> adacad_adjust(const TokenDistribution& prior,
                                                            const TokenDistribution& ctx) {
  // Computes only what it uses (the JSD), so measuring this call reflects
  // the strategy's real per-step cost. Remaining diagnostics stay at their
  // neutral defaults; decode-level records come from diagnose().
  StepDiagnostics diag;
  diag.jsd_value = jsd(ctx, prior);
  return {cad_adjust(prior, ctx, diag.jsd_value), diag};
}

TokenDistribution coiecd_adjust(const TokenDistribution& prior, const TokenDistribution& ctx,
                                const StrategyConfig& cfg) {
  if (jsd(ctx, prior) >= cfg.coiecd_threshold) return cad_adjust(prior, ctx, cfg.cad_alpha);
  return ctx;
}

TokenDistribution confcd_adjust(const TokenDistribution& prior, const TokenDistribution& ctx) {
  const double max_ctx = ctx.prob(top2(ctx).first);
  const double max_prior = prior.prob(top2(prior).first);
  const double alpha = max_ctx > max_prior ? max_ctx : 1.0 - max_prior;
  return cad_adjust(prior, ctx, alpha);
}

TokenId greedy_select(const TokenDistribution& d) {
  return top2(d).first;
}

Strategy parse_strategy(const std::string& name) {
  if (name == "greedy") return Strategy::kGreedy;
  if (name == "cad") return Strategy::kCad;
  if (name == "coiecd") return Strategy::kCoiecd;
  if (name == "confcd") return Strategy::kConfcd;
  if (name == "adacad") return Strategy::kAdacad;
  if (name == "cocoa") return Strategy::kCocoa;
  throw std::invalid_argument("unknown strategy '" + name +
                              "' (valid: greedy, cad, coiecd, confcd, adacad, cocoa)");
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::kGreedy: return "greedy";
    case Strategy::kCad: return "cad";
    case Strategy::kCoiecd: return "coiecd";
    case Strategy::kConfcd: return "confcd";
    case Strategy::kAdacad: return "adacad";
    case Strategy::kCocoa: return "cocoa";
  }
  return "unknown";
}

TokenDistribution apply_strategy(Strategy strategy, const TokenDistribution& prior,
                                 const TokenDistribution& ctx, const StrategyConfig& cfg,
                                 const StepDiagnostics& diag) {
  switch (strategy) {
    case Strategy::kGreedy: return ctx;
    case Strategy::kCad: return cad_adjust(prior, ctx, cfg.cad_alpha);
    case Strategy::kCoiecd: return coiecd_adjust(prior, ctx, cfg);
    case Strategy::kConfcd: return confcd_adjust(prior, ctx);
    case Strategy::kAdacad: return cad_adjust(prior, ctx, diag.jsd_value);
    case Strategy::kCocoa: return power_blend(prior, ctx, diag.lambda);
  }
  throw std::invalid_argument("unhandled strategy");
}

}  // namespace cocoa
