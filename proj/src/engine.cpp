#include "cocoa/engine.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace cocoa {

using nlohmann::json;

DecodeResult decode(DualProvider& provider, Strategy strategy, const StrategyConfig& cfg,
                    int max_len) {
  if (max_len < 1) throw std::invalid_argument("max_len must be at least 1");
  cfg.validate();

  DecodeResult result;
  result.strategy_name = to_string(strategy);
  result.config_digest = config_digest(cfg);

  while (static_cast<int>(result.tokens.size()) < max_len) {
    const int step = static_cast<int>(result.tokens.size());
    std::optional<DualStep> dual;
    try {
      dual = provider.next(result.tokens);
      if (!dual) break;
      StepDiagnostics diag = diagnose(dual->prior, dual->ctx, cfg);
      TokenDistribution adjusted = apply_strategy(strategy, dual->prior, dual->ctx, cfg, diag);
      diag.chosen = greedy_select(adjusted);
      result.steps.push_back(diag);
      result.tokens.push_back(diag.chosen);
    } catch (const std::exception& e) {
      throw std::runtime_error("step " + std::to_string(step) + ": " + e.what());
    }
    if (result.tokens.back() == kEndToken) break;
  }
  return result;
}

namespace {

std::string canonical_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string config_digest(const StrategyConfig& cfg) {
  std::string text;
  text.reserve(256);
  text += "renyi_order=" + canonical_double(cfg.renyi_order);
  text += ";gamma=" + canonical_double(cfg.gamma);
  text += ";delta=" + canonical_double(cfg.delta);
  text += ";z=" + canonical_double(cfg.z);
  text += ";cad_alpha=" + canonical_double(cfg.cad_alpha);
  text += ";coiecd_threshold=" + canonical_double(cfg.coiecd_threshold);
  text += ";gate_orientation=" + to_string(cfg.gate_orientation);
  text += ";use_renyi=" + std::to_string(cfg.ablation.use_renyi ? 1 : 0);
  text += ";use_kl_instead=" + std::to_string(cfg.ablation.use_kl_instead ? 1 : 0);
  text += ";use_entropy_gap=" + std::to_string(cfg.ablation.use_entropy_gap ? 1 : 0);
  text += ";use_peakedness=" + std::to_string(cfg.ablation.use_peakedness ? 1 : 0);
  text += ";adaptive_gating=" + std::to_string(cfg.ablation.adaptive_gating ? 1 : 0);
  text += ";fixed_lambda=" + canonical_double(cfg.fixed_lambda);

  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

void emit_trace(std::ostream& out, const DecodeResult& result) {
  if (result.steps.empty()) {
    throw std::invalid_argument("cannot emit a trace for a decode with no steps");
  }
  const json header{{"type", "header"},
                    {"strategy", result.strategy_name},
                    {"steps", static_cast<int>(result.steps.size())},
                    {"config_digest", result.config_digest}};
  out << header.dump() << '\n';
  for (size_t i = 0; i < result.steps.size(); ++i) {
    const StepDiagnostics& d = result.steps[i];
    const json j{{"step", static_cast<int>(i)},
                 {"d_alpha", d.d_alpha},
                 {"jsd", d.jsd_value},
                 {"entropy_gap", d.entropy_gap},
                 {"margin", d.margin},
                 {"conflict_score", d.conflict_score},
                 {"lambda", d.lambda},
                 {"chosen", d.chosen}};
    out << j.dump() << '\n';
  }
}

void emit_trace(const DecodeResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  emit_trace(out, result);
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace cocoa
