#pragma once

/**
 * @file engine.hpp
 * @brief Greedy decode loop over a DualProvider with per-step diagnostics.
 */

#include <iosfwd>
#include <string>
#include <vector>

#include "cocoa/providers.hpp"
#include "cocoa/strategies.hpp"

namespace cocoa {

/// Output of one decode run. `steps[i]` holds the signals, gate values and
/// chosen token of step i, so tokens.size() == steps.size() always.
struct DecodeResult {
  std::vector<TokenId> tokens;
  std::vector<StepDiagnostics> steps;
  std::string strategy_name;
  std::string config_digest;
};

/**
 * Runs greedy decoding under `strategy`: each step takes the provider's
 * (prior, ctx) pair, computes the full diagnostics block, applies the
 * strategy's adjustment and emits the adjusted argmax. Stops after the end
 * token, after max_len tokens, or when the provider is exhausted.
 *
 * max_len must be >= 1. Provider and strategy errors are rethrown with the
 * failing step index prepended.
 */
DecodeResult decode(DualProvider& provider, Strategy strategy, const StrategyConfig& cfg,
                    int max_len);

/// Hex FNV-1a digest of the configuration's canonical text form. Equal
/// configs digest equally on every platform; any field change moves it.
std::string config_digest(const StrategyConfig& cfg);

/**
 * Writes a decode result as JSONL: a header line (strategy, step count,
 * config digest), then one line per step with the diagnostics and chosen
 * token. Re-emitting a result is byte-identical. Throws std::invalid_argument
 * on a result with no steps.
 */
void emit_trace(std::ostream& out, const DecodeResult& result);
void emit_trace(const DecodeResult& result, const std::string& path);

}  // namespace cocoa
