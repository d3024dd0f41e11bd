#pragma once

/**
 * @file analysis.hpp
 * @brief Experiment-level measurements over conflict suites: exact match,
 *        rank-correlation sensitivity, ablations, hyperparameter sweeps and
 *        a strategy-overhead microbenchmark.
 *
 * All evaluations are deterministic under a fixed suite and configuration,
 * independent of the thread count used to fan out across instances.
 */

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cocoa/engine.hpp"

namespace cocoa {

// =============================================================================
// Rank correlation
// =============================================================================

/**
 * Spearman rank correlation of two equal-length vectors (length >= 2),
 * using average ranks for ties. Identical rankings return exactly 1 and
 * exactly opposite rankings return exactly -1. Throws std::invalid_argument
 * on a length mismatch and std::runtime_error when either side has zero
 * rank variance (all values tied).
 */
double spearman(std::span<const double> x, std::span<const double> y);

// =============================================================================
// Exact match
// =============================================================================

/// Per-regime exact-match rates. Rates are 0 when a regime is empty.
struct EmReport {
  int n_conflict = 0;
  int n_agree = 0;
  int hits_conflict = 0;
  int hits_agree = 0;
  double em_conflict = 0.0;
  double em_agree = 0.0;
  double em_overall = 0.0;
};

/**
 * Decodes every instance with `strategy` on the toy LM and scores 1 iff the
 * emitted tokens (minus the trailing end token) equal the instance's
 * context answer, which is the shared answer on no-conflict instances.
 * Throws std::invalid_argument on an empty suite.
 */
EmReport exact_match_eval(const std::vector<ConflictInstance>& suite, Strategy strategy,
                          const StrategyConfig& cfg, int threads = 1);

// =============================================================================
// Conflict sensitivity
// =============================================================================

/// Mean per-step rank correlation between the contextual distribution and
/// the strategy-adjusted distribution, split by regime.
struct SensitivityReport {
  double rho_conflict = 0.0;
  double rho_agree = 0.0;
  double delta_rho_abs = 0.0;  ///< |rho_agree - rho_conflict|
};

/**
 * Decodes every instance with `strategy` and computes, at each step, the
 * Spearman correlation between the contextual probabilities and the
 * adjusted probabilities. Steps weigh equally within each regime. Throws
 * std::invalid_argument unless the suite has both conflict and no-conflict
 * instances.
 */
SensitivityReport conflict_sensitivity(const std::vector<ConflictInstance>& suite,
                                       Strategy strategy, const StrategyConfig& cfg,
                                       int threads = 1);

// =============================================================================
// Ablations and sweeps
// =============================================================================

struct AblationRow {
  std::string variant;
  EmReport em;
};

/**
 * Exact-match accuracy for the full gated strategy and each single-switch
 * ablation, in a fixed row order: full, kl-instead, no-renyi,
 * no-entropy-gap, no-peakedness, fixed-lambda-0.5, greedy.
 */
std::vector<AblationRow> run_ablation(const std::vector<ConflictInstance>& suite,
                                      const StrategyConfig& cfg, int threads = 1);

struct SweepRow {
  double renyi_order = 0.0;
  double z = 0.0;
  double gamma = 0.0;
  EmReport em;
};

/// Cross-product sweep over the three gating hyperparameters, evaluated
/// with the gated strategy. All grids must be nonempty.
std::vector<SweepRow> sweep(const std::vector<ConflictInstance>& suite, const StrategyConfig& cfg,
                            std::span<const double> renyi_orders, std::span<const double> zs,
                            std::span<const double> gammas, int threads = 1);

// =============================================================================
// Latency microbenchmark
// =============================================================================

struct LatencyRow {
  std::string strategy;
  double mean_ns = 0.0;
  double p99_ns = 0.0;
};

/**
 * Times only each strategy's per-step adjustment (signals plus blend) on
 * synthetic random distribution pairs; the source of the distributions is
 * outside the timed region. Single-threaded. Requires vocab_size >= 2 and
 * n_steps >= 1; with n_steps = 1 the p99 equals the mean.
 */
std::vector<LatencyRow> bench_latency(int vocab_size, int n_steps,
                                      const std::vector<Strategy>& strategies,
                                      const StrategyConfig& cfg, std::uint64_t seed = 7);

// =============================================================================
// Report rendering
// =============================================================================

struct EmRow {
  std::string strategy;
  EmReport em;
};

using SensitivityRow = std::pair<std::string, SensitivityReport>;

/// JSONL reports carry a header line with the generating seed; text reports
/// are aligned tables with the seed in a comment line. Both render
/// identically for identical inputs.
std::string em_report_jsonl(std::span<const EmRow> rows, std::uint64_t seed);
std::string em_report_text(std::span<const EmRow> rows, std::uint64_t seed);
std::string sensitivity_report_jsonl(std::span<const SensitivityRow> rows, std::uint64_t seed);
std::string sensitivity_report_text(std::span<const SensitivityRow> rows, std::uint64_t seed);
std::string ablation_report_jsonl(std::span<const AblationRow> rows, std::uint64_t seed);
std::string ablation_report_text(std::span<const AblationRow> rows, std::uint64_t seed);
std::string sweep_report_jsonl(std::span<const SweepRow> rows, std::uint64_t seed);
std::string sweep_report_text(std::span<const SweepRow> rows, std::uint64_t seed);
std::string bench_report_jsonl(std::span<const LatencyRow> rows, int vocab_size, int n_steps,
                               std::uint64_t seed);
std::string bench_report_text(std::span<const LatencyRow> rows, int vocab_size, int n_steps,
                              std::uint64_t seed);

// =============================================================================
// Deterministic fan-out
// =============================================================================

/**
 * Runs fn(0..n-1) on up to `threads` worker threads in contiguous index
 * blocks. Each index must write only to its own output slot; callers reduce
 * sequentially afterwards, so results are independent of the thread count.
 */
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace cocoa
