#pragma once

/**
 * @file providers.hpp
 * @brief Sources of per-step (prior, contextual) distribution pairs.
 *
 * Three providers share one interface: a deterministic toy language model
 * over synthetic conflict instances, a replay reader for recorded logit
 * traces, and an HTTP client for a remote logit server. Token id 0 is the
 * reserved end-of-sequence token everywhere.
 */

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cocoa/dist.hpp"

namespace cocoa {

// =============================================================================
// Step payload and provider interface
// =============================================================================

/// One decode step: the prior (no-context) and contextual distributions.
struct DualStep {
  TokenDistribution prior;
  TokenDistribution ctx;
  /// True when the source expects the sequence to finish here. Advisory
  /// only; the engine stops on the emitted end token or max_len.
  bool is_terminal_hint = false;
};

/// Streaming source of DualSteps. `next` receives the tokens emitted so far
/// and returns std::nullopt when the source is exhausted.
class DualProvider {
 public:
  virtual ~DualProvider() = default;
  virtual std::optional<DualStep> next(std::span<const TokenId> emitted) = 0;
  virtual int vocab_size() const = 0;
};

// =============================================================================
// Toy language model
// =============================================================================

/// Sharpness value treated as "effectively one-hot" by the suite generator.
inline constexpr double kOneHotSharpness = 1e12;

/**
 * A synthetic question whose parametric (memorized) answer and contextual
 * (document-supported) answer may disagree. The contextual side of the toy
 * LM peaks on context_answer, the prior side on parametric_answer.
 *
 * `sharpness` and `distractor_mass` describe the contextual side; the prior
 * side reuses them unless the prior_* overrides are set, which is how
 * mixed-sharpness suites are built. With equal knobs and conflict = false
 * the two sides are bit-identical by construction.
 */
struct ConflictInstance {
  std::string instance_id;
  std::vector<TokenId> query_tokens;
  std::vector<TokenId> context_tokens;
  std::vector<TokenId> parametric_answer;
  std::vector<TokenId> context_answer;
  bool conflict = false;
  double sharpness = 5.0;       ///< contextual peak temperature, > 0
  double distractor_mass = 0.1; ///< mass spread over distractor tokens, in [0, 0.5)
  std::optional<double> prior_sharpness;        ///< prior-side override
  std::optional<double> prior_distractor_mass;  ///< prior-side override
  /// 0 shares distractor_mass evenly; > 0 tilts the shares per token with
  /// weights keyed by the side's knobs, giving the tail an ordering that
  /// is equal for equal-knob sides and decorrelated otherwise.
  double distractor_spread = 0.0;
  int vocab_size = 0;

  /// Throws std::invalid_argument when fields are out of range, answers are
  /// empty, contain the end token, or conflict does not match the answers.
  void validate() const;
};

/**
 * Distributions for the next step of `instance` after `emitted` tokens.
 *
 * Each side peaks on the next token of its answer (or the end token once
 * the answer is exhausted) with mass (1 - distractor_mass) * w, where
 * w = 1 - 1/(2 * (1 + sharpness)) approaches 1 as sharpness grows. The
 * complement (1 - distractor_mass) * (1 - w) sits on the step's runner-up:
 * the other answer's token when it differs, the end token otherwise.
 * Distractors share distractor_mass equally (or per the spread bump).
 *
 * Deterministic given (instance, emitted.size()). Throws when emitted is
 * longer than the full answer path.
 */
DualStep toy_lm_step(const ConflictInstance& instance, std::span<const TokenId> emitted);

/// DualProvider view of one instance.
class ToyProvider : public DualProvider {
 public:
  explicit ToyProvider(ConflictInstance instance);
  std::optional<DualStep> next(std::span<const TokenId> emitted) override;
  int vocab_size() const override { return instance_.vocab_size; }
  const ConflictInstance& instance() const { return instance_; }

 private:
  ConflictInstance instance_;
};

// =============================================================================
// Suite generation
// =============================================================================

/// Inclusive range for a uniform draw.
struct Band {
  double lo = 0.0;
  double hi = 0.0;
};

/// Sampling plan for one side of one regime.
struct SidePlan {
  Band sharpness{1.0, 10.0};
  Band distractor_mass{0.0, 0.3};
};

/**
 * Sampling plan for generate_suite. The default (plain) plan draws one
 * sharpness and one distractor mass per instance and applies them to both
 * sides, so no-conflict instances have prior == ctx at every step. The
 * benchmark plan decouples the sides: conflicting contexts are sharp (a
 * slice of them one-hot), no-conflict priors span mixed sharpness, and the
 * distractor tilt is enabled so tail ranks carry signal.
 */
struct SuiteOptions {
  SidePlan conflict_ctx{};
  SidePlan conflict_prior{};
  bool conflict_asymmetric = false;
  /// Share of conflict instances whose contextual side is one-hot sharp.
  double conflict_one_hot_fraction = 0.0;
  SidePlan agree_ctx{};
  SidePlan agree_prior{};
  bool agree_asymmetric = false;
  Band distractor_spread{0.0, 0.0};
  int answer_len_min = 1;
  int answer_len_max = 3;

  static SuiteOptions plain();
  static SuiteOptions benchmark();
};

/**
 * Deterministically generates n_conflict conflicting instances followed by
 * n_agree agreeing ones. Conflict instances draw the two answers without
 * replacement so every answer step disagrees. Requires vocab_size >= 4 and
 * enough non-end tokens for the longest answers; throws otherwise. The same
 * arguments always produce byte-identical instances.
 */
std::vector<ConflictInstance> generate_suite(int n_conflict, int n_agree, int vocab_size,
                                             std::uint64_t seed,
                                             const SuiteOptions& options = SuiteOptions::plain());

/// JSONL serialization of a suite (header line, then one instance per line).
std::string suite_to_jsonl(const std::vector<ConflictInstance>& suite, int vocab_size,
                           std::uint64_t seed);
void save_suite(const std::vector<ConflictInstance>& suite, int vocab_size, std::uint64_t seed,
                const std::string& path);
std::vector<ConflictInstance> load_suite(const std::string& path);

// =============================================================================
// Logit traces (record and replay)
// =============================================================================

/// One recorded step: dense logits for both passes, plus optionally the
/// token the recording run chose.
struct TraceRecord {
  int step = 0;
  std::vector<double> prior_logits;
  std::vector<double> ctx_logits;
  std::optional<TokenId> chosen;
};

/// Writes a logit trace: a header naming the vocabulary size, then one
/// record per line. Doubles survive the round trip bit-exactly.
void write_trace(std::ostream& out, int vocab_size, const std::string& note,
                 const std::vector<TraceRecord>& records);
void save_trace(const std::string& path, int vocab_size, const std::string& note,
                const std::vector<TraceRecord>& records);

/**
 * Streaming reader for a logit trace. The constructor validates the header;
 * next() validates each record (width, finiteness) and reports malformed
 * input with its line number.
 */
class TraceReplay {
 public:
  explicit TraceReplay(const std::string& path);
  int vocab_size() const { return vocab_size_; }
  const std::string& note() const { return note_; }
  std::optional<TraceRecord> next();

 private:
  std::string path_;
  std::vector<std::string> lines_;
  size_t cursor_ = 0;  // index into lines_, line numbers are cursor_ + 1
  int vocab_size_ = 0;
  std::string note_;
};

/// DualProvider view of a trace. Ignores `emitted`; yields records in order.
class ReplayProvider : public DualProvider {
 public:
  explicit ReplayProvider(const std::string& path);
  std::optional<DualStep> next(std::span<const TokenId> emitted) override;
  int vocab_size() const override { return replay_.vocab_size(); }

 private:
  TraceReplay replay_;
};

// =============================================================================
// Remote logit service
// =============================================================================

struct RemoteConfig {
  std::string endpoint;     ///< e.g. "http://127.0.0.1:8735"
  int timeout_ms = 5000;
};

/**
 * Client for a logit server. Each step issues two POSTs to <endpoint>/logits:
 * one with context_tokens for the contextual pass, one with context_tokens
 * null for the prior pass. Responses carry dense logits; the vocabulary size
 * is pinned by the first response and later mismatches are errors. Network
 * failures, timeouts and non-2xx statuses raise std::runtime_error without
 * yielding a partial step.
 */
class RemoteClient {
 public:
  explicit RemoteClient(RemoteConfig config);

  DualStep fetch(std::span<const TokenId> query_tokens, std::span<const TokenId> context_tokens,
                 std::span<const TokenId> emitted);

  /// 0 until the first successful fetch.
  int vocab_size() const { return vocab_size_; }

 private:
  std::vector<double> post_logits(std::span<const TokenId> query_tokens,
                                  const std::vector<TokenId>* context_tokens,
                                  std::span<const TokenId> emitted);

  RemoteConfig config_;
  int vocab_size_ = 0;
};

/// DualProvider view of a remote session for a fixed query/context pair.
class RemoteProvider : public DualProvider {
 public:
  RemoteProvider(RemoteConfig config, std::vector<TokenId> query_tokens,
                 std::vector<TokenId> context_tokens);
  std::optional<DualStep> next(std::span<const TokenId> emitted) override;
  int vocab_size() const override { return client_.vocab_size(); }

 private:
  RemoteClient client_;
  std::vector<TokenId> query_tokens_;
  std::vector<TokenId> context_tokens_;
};

}  // namespace cocoa
