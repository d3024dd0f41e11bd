/**
 * @file cocoa_main.cpp
 * @brief Command-line front end: decode runs and suite-level analyses.
 *
 * Exit codes: 0 success, 1 runtime error, 2 usage error. Errors print a
 * single "error: ..." line on stderr. All runs are deterministic under
 * their seed, independent of --threads.
 */

#include <array>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cocoa/analysis.hpp"
#include "cocoa/engine.hpp"
#include "cocoa/providers.hpp"

namespace {

constexpr std::array<cocoa::Strategy, 6> kAllStrategies = {
    cocoa::Strategy::kGreedy, cocoa::Strategy::kCad,    cocoa::Strategy::kCoiecd,
    cocoa::Strategy::kConfcd, cocoa::Strategy::kAdacad, cocoa::Strategy::kCocoa};

const std::vector<std::string> kStrategyNames = {"greedy", "cad",    "coiecd",
                                                 "confcd", "adacad", "cocoa"};

struct StrategyFlags {
  cocoa::StrategyConfig cfg;
  std::string orientation = "prose";
  bool kl_instead = false;
  bool no_renyi = false;
  bool no_entropy_gap = false;
  bool no_peakedness = false;
  bool no_adaptive_gating = false;

  cocoa::StrategyConfig build() const {
    cocoa::StrategyConfig out = cfg;
    out.gate_orientation = cocoa::parse_gate_orientation(orientation);
    out.ablation.use_kl_instead = kl_instead;
    out.ablation.use_renyi = !no_renyi;
    out.ablation.use_entropy_gap = !no_entropy_gap;
    out.ablation.use_peakedness = !no_peakedness;
    out.ablation.adaptive_gating = !no_adaptive_gating;
    out.validate();
    return out;
  }
};

struct SuiteFlags {
  int n_conflict = 500;
  int n_agree = 500;
  int vocab = 64;
  std::uint64_t seed = 42;
  std::string profile = "benchmark";
  int threads = 1;

  std::vector<cocoa::ConflictInstance> build() const {
    const auto options = profile == "plain" ? cocoa::SuiteOptions::plain()
                                            : cocoa::SuiteOptions::benchmark();
    return cocoa::generate_suite(n_conflict, n_agree, vocab, seed, options);
  }
};

void add_strategy_flags(CLI::App* cmd, StrategyFlags* flags) {
  cmd->add_option("--renyi-order", flags->cfg.renyi_order,
                  "Divergence order in the conflict score")
      ->capture_default_str();
  cmd->add_option("--gamma", flags->cfg.gamma, "Entropy-gap weight in the conflict score")
      ->capture_default_str();
  cmd->add_option("--delta", flags->cfg.delta, "Conflict score bias")->capture_default_str();
  cmd->add_option("--z", flags->cfg.z, "Margin exponent in the gate")->capture_default_str();
  cmd->add_option("--cad-alpha", flags->cfg.cad_alpha, "Contrast strength for cad/coiecd")
      ->capture_default_str();
  cmd->add_option("--coiecd-threshold", flags->cfg.coiecd_threshold,
                  "Divergence level that switches coiecd on")
      ->capture_default_str();
  cmd->add_option("--fixed-lambda", flags->cfg.fixed_lambda,
                  "Gate output when adaptive gating is off")
      ->capture_default_str();
  cmd->add_option("--gate-orientation", flags->orientation,
                  "Sign convention between conflict score and gate")
      ->check(CLI::IsMember({"prose", "literal"}))
      ->capture_default_str();
  cmd->add_flag("--kl-instead", flags->kl_instead, "Use KL instead of the Renyi divergence");
  cmd->add_flag("--no-renyi", flags->no_renyi, "Drop the divergence term from the score");
  cmd->add_flag("--no-entropy-gap", flags->no_entropy_gap,
                "Drop the entropy-gap term from the score");
  cmd->add_flag("--no-peakedness", flags->no_peakedness, "Drop the margin term from the gate");
  cmd->add_flag("--no-adaptive-gating", flags->no_adaptive_gating,
                "Replace the gate with --fixed-lambda");
}

void add_suite_flags(CLI::App* cmd, SuiteFlags* flags) {
  cmd->add_option("--n-conflict", flags->n_conflict, "Conflict instances in the suite")
      ->capture_default_str();
  cmd->add_option("--n-agree", flags->n_agree, "No-conflict instances in the suite")
      ->capture_default_str();
  cmd->add_option("--vocab", flags->vocab, "Toy vocabulary size")->capture_default_str();
  cmd->add_option("--seed", flags->seed, "Suite generation seed")->capture_default_str();
  cmd->add_option("--suite-profile", flags->profile, "Suite sampling profile")
      ->check(CLI::IsMember({"plain", "benchmark"}))
      ->capture_default_str();
  cmd->add_option("--threads", flags->threads, "Worker threads for the evaluation")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path);
}

// ---------------------------------------------------------------------------
// decode
// ---------------------------------------------------------------------------

struct DecodeFlags {
  std::string provider = "toy";
  std::string strategy = "cocoa";
  std::uint64_t seed = 42;
  int max_len = 16;
  std::string out = "decode.jsonl";
  // toy provider
  int vocab = 64;
  std::string regime = "conflict";
  std::string profile = "benchmark";
  // replay provider
  std::string trace;
  // remote provider
  std::string endpoint;
  int timeout_ms = 5000;
  std::vector<cocoa::TokenId> query_tokens;
  std::vector<cocoa::TokenId> context_tokens;
};

void run_decode(const DecodeFlags& flags, const StrategyFlags& strategy_flags) {
  const cocoa::StrategyConfig cfg = strategy_flags.build();
  const cocoa::Strategy strategy = cocoa::parse_strategy(flags.strategy);

  std::unique_ptr<cocoa::DualProvider> provider;
  if (flags.provider == "toy") {
    const auto options = flags.profile == "plain" ? cocoa::SuiteOptions::plain()
                                                  : cocoa::SuiteOptions::benchmark();
    const bool conflict = flags.regime == "conflict";
    auto suite = cocoa::generate_suite(conflict ? 1 : 0, conflict ? 0 : 1, flags.vocab,
                                       flags.seed, options);
    provider = std::make_unique<cocoa::ToyProvider>(suite.front());
  } else if (flags.provider == "replay") {
    provider = std::make_unique<cocoa::ReplayProvider>(flags.trace);
  } else {
    cocoa::RemoteConfig remote;
    remote.endpoint = flags.endpoint;
    remote.timeout_ms = flags.timeout_ms;
    provider = std::make_unique<cocoa::RemoteProvider>(remote, flags.query_tokens,
                                                       flags.context_tokens);
  }

  const cocoa::DecodeResult result = cocoa::decode(*provider, strategy, cfg, flags.max_len);
  if (result.steps.empty()) throw std::runtime_error("provider yielded no steps");
  cocoa::emit_trace(result, flags.out);

  std::cout << "strategy=" << result.strategy_name << " seed=" << flags.seed << " tokens=";
  for (size_t i = 0; i < result.tokens.size(); ++i) {
    std::cout << (i ? "," : "") << result.tokens[i];
  }
  std::cout << " out=" << flags.out << "\n";
}

// ---------------------------------------------------------------------------
// analyze subcommands
// ---------------------------------------------------------------------------

void run_em(const SuiteFlags& suite_flags, const StrategyFlags& strategy_flags,
            const std::string& out_path) {
  const auto suite = suite_flags.build();
  const auto cfg = strategy_flags.build();
  std::vector<cocoa::EmRow> rows;
  for (size_t i = 0; i < kAllStrategies.size(); ++i) {
    rows.push_back({kStrategyNames[i],
                    cocoa::exact_match_eval(suite, kAllStrategies[i], cfg, suite_flags.threads)});
  }
  write_file(out_path, cocoa::em_report_jsonl(rows, suite_flags.seed));
  std::cout << cocoa::em_report_text(rows, suite_flags.seed);
}

void run_sensitivity(const SuiteFlags& suite_flags, const StrategyFlags& strategy_flags,
                     const std::string& out_path) {
  const auto suite = suite_flags.build();
  const auto cfg = strategy_flags.build();
  std::vector<cocoa::SensitivityRow> rows;
  for (size_t i = 0; i < kAllStrategies.size(); ++i) {
    rows.emplace_back(kStrategyNames[i], cocoa::conflict_sensitivity(suite, kAllStrategies[i],
                                                                     cfg, suite_flags.threads));
  }
  write_file(out_path, cocoa::sensitivity_report_jsonl(rows, suite_flags.seed));
  std::cout << cocoa::sensitivity_report_text(rows, suite_flags.seed);
}

void run_ablate(const SuiteFlags& suite_flags, const StrategyFlags& strategy_flags,
                const std::string& out_path) {
  const auto suite = suite_flags.build();
  const auto rows = cocoa::run_ablation(suite, strategy_flags.build(), suite_flags.threads);
  write_file(out_path, cocoa::ablation_report_jsonl(rows, suite_flags.seed));
  std::cout << cocoa::ablation_report_text(rows, suite_flags.seed);
}

void run_sweep(const SuiteFlags& suite_flags, const StrategyFlags& strategy_flags,
               const std::vector<double>& orders, const std::vector<double>& zs,
               const std::vector<double>& gammas, const std::string& out_path) {
  const auto suite = suite_flags.build();
  const auto rows =
      cocoa::sweep(suite, strategy_flags.build(), orders, zs, gammas, suite_flags.threads);
  write_file(out_path, cocoa::sweep_report_jsonl(rows, suite_flags.seed));
  std::cout << cocoa::sweep_report_text(rows, suite_flags.seed);
}

void run_bench(int vocab, int steps, const std::vector<std::string>& strategy_names,
               std::uint64_t seed, const StrategyFlags& strategy_flags,
               const std::string& out_path) {
  std::vector<cocoa::Strategy> strategies;
  strategies.reserve(strategy_names.size());
  for (const auto& name : strategy_names) strategies.push_back(cocoa::parse_strategy(name));
  const auto rows = cocoa::bench_latency(vocab, steps, strategies, strategy_flags.build(), seed);
  write_file(out_path, cocoa::bench_report_jsonl(rows, vocab, steps, seed));
  std::cout << cocoa::bench_report_text(rows, vocab, steps, seed);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conflict-aware dual-distribution decoding harness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key=value configuration file; flags override it");

  // decode
  auto* decode_cmd = app.add_subcommand("decode", "Run one decode and write its diagnostics");
  DecodeFlags decode_flags;
  StrategyFlags decode_strategy;
  decode_cmd->add_option("--provider", decode_flags.provider, "Distribution source")
      ->check(CLI::IsMember({"toy", "replay", "remote"}))
      ->capture_default_str();
  decode_cmd->add_option("--strategy", decode_flags.strategy, "Decoding strategy")
      ->check(CLI::IsMember(kStrategyNames))
      ->capture_default_str();
  decode_cmd->add_option("--seed", decode_flags.seed, "Toy instance seed")->capture_default_str();
  decode_cmd->add_option("--max-len", decode_flags.max_len, "Token cap for the decode")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  decode_cmd->add_option("--out", decode_flags.out, "Diagnostics trace path")
      ->capture_default_str();
  decode_cmd->add_option("--vocab", decode_flags.vocab, "Toy vocabulary size")
      ->capture_default_str();
  decode_cmd->add_option("--regime", decode_flags.regime, "Toy instance regime")
      ->check(CLI::IsMember({"conflict", "agree"}))
      ->capture_default_str();
  decode_cmd->add_option("--suite-profile", decode_flags.profile, "Toy sampling profile")
      ->check(CLI::IsMember({"plain", "benchmark"}))
      ->capture_default_str();
  decode_cmd->add_option("--trace", decode_flags.trace, "Recorded trace path (replay provider)")
      ->capture_default_str();
  decode_cmd->add_option("--endpoint", decode_flags.endpoint,
                         "Logit server base URL (remote provider)")
      ->capture_default_str();
  decode_cmd->add_option("--timeout-ms", decode_flags.timeout_ms, "Remote request timeout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  decode_cmd->add_option("--query-tokens", decode_flags.query_tokens, "Query token ids (remote)")
      ->delimiter(',');
  decode_cmd->add_option("--context-tokens", decode_flags.context_tokens,
                         "Context token ids (remote)")
      ->delimiter(',');
  add_strategy_flags(decode_cmd, &decode_strategy);
  decode_cmd->callback([&] {
    if (decode_flags.provider == "replay" && decode_flags.trace.empty()) {
      throw CLI::ValidationError("decode", "--provider replay requires --trace");
    }
    if (decode_flags.provider == "remote" && decode_flags.endpoint.empty()) {
      throw CLI::ValidationError("decode", "--provider remote requires --endpoint");
    }
    run_decode(decode_flags, decode_strategy);
  });

  // analyze
  auto* analyze_cmd = app.add_subcommand("analyze", "Suite-level measurements");
  analyze_cmd->require_subcommand(1);

  auto* em_cmd = analyze_cmd->add_subcommand("em", "Exact-match accuracy per strategy");
  SuiteFlags em_suite;
  StrategyFlags em_strategy;
  std::string em_out = "em.jsonl";
  add_suite_flags(em_cmd, &em_suite);
  add_strategy_flags(em_cmd, &em_strategy);
  em_cmd->add_option("--out", em_out, "Report path")->capture_default_str();
  em_cmd->callback([&] { run_em(em_suite, em_strategy, em_out); });

  auto* sens_cmd =
      analyze_cmd->add_subcommand("sensitivity", "Rank-correlation sensitivity per strategy");
  SuiteFlags sens_suite;
  StrategyFlags sens_strategy;
  std::string sens_out = "sensitivity.jsonl";
  add_suite_flags(sens_cmd, &sens_suite);
  add_strategy_flags(sens_cmd, &sens_strategy);
  sens_cmd->add_option("--out", sens_out, "Report path")->capture_default_str();
  sens_cmd->callback([&] { run_sensitivity(sens_suite, sens_strategy, sens_out); });

  auto* ablate_cmd = analyze_cmd->add_subcommand("ablate", "Gated-strategy ablation table");
  SuiteFlags ablate_suite;
  StrategyFlags ablate_strategy;
  std::string ablate_out = "ablation.jsonl";
  add_suite_flags(ablate_cmd, &ablate_suite);
  add_strategy_flags(ablate_cmd, &ablate_strategy);
  ablate_cmd->add_option("--out", ablate_out, "Report path")->capture_default_str();
  ablate_cmd->callback([&] { run_ablate(ablate_suite, ablate_strategy, ablate_out); });

  auto* sweep_cmd = analyze_cmd->add_subcommand("sweep", "Hyperparameter grid evaluation");
  SuiteFlags sweep_suite;
  StrategyFlags sweep_strategy;
  std::vector<double> sweep_orders = {0.3, 0.5, 0.7};
  std::vector<double> sweep_zs = {5.0};
  std::vector<double> sweep_gammas = {0.1, 1.0, 5.0};
  std::string sweep_out = "sweep.jsonl";
  add_suite_flags(sweep_cmd, &sweep_suite);
  add_strategy_flags(sweep_cmd, &sweep_strategy);
  sweep_cmd->add_option("--orders", sweep_orders, "Divergence order grid")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--zs", sweep_zs, "Margin exponent grid")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--gammas", sweep_gammas, "Entropy-gap weight grid")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "Report path")->capture_default_str();
  sweep_cmd->callback(
      [&] { run_sweep(sweep_suite, sweep_strategy, sweep_orders, sweep_zs, sweep_gammas, sweep_out); });

  auto* bench_cmd = analyze_cmd->add_subcommand("bench", "Per-step strategy overhead");
  StrategyFlags bench_strategy;
  int bench_vocab = 32000;
  int bench_steps = 10000;
  std::uint64_t bench_seed = 7;
  std::vector<std::string> bench_strategies = {"cad", "adacad", "cocoa"};
  std::string bench_out = "bench.jsonl";
  bench_cmd->add_option("--vocab", bench_vocab, "Vocabulary size for synthetic pairs")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  bench_cmd->add_option("--steps", bench_steps, "Timed steps per strategy")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench_seed, "Pair generation seed")->capture_default_str();
  bench_cmd->add_option("--strategies", bench_strategies, "Strategies to time")
      ->delimiter(',')
      ->check(CLI::IsMember(kStrategyNames))
      ->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "Report path")->capture_default_str();
  add_strategy_flags(bench_cmd, &bench_strategy);
  bench_cmd->callback([&] {
    run_bench(bench_vocab, bench_steps, bench_strategies, bench_seed, bench_strategy, bench_out);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
