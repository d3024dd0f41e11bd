#include "cocoa/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace cocoa {

using nlohmann::json;

// =============================================================================
// Deterministic fan-out
// =============================================================================

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  if (threads < 1) throw std::invalid_argument("threads must be at least 1");
  const int workers = std::min(threads, n);
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk;
    const int end = std::min(n, begin + chunk);
    pool.emplace_back([&, begin, end] {
      try {
        for (int i = begin; i < end; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// =============================================================================
// Rank correlation
// =============================================================================

namespace {

std::vector<double> fractional_ranks(std::span<const double> v) {
  const size_t n = v.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (v[a] != v[b]) return v[a] < v[b];
    return a < b;
  });
  std::vector<double> ranks(n, 0.0);
  size_t i = 0;
  while (i < n) {
    size_t j = i;
    while (j + 1 < n && v[order[j + 1]] == v[order[i]]) ++j;
    // 1-based ranks; a tied run gets the average of its positions.
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

bool has_rank_variance(const std::vector<double>& ranks) {
  for (double r : ranks) {
    if (r != ranks.front()) return true;
  }
  return false;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
  if (x.size() < 2) throw std::invalid_argument("spearman: need at least 2 observations");
  for (double v : x) {
    if (!std::isfinite(v)) throw std::invalid_argument("spearman: non-finite value");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw std::invalid_argument("spearman: non-finite value");
  }
  const auto rx = fractional_ranks(x);
  const auto ry = fractional_ranks(y);
  if (!has_rank_variance(rx) || !has_rank_variance(ry)) {
    throw std::runtime_error("spearman: zero rank variance");
  }
  if (rx == ry) return 1.0;
  const double flip = static_cast<double>(x.size() + 1);
  bool reversed = true;
  for (size_t i = 0; i < rx.size(); ++i) {
    if (rx[i] + ry[i] != flip) {
      reversed = false;
      break;
    }
  }
  if (reversed) return -1.0;

  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double cov = 0.0;
  double var_x = 0.0;
  double var_y = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    cov += dx * dy;
    var_x += dx * dx;
    var_y += dy * dy;
  }
  return std::clamp(cov / std::sqrt(var_x * var_y), -1.0, 1.0);
}

// =============================================================================
// Exact match
// =============================================================================

namespace {

int instance_max_len(const ConflictInstance& inst) {
  const size_t path =
      std::max(inst.parametric_answer.size(), inst.context_answer.size());
  return static_cast<int>(path) + 1;
}

bool matches_gold(const std::vector<TokenId>& emitted, const std::vector<TokenId>& gold) {
  std::span<const TokenId> body(emitted);
  if (!body.empty() && body.back() == kEndToken) body = body.first(body.size() - 1);
  return body.size() == gold.size() && std::equal(body.begin(), body.end(), gold.begin());
}

EmReport reduce_em(const std::vector<ConflictInstance>& suite, const std::vector<char>& hits) {
  EmReport report;
  for (size_t i = 0; i < suite.size(); ++i) {
    if (suite[i].conflict) {
      ++report.n_conflict;
      report.hits_conflict += hits[i];
    } else {
      ++report.n_agree;
      report.hits_agree += hits[i];
    }
  }
  if (report.n_conflict > 0) {
    report.em_conflict = static_cast<double>(report.hits_conflict) / report.n_conflict;
  }
  if (report.n_agree > 0) {
    report.em_agree = static_cast<double>(report.hits_agree) / report.n_agree;
  }
  const int total = report.n_conflict + report.n_agree;
  report.em_overall = static_cast<double>(report.hits_conflict + report.hits_agree) / total;
  return report;
}

}  // namespace

EmReport exact_match_eval(const std::vector<ConflictInstance>& suite, Strategy strategy,
                          const StrategyConfig& cfg, int threads) {
  if (suite.empty()) throw std::invalid_argument("exact_match_eval: empty suite");
  cfg.validate();
  std::vector<char> hits(suite.size(), 0);
  parallel_for(static_cast<int>(suite.size()), threads, [&](int i) {
    const ConflictInstance& inst = suite[static_cast<size_t>(i)];
    ToyProvider provider(inst);
    const DecodeResult result = decode(provider, strategy, cfg, instance_max_len(inst));
    hits[static_cast<size_t>(i)] = matches_gold(result.tokens, inst.context_answer) ? 1 : 0;
  });
  return reduce_em(suite, hits);
}

// =============================================================================
// Conflict sensitivity
// =============================================================================

SensitivityReport conflict_sensitivity(const std::vector<ConflictInstance>& suite,
                                       Strategy strategy, const StrategyConfig& cfg,
                                       int threads) {
  bool any_conflict = false;
  bool any_agree = false;
  for (const auto& inst : suite) (inst.conflict ? any_conflict : any_agree) = true;
  if (!any_conflict || !any_agree) {
    throw std::invalid_argument(
        "conflict_sensitivity: suite needs both conflict and no-conflict instances");
  }
  cfg.validate();

  struct Partial {
    double rho_sum = 0.0;
    int steps = 0;
  };
  std::vector<Partial> partials(suite.size());
  parallel_for(static_cast<int>(suite.size()), threads, [&](int i) {
    const ConflictInstance& inst = suite[static_cast<size_t>(i)];
    ToyProvider provider(inst);
    Partial& part = partials[static_cast<size_t>(i)];
    std::vector<TokenId> emitted;
    const int max_len = instance_max_len(inst);
    while (static_cast<int>(emitted.size()) < max_len) {
      auto dual = provider.next(emitted);
      if (!dual) break;
      const StepDiagnostics diag = diagnose(dual->prior, dual->ctx, cfg);
      const TokenDistribution adjusted =
          apply_strategy(strategy, dual->prior, dual->ctx, cfg, diag);
      part.rho_sum += spearman(dual->ctx.probs(), adjusted.probs());
      part.steps += 1;
      const TokenId chosen = greedy_select(adjusted);
      emitted.push_back(chosen);
      if (chosen == kEndToken) break;
    }
  });

  double sum_conflict = 0.0;
  double sum_agree = 0.0;
  int steps_conflict = 0;
  int steps_agree = 0;
  for (size_t i = 0; i < suite.size(); ++i) {
    if (suite[i].conflict) {
      sum_conflict += partials[i].rho_sum;
      steps_conflict += partials[i].steps;
    } else {
      sum_agree += partials[i].rho_sum;
      steps_agree += partials[i].steps;
    }
  }
  SensitivityReport report;
  report.rho_conflict = sum_conflict / steps_conflict;
  report.rho_agree = sum_agree / steps_agree;
  report.delta_rho_abs = std::abs(report.rho_agree - report.rho_conflict);
  return report;
}

// =============================================================================
// Ablations and sweeps
// =============================================================================

std::vector<AblationRow> run_ablation(const std::vector<ConflictInstance>& suite,
                                      const StrategyConfig& cfg, int threads) {
  StrategyConfig base = cfg;
  base.ablation = AblationSwitches{};

  std::vector<AblationRow> rows;
  rows.reserve(7);

  auto eval_variant = [&](const std::string& name, const StrategyConfig& variant_cfg,
                          Strategy strategy) {
    rows.push_back({name, exact_match_eval(suite, strategy, variant_cfg, threads)});
  };

  eval_variant("full", base, Strategy::kCocoa);

  StrategyConfig kl = base;
  kl.ablation.use_kl_instead = true;
  eval_variant("kl-instead", kl, Strategy::kCocoa);

  StrategyConfig no_renyi = base;
  no_renyi.ablation.use_renyi = false;
  eval_variant("no-renyi", no_renyi, Strategy::kCocoa);

  StrategyConfig no_gap = base;
  no_gap.ablation.use_entropy_gap = false;
  eval_variant("no-entropy-gap", no_gap, Strategy::kCocoa);

  StrategyConfig no_peak = base;
  no_peak.ablation.use_peakedness = false;
  eval_variant("no-peakedness", no_peak, Strategy::kCocoa);

  StrategyConfig fixed = base;
  fixed.ablation.adaptive_gating = false;
  fixed.fixed_lambda = 0.5;
  eval_variant("fixed-lambda-0.5", fixed, Strategy::kCocoa);

  eval_variant("greedy", base, Strategy::kGreedy);
  return rows;
}

std::vector<SweepRow> sweep(const std::vector<ConflictInstance>& suite, const StrategyConfig& cfg,
                            std::span<const double> renyi_orders, std::span<const double> zs,
                            std::span<const double> gammas, int threads) {
  if (renyi_orders.empty() || zs.empty() || gammas.empty()) {
    throw std::invalid_argument("sweep: all grids must be nonempty");
  }
  std::vector<SweepRow> rows;
  rows.reserve(renyi_orders.size() * zs.size() * gammas.size());
  for (double order : renyi_orders) {
    for (double z : zs) {
      for (double gamma : gammas) {
        StrategyConfig cell = cfg;
        cell.renyi_order = order;
        cell.z = z;
        cell.gamma = gamma;
        SweepRow row;
        row.renyi_order = order;
        row.z = z;
        row.gamma = gamma;
        row.em = exact_match_eval(suite, Strategy::kCocoa, cell, threads);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

// =============================================================================
// Latency microbenchmark
// =============================================================================

std::vector<LatencyRow> bench_latency(int vocab_size, int n_steps,
                                      const std::vector<Strategy>& strategies,
                                      const StrategyConfig& cfg, std::uint64_t seed) {
  if (vocab_size < 2) throw std::invalid_argument("bench_latency: vocab_size must be >= 2");
  if (n_steps < 1) throw std::invalid_argument("bench_latency: n_steps must be >= 1");
  if (strategies.empty()) throw std::invalid_argument("bench_latency: no strategies given");
  cfg.validate();

  // A small pool of random pairs is prepared outside the timed region and
  // cycled through, so pair construction never lands inside a measurement.
  const int pool_n = std::min(n_steps, 64);
  std::mt19937_64 rng(seed);
  std::vector<std::pair<TokenDistribution, TokenDistribution>> pool;
  pool.reserve(static_cast<size_t>(pool_n));
  std::vector<double> logits(static_cast<size_t>(vocab_size));
  for (int p = 0; p < pool_n; ++p) {
    for (auto& x : logits) x = 8.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    TokenDistribution prior = TokenDistribution::from_logits(logits);
    for (auto& x : logits) x = 8.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
    TokenDistribution ctx = TokenDistribution::from_logits(logits);
    pool.emplace_back(std::move(prior), std::move(ctx));
  }

  using Clock = std::chrono::steady_clock;
  volatile double sink = 0.0;
  std::vector<LatencyRow> rows;
  rows.reserve(strategies.size());

  for (Strategy strategy : strategies) {
    auto run_once = [&](const TokenDistribution& prior, const TokenDistribution& ctx) {
      switch (strategy) {
        case Strategy::kGreedy:
          sink = sink + static_cast<double>(greedy_select(ctx));
          return;
        case Strategy::kCad:
          sink = sink + cad_adjust(prior, ctx, cfg.cad_alpha).prob(0);
          return;
        case Strategy::kCoiecd:
          sink = sink + coiecd_adjust(prior, ctx, cfg).prob(0);
          return;
        case Strategy::kConfcd:
          sink = sink + confcd_adjust(prior, ctx).prob(0);
          return;
        case Strategy::kAdacad:
          sink = sink + adacad_adjust(prior, ctx).first.prob(0);
          return;
        case Strategy::kCocoa:
          sink = sink + cocoa_adjust(prior, ctx, cfg).first.prob(0);
          return;
      }
      throw std::invalid_argument("bench_latency: unknown strategy");
    };

    const int warmup = std::min(pool_n, 8);
    for (int i = 0; i < warmup; ++i) {
      const auto& [prior, ctx] = pool[static_cast<size_t>(i)];
      run_once(prior, ctx);
    }

    std::vector<double> samples(static_cast<size_t>(n_steps));
    for (int i = 0; i < n_steps; ++i) {
      const auto& [prior, ctx] = pool[static_cast<size_t>(i % pool_n)];
      const auto t0 = Clock::now();
      run_once(prior, ctx);
      const auto t1 = Clock::now();
      samples[static_cast<size_t>(i)] =
          static_cast<double>(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
    }

    LatencyRow row;
    row.strategy = to_string(strategy);
    row.mean_ns = std::accumulate(samples.begin(), samples.end(), 0.0) / n_steps;
    std::sort(samples.begin(), samples.end());
    const auto idx = static_cast<size_t>(
        std::ceil(0.99 * static_cast<double>(n_steps))) - 1;
    row.p99_ns = samples[std::min(idx, samples.size() - 1)];
    rows.push_back(std::move(row));
  }
  (void)sink;
  return rows;
}

// =============================================================================
// Report rendering
// =============================================================================

namespace {

json em_to_json(const EmReport& em) {
  return json{{"n_conflict", em.n_conflict},   {"n_agree", em.n_agree},
              {"hits_conflict", em.hits_conflict}, {"hits_agree", em.hits_agree},
              {"em_conflict", em.em_conflict}, {"em_agree", em.em_agree},
              {"em_overall", em.em_overall}};
}

std::string table_line(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return std::string(buf) + "\n";
}

}  // namespace

std::string em_report_jsonl(std::span<const EmRow> rows, std::uint64_t seed) {
  std::ostringstream out;
  out << json{{"type", "header"}, {"kind", "exact_match"}, {"seed", seed}}.dump() << '\n';
  for (const auto& row : rows) {
    json j = em_to_json(row.em);
    j["type"] = "row";
    j["strategy"] = row.strategy;
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string em_report_text(std::span<const EmRow> rows, std::uint64_t seed) {
  std::string out = "# exact_match seed=" + std::to_string(seed) + "\n";
  out += table_line("%-18s %12s %12s %12s", "strategy", "em_conflict", "em_agree", "em_overall");
  for (const auto& row : rows) {
    out += table_line("%-18s %12.4f %12.4f %12.4f", row.strategy.c_str(), row.em.em_conflict,
                      row.em.em_agree, row.em.em_overall);
  }
  return out;
}

std::string sensitivity_report_jsonl(std::span<const SensitivityRow> rows, std::uint64_t seed) {
  std::ostringstream out;
  out << json{{"type", "header"}, {"kind", "sensitivity"}, {"seed", seed}}.dump() << '\n';
  for (const auto& [name, rep] : rows) {
    const json j{{"type", "row"},
                 {"strategy", name},
                 {"rho_conflict", rep.rho_conflict},
                 {"rho_agree", rep.rho_agree},
                 {"delta_rho_abs", rep.delta_rho_abs}};
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string sensitivity_report_text(std::span<const SensitivityRow> rows, std::uint64_t seed) {
  std::string out = "# sensitivity seed=" + std::to_string(seed) + "\n";
  out += table_line("%-18s %14s %14s %14s", "strategy", "rho_conflict", "rho_agree",
                    "delta_rho_abs");
  for (const auto& [name, rep] : rows) {
    out += table_line("%-18s %14.6f %14.6f %14.6f", name.c_str(), rep.rho_conflict, rep.rho_agree,
                      rep.delta_rho_abs);
  }
  return out;
}

std::string ablation_report_jsonl(std::span<const AblationRow> rows, std::uint64_t seed) {
  std::ostringstream out;
  out << json{{"type", "header"}, {"kind", "ablation"}, {"seed", seed}}.dump() << '\n';
  for (const auto& row : rows) {
    json j = em_to_json(row.em);
    j["type"] = "row";
    j["variant"] = row.variant;
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string ablation_report_text(std::span<const AblationRow> rows, std::uint64_t seed) {
  std::string out = "# ablation seed=" + std::to_string(seed) + "\n";
  out += table_line("%-18s %12s %12s %12s", "variant", "em_conflict", "em_agree", "em_overall");
  for (const auto& row : rows) {
    out += table_line("%-18s %12.4f %12.4f %12.4f", row.variant.c_str(), row.em.em_conflict,
                      row.em.em_agree, row.em.em_overall);
  }
  return out;
}

std::string sweep_report_jsonl(std::span<const SweepRow> rows, std::uint64_t seed) {
  std::ostringstream out;
  out << json{{"type", "header"}, {"kind", "sweep"}, {"seed", seed}}.dump() << '\n';
  for (const auto& row : rows) {
    json j = em_to_json(row.em);
    j["type"] = "row";
    j["renyi_order"] = row.renyi_order;
    j["z"] = row.z;
    j["gamma"] = row.gamma;
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string sweep_report_text(std::span<const SweepRow> rows, std::uint64_t seed) {
  std::string out = "# sweep seed=" + std::to_string(seed) + "\n";
  out += table_line("%8s %8s %8s %12s %12s %12s", "order", "z", "gamma", "em_conflict", "em_agree",
                    "em_overall");
  for (const auto& row : rows) {
    out += table_line("%8.3f %8.3f %8.3f %12.4f %12.4f %12.4f", row.renyi_order, row.z, row.gamma,
                      row.em.em_conflict, row.em.em_agree, row.em.em_overall);
  }
  return out;
}

std::string bench_report_jsonl(std::span<const LatencyRow> rows, int vocab_size, int n_steps,
                               std::uint64_t seed) {
  std::ostringstream out;
  out << json{{"type", "header"},
              {"kind", "latency"},
              {"vocab_size", vocab_size},
              {"n_steps", n_steps},
              {"seed", seed}}
             .dump()
      << '\n';
  for (const auto& row : rows) {
    const json j{{"type", "row"},
                 {"strategy", row.strategy},
                 {"mean_ns", row.mean_ns},
                 {"p99_ns", row.p99_ns}};
    out << j.dump() << '\n';
  }
  return out.str();
}

std::string bench_report_text(std::span<const LatencyRow> rows, int vocab_size, int n_steps,
                              std::uint64_t seed) {
  std::string out = "# latency vocab_size=" + std::to_string(vocab_size) +
                    " n_steps=" + std::to_string(n_steps) + " seed=" + std::to_string(seed) +
                    "\n";
  out += table_line("%-18s %14s %14s", "strategy", "mean_ns", "p99_ns");
  for (const auto& row : rows) {
    out += table_line("%-18s %14.1f %14.1f", row.strategy.c_str(), row.mean_ns, row.p99_ns);
  }
  return out;
}

}  // namespace cocoa
