#include "cocoa/providers.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <httplib.h>
#include <json.hpp>

namespace cocoa {

using nlohmann::json;

// =============================================================================
// Toy language model
// =============================================================================

namespace {

void check_answer(const std::vector<TokenId>& answer, const char* which, int vocab_size) {
  if (answer.empty()) {
    throw std::invalid_argument(std::string(which) + " answer must not be empty");
  }
  for (TokenId t : answer) {
    if (t <= kEndToken || t >= vocab_size) {
      throw std::invalid_argument(std::string(which) +
                                  " answer tokens must lie in [1, vocab_size)");
    }
  }
}

void check_knob(double value, const char* name, double lo, double hi) {
  if (!std::isfinite(value) || value < lo || value >= hi) {
    throw std::invalid_argument(std::string(name) + " out of range");
  }
}

/// Peak weight within the non-distractor mass; approaches 1 as sharpness
/// grows, 0.75 at sharpness 1.
double peak_share(double sharpness) { return 1.0 - 1.0 / (2.0 * (1.0 + sharpness)); }

std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ull;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebull;
  x ^= x >> 31;
  return x;
}

/// Deterministic unit draw for one distractor token, keyed by the side's
/// knobs. Sides with equal knobs get equal tails; sides with different
/// knobs get decorrelated ones.
double tail_unit(double sharpness, double distractor_mass, TokenId token) {
  std::uint64_t h = std::bit_cast<std::uint64_t>(sharpness);
  h = mix64(h ^ (std::bit_cast<std::uint64_t>(distractor_mass) + 0x9e3779b97f4a7c15ull));
  h = mix64(h ^ static_cast<std::uint64_t>(token));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

TokenDistribution build_side(const std::vector<TokenId>& answer, const std::vector<TokenId>& other,
                             double sharpness, double distractor_mass, double spread,
                             int vocab_size, size_t pos) {
  const TokenId peak = pos < answer.size() ? answer[pos] : kEndToken;
  TokenId rival = pos < other.size() ? other[pos] : kEndToken;
  bool has_rival = true;
  if (rival == peak) {
    if (peak == kEndToken) {
      has_rival = false;
    } else {
      rival = kEndToken;
    }
  }

  const double w = peak_share(sharpness);
  const double main_mass = 1.0 - distractor_mass;
  std::vector<double> probs(static_cast<size_t>(vocab_size), 0.0);
  if (has_rival) {
    probs[static_cast<size_t>(peak)] = main_mass * w;
    probs[static_cast<size_t>(rival)] = main_mass * (1.0 - w);
  } else {
    probs[static_cast<size_t>(peak)] = main_mass;
  }

  const int n_distractors = vocab_size - 1 - (has_rival ? 1 : 0);
  if (n_distractors > 0 && distractor_mass > 0.0) {
    if (spread <= 0.0) {
      const double share = distractor_mass / n_distractors;
      for (TokenId t = 0; t < vocab_size; ++t) {
        if (t != peak && (!has_rival || t != rival)) probs[static_cast<size_t>(t)] = share;
      }
    } else {
      // Per-token tilt keyed by the side's knobs, so equal knobs keep the
      // sides bit-identical while different knobs give the tails
      // independent orderings.
      std::vector<double> weights(static_cast<size_t>(vocab_size), 0.0);
      double weight_sum = 0.0;
      for (TokenId t = 0; t < vocab_size; ++t) {
        if (t == peak || (has_rival && t == rival)) continue;
        const double u = tail_unit(sharpness, distractor_mass, t);
        const double wgt = std::exp(6.0 * spread * (u - 0.5));
        weights[static_cast<size_t>(t)] = wgt;
        weight_sum += wgt;
      }
      for (TokenId t = 0; t < vocab_size; ++t) {
        if (t == peak || (has_rival && t == rival)) continue;
        probs[static_cast<size_t>(t)] =
            distractor_mass * weights[static_cast<size_t>(t)] / weight_sum;
      }
    }
  }
  return TokenDistribution::from_probs(probs);
}

}  // namespace

void ConflictInstance::validate() const {
  if (vocab_size < 2) throw std::invalid_argument("instance vocab_size must be at least 2");
  check_answer(parametric_answer, "parametric", vocab_size);
  check_answer(context_answer, "context", vocab_size);
  const bool answers_differ = parametric_answer != context_answer;
  if (conflict != answers_differ) {
    throw std::invalid_argument("conflict flag must match whether the answers differ");
  }
  check_knob(sharpness, "sharpness", 1e-9, std::numeric_limits<double>::infinity());
  check_knob(distractor_mass, "distractor_mass", 0.0, 0.5);
  if (prior_sharpness) check_knob(*prior_sharpness, "prior_sharpness", 1e-9, 1e300);
  if (prior_distractor_mass) check_knob(*prior_distractor_mass, "prior_distractor_mass", 0.0, 0.5);
  check_knob(distractor_spread, "distractor_spread", 0.0, 1e6);
  for (TokenId t : query_tokens) {
    if (t < 0 || t >= vocab_size) throw std::invalid_argument("query token out of range");
  }
  for (TokenId t : context_tokens) {
    if (t < 0 || t >= vocab_size) throw std::invalid_argument("context token out of range");
  }
}

DualStep toy_lm_step(const ConflictInstance& instance, std::span<const TokenId> emitted) {
  instance.validate();
  const size_t pos = emitted.size();
  const size_t path_len =
      std::max(instance.parametric_answer.size(), instance.context_answer.size());
  if (pos > path_len) {
    throw std::invalid_argument("emitted is longer than the answer path (" +
                                std::to_string(pos) + " > " + std::to_string(path_len) + ")");
  }
  const double prior_sharp = instance.prior_sharpness.value_or(instance.sharpness);
  const double prior_dm = instance.prior_distractor_mass.value_or(instance.distractor_mass);

  TokenDistribution prior =
      build_side(instance.parametric_answer, instance.context_answer, prior_sharp, prior_dm,
                 instance.distractor_spread, instance.vocab_size, pos);
  TokenDistribution ctx =
      build_side(instance.context_answer, instance.parametric_answer, instance.sharpness,
                 instance.distractor_mass, instance.distractor_spread, instance.vocab_size, pos);
  const bool terminal = pos >= instance.context_answer.size();
  return DualStep{std::move(prior), std::move(ctx), terminal};
}

ToyProvider::ToyProvider(ConflictInstance instance) : instance_(std::move(instance)) {
  instance_.validate();
}

std::optional<DualStep> ToyProvider::next(std::span<const TokenId> emitted) {
  const size_t path_len =
      std::max(instance_.parametric_answer.size(), instance_.context_answer.size());
  if (emitted.size() > path_len) return std::nullopt;
  return toy_lm_step(instance_, emitted);
}

// =============================================================================
// Suite generation
// =============================================================================

namespace {

/// Uniform double in [0, 1) from the top 53 bits; keeps the draw stream
/// identical across standard libraries.
double next_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double draw(std::mt19937_64& rng, Band band) {
  return band.lo + (band.hi - band.lo) * next_unit(rng);
}

int draw_int(std::mt19937_64& rng, int lo, int hi) {
  const auto range = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection keeps the draw unbiased without implementation-defined
  // distribution internals.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return lo + static_cast<int>(x % range);
}

/// Draws `count` distinct tokens from [1, vocab_size), excluding `taken`.
std::vector<TokenId> draw_distinct(std::mt19937_64& rng, int count, int vocab_size,
                                   std::vector<TokenId>& taken) {
  std::vector<TokenId> out;
  out.reserve(static_cast<size_t>(count));
  while (static_cast<int>(out.size()) < count) {
    const TokenId t = static_cast<TokenId>(draw_int(rng, 1, vocab_size - 1));
    if (std::find(taken.begin(), taken.end(), t) != taken.end()) continue;
    taken.push_back(t);
    out.push_back(t);
  }
  return out;
}

std::vector<TokenId> draw_tokens(std::mt19937_64& rng, int count, int vocab_size) {
  std::vector<TokenId> out(static_cast<size_t>(count));
  for (auto& t : out) t = static_cast<TokenId>(draw_int(rng, 1, vocab_size - 1));
  return out;
}

std::string format_id(const char* prefix, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s-%04d", prefix, index);
  return buf;
}

}  // namespace

SuiteOptions SuiteOptions::plain() { return SuiteOptions{}; }

SuiteOptions SuiteOptions::benchmark() {
  SuiteOptions o;
  o.conflict_asymmetric = true;
  o.conflict_ctx = SidePlan{{8.0, 10.0}, {0.0, 0.05}};
  o.conflict_prior = SidePlan{{1.0, 2.5}, {0.05, 0.3}};
  o.conflict_one_hot_fraction = 0.1;
  o.agree_asymmetric = true;
  o.agree_ctx = SidePlan{{1.0, 3.0}, {0.05, 0.3}};
  o.agree_prior = SidePlan{{1.0, 10.0}, {0.05, 0.3}};
  o.distractor_spread = Band{0.5, 1.0};
  return o;
}

std::vector<ConflictInstance> generate_suite(int n_conflict, int n_agree, int vocab_size,
                                             std::uint64_t seed, const SuiteOptions& options) {
  if (n_conflict < 0 || n_agree < 0) throw std::invalid_argument("instance counts must be >= 0");
  if (vocab_size < 4) throw std::invalid_argument("generate_suite needs vocab_size >= 4");
  if (options.answer_len_min < 1 || options.answer_len_max < options.answer_len_min) {
    throw std::invalid_argument("answer length bounds are inconsistent");
  }
  // Conflict instances need two disjoint answers among the non-end tokens.
  const int conflict_cap = (vocab_size - 1) / 2;
  const int agree_cap = vocab_size - 1;
  if (n_conflict > 0 && conflict_cap < options.answer_len_min) {
    throw std::invalid_argument("vocab too small to draw distinct conflicting answers");
  }

  std::mt19937_64 rng(seed);
  std::vector<ConflictInstance> suite;
  suite.reserve(static_cast<size_t>(n_conflict + n_agree));

  for (int i = 0; i < n_conflict; ++i) {
    ConflictInstance inst;
    inst.instance_id = format_id("conflict", i);
    inst.vocab_size = vocab_size;
    inst.conflict = true;
    const int len =
        draw_int(rng, options.answer_len_min, std::min(options.answer_len_max, conflict_cap));
    const bool one_hot = next_unit(rng) < options.conflict_one_hot_fraction;
    double ctx_sharp = draw(rng, options.conflict_ctx.sharpness);
    double ctx_dm = draw(rng, options.conflict_ctx.distractor_mass);
    const double prior_sharp = options.conflict_asymmetric
                                   ? draw(rng, options.conflict_prior.sharpness)
                                   : ctx_sharp;
    const double prior_dm = options.conflict_asymmetric
                                ? draw(rng, options.conflict_prior.distractor_mass)
                                : ctx_dm;
    if (one_hot) {
      ctx_sharp = kOneHotSharpness;
      ctx_dm = 0.0;
    }
    inst.sharpness = ctx_sharp;
    inst.distractor_mass = ctx_dm;
    if (options.conflict_asymmetric || one_hot) {
      inst.prior_sharpness = prior_sharp;
      inst.prior_distractor_mass = prior_dm;
    }
    inst.distractor_spread = draw(rng, options.distractor_spread);
    std::vector<TokenId> taken;
    inst.parametric_answer = draw_distinct(rng, len, vocab_size, taken);
    inst.context_answer = draw_distinct(rng, len, vocab_size, taken);
    inst.query_tokens = draw_tokens(rng, 3, vocab_size);
    inst.context_tokens = draw_tokens(rng, 4, vocab_size);
    inst.validate();
    suite.push_back(std::move(inst));
  }

  for (int i = 0; i < n_agree; ++i) {
    ConflictInstance inst;
    inst.instance_id = format_id("agree", i);
    inst.vocab_size = vocab_size;
    inst.conflict = false;
    const int len =
        draw_int(rng, options.answer_len_min, std::min(options.answer_len_max, agree_cap));
    inst.sharpness = draw(rng, options.agree_ctx.sharpness);
    inst.distractor_mass = draw(rng, options.agree_ctx.distractor_mass);
    if (options.agree_asymmetric) {
      inst.prior_sharpness = draw(rng, options.agree_prior.sharpness);
      inst.prior_distractor_mass = draw(rng, options.agree_prior.distractor_mass);
    }
    inst.distractor_spread = draw(rng, options.distractor_spread);
    std::vector<TokenId> taken;
    inst.parametric_answer = draw_distinct(rng, len, vocab_size, taken);
    inst.context_answer = inst.parametric_answer;
    inst.query_tokens = draw_tokens(rng, 3, vocab_size);
    inst.context_tokens = draw_tokens(rng, 4, vocab_size);
    inst.validate();
    suite.push_back(std::move(inst));
  }
  return suite;
}

// =============================================================================
// Suite serialization
// =============================================================================

namespace {

json instance_to_json(const ConflictInstance& inst) {
  json j{{"type", "instance"},
         {"instance_id", inst.instance_id},
         {"conflict", inst.conflict},
         {"vocab_size", inst.vocab_size},
         {"query_tokens", inst.query_tokens},
         {"context_tokens", inst.context_tokens},
         {"parametric_answer", inst.parametric_answer},
         {"context_answer", inst.context_answer},
         {"sharpness", inst.sharpness},
         {"distractor_mass", inst.distractor_mass},
         {"distractor_spread", inst.distractor_spread}};
  j["prior_sharpness"] = inst.prior_sharpness ? json(*inst.prior_sharpness) : json(nullptr);
  j["prior_distractor_mass"] =
      inst.prior_distractor_mass ? json(*inst.prior_distractor_mass) : json(nullptr);
  return j;
}

ConflictInstance instance_from_json(const json& j) {
  ConflictInstance inst;
  inst.instance_id = j.at("instance_id").get<std::string>();
  inst.conflict = j.at("conflict").get<bool>();
  inst.vocab_size = j.at("vocab_size").get<int>();
  inst.query_tokens = j.at("query_tokens").get<std::vector<TokenId>>();
  inst.context_tokens = j.at("context_tokens").get<std::vector<TokenId>>();
  inst.parametric_answer = j.at("parametric_answer").get<std::vector<TokenId>>();
  inst.context_answer = j.at("context_answer").get<std::vector<TokenId>>();
  inst.sharpness = j.at("sharpness").get<double>();
  inst.distractor_mass = j.at("distractor_mass").get<double>();
  inst.distractor_spread = j.at("distractor_spread").get<double>();
  if (j.contains("prior_sharpness") && !j.at("prior_sharpness").is_null()) {
    inst.prior_sharpness = j.at("prior_sharpness").get<double>();
  }
  if (j.contains("prior_distractor_mass") && !j.at("prior_distractor_mass").is_null()) {
    inst.prior_distractor_mass = j.at("prior_distractor_mass").get<double>();
  }
  inst.validate();
  return inst;
}

}  // namespace

std::string suite_to_jsonl(const std::vector<ConflictInstance>& suite, int vocab_size,
                           std::uint64_t seed) {
  std::ostringstream out;
  int n_conflict = 0;
  for (const auto& inst : suite) n_conflict += inst.conflict ? 1 : 0;
  const json header{{"type", "header"},
                    {"kind", "conflict_suite"},
                    {"vocab_size", vocab_size},
                    {"seed", seed},
                    {"n_conflict", n_conflict},
                    {"n_agree", static_cast<int>(suite.size()) - n_conflict}};
  out << header.dump() << '\n';
  for (const auto& inst : suite) out << instance_to_json(inst).dump() << '\n';
  return out.str();
}

void save_suite(const std::vector<ConflictInstance>& suite, int vocab_size, std::uint64_t seed,
                const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << suite_to_jsonl(suite, vocab_size, seed);
}

std::vector<ConflictInstance> load_suite(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  int line_no = 0;
  std::vector<ConflictInstance> suite;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
    const std::string type = j.value("type", "");
    if (!saw_header) {
      if (type != "header" || j.value("kind", "") != "conflict_suite") {
        throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                 ": expected a conflict_suite header");
      }
      saw_header = true;
      continue;
    }
    if (type != "instance") {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected an instance");
    }
    try {
      suite.push_back(instance_from_json(j));
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!saw_header) throw std::runtime_error(path + ": missing header line");
  return suite;
}

// =============================================================================
// Logit traces
// =============================================================================

void write_trace(std::ostream& out, int vocab_size, const std::string& note,
                 const std::vector<TraceRecord>& records) {
  if (vocab_size < 2) throw std::invalid_argument("trace vocab_size must be at least 2");
  const json header{{"type", "header"}, {"vocab_size", vocab_size}, {"note", note}};
  out << header.dump() << '\n';
  for (const auto& rec : records) {
    if (static_cast<int>(rec.prior_logits.size()) != vocab_size ||
        static_cast<int>(rec.ctx_logits.size()) != vocab_size) {
      throw std::invalid_argument("trace record width does not match vocab_size");
    }
    json j{{"step", rec.step},
           {"prior_logits", rec.prior_logits},
           {"ctx_logits", rec.ctx_logits}};
    if (rec.chosen) j["chosen"] = *rec.chosen;
    out << j.dump() << '\n';
  }
}

void save_trace(const std::string& path, int vocab_size, const std::string& note,
                const std::vector<TraceRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace(out, vocab_size, note, records);
}

TraceReplay::TraceReplay(const std::string& path) : path_(path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  while (std::getline(in, line)) lines_.push_back(line);
  if (lines_.empty()) throw std::runtime_error(path + ":1: missing trace header");
  json header;
  try {
    header = json::parse(lines_[0]);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ":1: " + e.what());
  }
  if (header.value("type", "") != "header" || !header.contains("vocab_size")) {
    throw std::runtime_error(path + ":1: first line must be a trace header with vocab_size");
  }
  vocab_size_ = header.at("vocab_size").get<int>();
  if (vocab_size_ < 2) throw std::runtime_error(path + ":1: vocab_size must be at least 2");
  note_ = header.value("note", "");
  cursor_ = 1;
}

std::optional<TraceRecord> TraceReplay::next() {
  while (cursor_ < lines_.size() && lines_[cursor_].empty()) ++cursor_;
  if (cursor_ >= lines_.size()) return std::nullopt;
  const size_t line_no = cursor_ + 1;
  const std::string& line = lines_[cursor_++];
  json j;
  try {
    j = json::parse(line);
  } catch (const json::exception& e) {
    throw std::runtime_error(path_ + ":" + std::to_string(line_no) + ": " + e.what());
  }
  TraceRecord rec;
  try {
    rec.step = j.at("step").get<int>();
    rec.prior_logits = j.at("prior_logits").get<std::vector<double>>();
    rec.ctx_logits = j.at("ctx_logits").get<std::vector<double>>();
    if (j.contains("chosen") && !j.at("chosen").is_null()) {
      rec.chosen = j.at("chosen").get<TokenId>();
    }
  } catch (const json::exception& e) {
    throw std::runtime_error(path_ + ":" + std::to_string(line_no) + ": " + e.what());
  }
  if (static_cast<int>(rec.prior_logits.size()) != vocab_size_ ||
      static_cast<int>(rec.ctx_logits.size()) != vocab_size_) {
    throw std::runtime_error(path_ + ":" + std::to_string(line_no) +
                             ": logit width does not match header vocab_size " +
                             std::to_string(vocab_size_));
  }
  for (double x : rec.prior_logits) {
    if (!std::isfinite(x)) {
      throw std::runtime_error(path_ + ":" + std::to_string(line_no) + ": non-finite logit");
    }
  }
  for (double x : rec.ctx_logits) {
    if (!std::isfinite(x)) {
      throw std::runtime_error(path_ + ":" + std::to_string(line_no) + ": non-finite logit");
    }
  }
  return rec;
}

ReplayProvider::ReplayProvider(const std::string& path) : replay_(path) {}

std::optional<DualStep> ReplayProvider::next(std::span<const TokenId> /*emitted*/) {
  auto rec = replay_.next();
  if (!rec) return std::nullopt;
  return DualStep{TokenDistribution::from_logits(rec->prior_logits),
                  TokenDistribution::from_logits(rec->ctx_logits), false};
}

// =============================================================================
// Remote logit service
// =============================================================================

RemoteClient::RemoteClient(RemoteConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) throw std::invalid_argument("remote endpoint must not be empty");
  if (config_.timeout_ms <= 0) throw std::invalid_argument("remote timeout must be positive");
}

std::vector<double> RemoteClient::post_logits(std::span<const TokenId> query_tokens,
                                              const std::vector<TokenId>* context_tokens,
                                              std::span<const TokenId> emitted) {
  httplib::Client client(config_.endpoint);
  client.set_connection_timeout(0, config_.timeout_ms * 1000);
  client.set_read_timeout(0, config_.timeout_ms * 1000);

  json body{{"query_tokens", std::vector<TokenId>(query_tokens.begin(), query_tokens.end())},
            {"emitted", std::vector<TokenId>(emitted.begin(), emitted.end())}};
  body["context_tokens"] = context_tokens ? json(*context_tokens) : json(nullptr);

  auto res = client.Post("/logits", body.dump(), "application/json");
  if (!res) {
    throw std::runtime_error("remote provider: no response from " + config_.endpoint + " (" +
                             httplib::to_string(res.error()) + ")");
  }
  if (res->status < 200 || res->status >= 300) {
    throw std::runtime_error("remote provider: HTTP " + std::to_string(res->status) + " from " +
                             config_.endpoint);
  }
  json reply;
  try {
    reply = json::parse(res->body);
  } catch (const json::exception& e) {
    throw std::runtime_error("remote provider: bad JSON in response: " + std::string(e.what()));
  }
  if (!reply.contains("logits") || !reply.at("logits").is_array()) {
    throw std::runtime_error("remote provider: response lacks a logits array");
  }
  auto logits = reply.at("logits").get<std::vector<double>>();
  if (logits.size() < 2) throw std::runtime_error("remote provider: logits array too short");
  for (double x : logits) {
    if (!std::isfinite(x)) throw std::runtime_error("remote provider: non-finite logit");
  }
  if (vocab_size_ == 0) {
    vocab_size_ = static_cast<int>(logits.size());
  } else if (static_cast<int>(logits.size()) != vocab_size_) {
    throw std::runtime_error("remote provider: vocab size pinned at " +
                             std::to_string(vocab_size_) + " but response carried " +
                             std::to_string(logits.size()) + " logits");
  }
  return logits;
}

DualStep RemoteClient::fetch(std::span<const TokenId> query_tokens,
                             std::span<const TokenId> context_tokens,
                             std::span<const TokenId> emitted) {
  const std::vector<TokenId> ctx_vec(context_tokens.begin(), context_tokens.end());
  auto ctx_logits = post_logits(query_tokens, &ctx_vec, emitted);
  auto prior_logits = post_logits(query_tokens, nullptr, emitted);
  return DualStep{TokenDistribution::from_logits(prior_logits),
                  TokenDistribution::from_logits(ctx_logits), false};
}

RemoteProvider::RemoteProvider(RemoteConfig config, std::vector<TokenId> query_tokens,
                               std::vector<TokenId> context_tokens)
    : client_(std::move(config)),
      query_tokens_(std::move(query_tokens)),
      context_tokens_(std::move(context_tokens)) {}

std::optional<DualStep> RemoteProvider::next(std::span<const TokenId> emitted) {
  return client_.fetch(query_tokens_, context_tokens_, emitted);
}

}  // namespace cocoa
