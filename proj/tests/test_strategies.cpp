#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "cocoa/dist.hpp"
#include "cocoa/signals.hpp"
#include "cocoa/strategies.hpp"
#include "doctest.h"
#include "oracles.hpp"

using cocoa::GateOrientation;
using cocoa::StrategyConfig;
using cocoa::TokenDistribution;

namespace {

StrategyConfig defaults() { return StrategyConfig{}; }

TokenDistribution dist2(double p0) {
  return TokenDistribution::from_probs(std::vector<double>{p0, 1.0 - p0});
}

}  // namespace

TEST_CASE("conflict_score hand values and clamps") {
  auto cfg = defaults();
  CHECK(cocoa::conflict_score(0.0, 0.0, cfg) == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(cocoa::conflict_score(0.0, 0.0, cfg) > 0.5);

  cfg.delta = 0.0;
  CHECK(cocoa::conflict_score(0.693147, 0.7, cfg) ==
        doctest::Approx(0.801094168556).epsilon(1e-9));

  CHECK(cocoa::conflict_score(50.0, 0.0, cfg) == doctest::Approx(1.0 - 1e-12).epsilon(1e-13));
  CHECK(cocoa::conflict_score(50.0, 0.0, cfg) < 1.0);
  CHECK(cocoa::conflict_score(-50.0, 0.0, cfg) == doctest::Approx(1e-12).epsilon(1e-3));
  CHECK(cocoa::conflict_score(-50.0, 0.0, cfg) > 0.0);
}

TEST_CASE("blend_weight reduces to the score when the margin term vanishes") {
  auto cfg = defaults();
  CHECK(std::abs(cocoa::blend_weight(1.0, 0.8, cfg) - 0.8) <= 1e-12);

  cfg.gate_orientation = GateOrientation::kLiteral;
  CHECK(std::abs(cocoa::blend_weight(1.0, 0.8, cfg) - 0.2) <= 1e-12);

  cfg = defaults();
  cfg.ablation.use_peakedness = false;
  CHECK(std::abs(cocoa::blend_weight(0.3, 0.8, cfg) - 0.8) <= 1e-12);
}

TEST_CASE("blend_weight hand value at half margin") {
  auto cfg = defaults();
  CHECK(cocoa::blend_weight(0.5, 0.5, cfg) == doctest::Approx(0.030303030303).epsilon(1e-9));
  cfg.gate_orientation = GateOrientation::kLiteral;
  CHECK(cocoa::blend_weight(0.5, 0.5, cfg) == doctest::Approx(0.030303030303).epsilon(1e-9));
}

TEST_CASE("blend_weight ignores signals when adaptive gating is off") {
  auto cfg = defaults();
  cfg.ablation.adaptive_gating = false;
  cfg.fixed_lambda = 0.37;
  CHECK(cocoa::blend_weight(0.9, 0.99, cfg) == 0.37);
  CHECK(cocoa::blend_weight(1e-6, 0.01, cfg) == 0.37);
}

TEST_CASE("blend_weight is monotone in score and margin under prose orientation") {
  auto cfg = defaults();
  for (int i = 1; i < 100; ++i) {
    double prev = -1.0;
    double m = i / 100.0;
    for (int j = 1; j < 100; ++j) {
      double lam = cocoa::blend_weight(m, j / 100.0, cfg);
      CHECK(lam > prev);
      prev = lam;
    }
  }
  for (int j = 1; j < 100; ++j) {
    double prev = -1.0;
    double s = j / 100.0;
    for (int i = 1; i <= 100; ++i) {
      double lam = cocoa::blend_weight(i / 100.0, s, cfg);
      CHECK(lam > prev);
      prev = lam;
    }
  }
}

TEST_CASE("gate values stay inside (0,1) on random and degenerate input") {
  auto cfg = defaults();
  std::mt19937_64 rng(211);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 10000; ++trial) {
    double d = 8.0 * unit(rng) - 1.0;
    double gap = 4.0 * unit(rng) - 2.0;
    double s = cocoa::conflict_score(d, gap, cfg);
    double lam = cocoa::blend_weight(unit(rng), s, cfg);
    CHECK(s > 0.0);
    CHECK(s < 1.0);
    CHECK(lam >= 0.0);
    CHECK(lam <= 1.0);
    CHECK(std::isfinite(lam));
  }
  CHECK(std::isfinite(cocoa::blend_weight(0.0, 0.5, cfg)));
  CHECK(std::isfinite(cocoa::blend_weight(1.0, 1.0 - 1e-12, cfg)));
}

TEST_CASE("power_blend endpoints and midpoint") {
  auto prior = dist2(0.8);
  auto ctx = dist2(0.2);
  CHECK(cocoa::total_variation(cocoa::power_blend(prior, ctx, 0.0), prior) <= 1e-12);
  CHECK(cocoa::total_variation(cocoa::power_blend(prior, ctx, 1.0), ctx) <= 1e-12);

  auto mid = cocoa::power_blend(prior, ctx, 0.5);
  CHECK(mid.prob(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(mid.prob(1) == doctest::Approx(0.5).epsilon(1e-12));

  CHECK_THROWS_AS(cocoa::power_blend(prior, TokenDistribution::uniform(4), 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(cocoa::power_blend(prior, ctx, 1.5), std::invalid_argument);
}

TEST_CASE("cocoa_adjust is a fixed point without conflict") {
  auto cfg = defaults();
  auto flat = TokenDistribution::uniform(8);
  auto [out, diag] = cocoa::cocoa_adjust(flat, flat, cfg);
  CHECK(cocoa::total_variation(out, flat) <= 1e-9);
  CHECK(diag.conflict_score == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(diag.d_alpha <= 1e-9);
}

TEST_CASE("cocoa_adjust full pipeline on an opposed pair") {
  auto cfg = defaults();
  auto prior = dist2(0.8);
  auto ctx = dist2(0.2);
  auto [out, diag] = cocoa::cocoa_adjust(prior, ctx, cfg);
  CHECK(diag.d_alpha == doctest::Approx(0.446287102628).epsilon(1e-9));
  CHECK(diag.entropy_gap == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(diag.margin == doctest::Approx(0.6).epsilon(1e-9));
  CHECK(diag.conflict_score == doctest::Approx(0.609756099941).epsilon(1e-9));
  CHECK(diag.lambda == doctest::Approx(0.108337049562).epsilon(1e-9));
  CHECK(out.prob(0) == doctest::Approx(0.747612705400).epsilon(1e-9));
  CHECK(out.prob(1) == doctest::Approx(0.252387294600).epsilon(1e-9));
  CHECK(diag.jsd_value == doctest::Approx(0.192744757022).epsilon(1e-9));
}

TEST_CASE("cocoa_adjust with gating disabled equals a fixed power blend") {
  auto cfg = defaults();
  cfg.ablation.adaptive_gating = false;
  cfg.fixed_lambda = 0.5;
  auto prior = dist2(0.7);
  auto ctx = dist2(0.25);
  auto [out, diag] = cocoa::cocoa_adjust(prior, ctx, cfg);
  CHECK(diag.lambda == 0.5);
  CHECK(cocoa::total_variation(out, cocoa::power_blend(prior, ctx, 0.5)) <= 1e-15);
}

TEST_CASE("cocoa_adjust resolves one-hot context conflicts toward the context") {
  auto cfg = defaults();
  std::mt19937_64 rng(223);
  for (int trial = 0; trial < 1000; ++trial) {
    auto prior = oracles::random_distribution(rng, 8);
    cocoa::TokenId prior_top = cocoa::top2(prior).first;
    cocoa::TokenId target = (prior_top + 1) % 8;
    auto ctx = TokenDistribution::one_hot(8, target);
    auto [out, diag] = cocoa::cocoa_adjust(prior, ctx, cfg);
    CHECK(cocoa::top2(out).first == target);
    CHECK(diag.conflict_score > 0.5);
  }
}

TEST_CASE("cad_adjust hand values") {
  auto prior = dist2(0.2);
  auto ctx = dist2(0.8);
  auto out = cocoa::cad_adjust(prior, ctx, 1.0);
  CHECK(out.prob(0) == doctest::Approx(0.984615384615).epsilon(1e-9));
  CHECK(out.prob(1) == doctest::Approx(0.015384615385).epsilon(1e-9));

  CHECK(cocoa::total_variation(cocoa::cad_adjust(prior, ctx, 0.0), ctx) <= 1e-12);
  for (double alpha : {0.5, 1.0, 2.0})
    CHECK(cocoa::total_variation(cocoa::cad_adjust(ctx, ctx, alpha), ctx) <= 1e-9);

  CHECK_THROWS_AS(cocoa::cad_adjust(prior, TokenDistribution::uniform(4), 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cocoa::cad_adjust(prior, ctx, -0.5), std::invalid_argument);
}

TEST_CASE("adacad_adjust scales contrast by divergence") {
  auto prior = dist2(0.2);
  auto ctx = dist2(0.8);
  auto [out, diag] = cocoa::adacad_adjust(prior, ctx);
  CHECK(diag.jsd_value == doctest::Approx(0.192744757022).epsilon(1e-9));
  CHECK(out.prob(0) == doctest::Approx(0.872216060135).epsilon(1e-9));
  CHECK(out.prob(1) == doctest::Approx(0.127783939865).epsilon(1e-9));

  auto same = dist2(0.65);
  auto [fixed, fixed_diag] = cocoa::adacad_adjust(same, same);
  CHECK(fixed_diag.jsd_value <= 1e-9);
  CHECK(cocoa::total_variation(fixed, same) <= 1e-9);

  auto flat = TokenDistribution::uniform(2);
  auto sharp = dist2(0.9);
  auto [skew, skew_diag] = cocoa::adacad_adjust(flat, sharp);
  CHECK(skew_diag.jsd_value == doctest::Approx(cocoa::jsd(sharp, flat)).epsilon(1e-12));
  CHECK(cocoa::top2(skew).first == 0);
}

TEST_CASE("coiecd_adjust switches on the divergence threshold") {
  auto cfg = defaults();
  auto prior = dist2(0.2);
  auto ctx = dist2(0.8);
  CHECK(cocoa::total_variation(cocoa::coiecd_adjust(ctx, ctx, cfg), ctx) <= 1e-12);
  CHECK(cocoa::total_variation(cocoa::coiecd_adjust(prior, ctx, cfg), ctx) <= 1e-12);

  auto hot0 = TokenDistribution::one_hot(2, 0);
  auto hot1 = TokenDistribution::one_hot(2, 1);
  auto switched = cocoa::coiecd_adjust(hot1, hot0, cfg);
  auto contrasted = cocoa::cad_adjust(hot1, hot0, cfg.cad_alpha);
  CHECK(cocoa::total_variation(switched, contrasted) <= 1e-15);
}

TEST_CASE("confcd_adjust picks contrast strength from the sharper side") {
  auto ctx_sharp = dist2(0.9);
  auto prior_mid = dist2(0.6);
  CHECK(cocoa::total_variation(cocoa::confcd_adjust(prior_mid, ctx_sharp),
                               cocoa::cad_adjust(prior_mid, ctx_sharp, 0.9)) <= 1e-15);

  auto ctx_flat = TokenDistribution::from_probs(std::vector<double>{0.4, 0.3, 0.3});
  auto prior3 = TokenDistribution::from_probs(std::vector<double>{0.6, 0.2, 0.2});
  CHECK(cocoa::total_variation(cocoa::confcd_adjust(prior3, ctx_flat),
                               cocoa::cad_adjust(prior3, ctx_flat, 0.4)) <= 1e-15);

  auto even_a = dist2(0.5);
  auto even_b = dist2(0.5);
  CHECK(cocoa::total_variation(cocoa::confcd_adjust(even_a, even_b),
                               cocoa::cad_adjust(even_a, even_b, 0.5)) <= 1e-15);
}

TEST_CASE("greedy_select takes the argmax with low-index ties") {
  CHECK(cocoa::greedy_select(TokenDistribution::from_probs(
            std::vector<double>{0.1, 0.8, 0.1})) == 1);
  CHECK(cocoa::greedy_select(dist2(0.5)) == 0);
  CHECK(cocoa::greedy_select(TokenDistribution::one_hot(8, 5)) == 5);
}

TEST_CASE("every strategy preserves the shared argmax without conflict") {
  auto cfg = defaults();
  std::mt19937_64 rng(227);
  for (int trial = 0; trial < 200; ++trial) {
    auto p = oracles::random_distribution(rng, 8);
    cocoa::TokenId top = cocoa::top2(p).first;
    CHECK(cocoa::top2(cocoa::cocoa_adjust(p, p, cfg).first).first == top);
    CHECK(cocoa::top2(cocoa::adacad_adjust(p, p).first).first == top);
    CHECK(cocoa::top2(cocoa::coiecd_adjust(p, p, cfg)).first == top);
    CHECK(cocoa::top2(cocoa::cad_adjust(p, p, 1.0)).first == top);
    CHECK(cocoa::top2(cocoa::confcd_adjust(p, p)).first == top);
  }
}

TEST_CASE("ablation switches change exactly the advertised term") {
  auto flat = TokenDistribution::uniform(2);
  auto sharp = dist2(0.9);

  auto cfg = defaults();
  cfg.ablation.use_kl_instead = true;
  auto diag_kl = cocoa::diagnose(flat, sharp, cfg);
  CHECK(diag_kl.d_alpha == doctest::Approx(cocoa::kl_divergence(flat, sharp)).epsilon(1e-12));

  cfg = defaults();
  cfg.ablation.use_renyi = false;
  auto diag_nodiv = cocoa::diagnose(flat, sharp, cfg);
  double gap = cocoa::entropy_gap(flat, sharp);
  CHECK(diag_nodiv.conflict_score ==
        doctest::Approx(oracles::sigmoid_ref(gap + cfg.delta)).epsilon(1e-12));

  cfg = defaults();
  cfg.ablation.use_entropy_gap = false;
  auto diag_nogap = cocoa::diagnose(flat, sharp, cfg);
  CHECK(diag_nogap.conflict_score ==
        doctest::Approx(oracles::sigmoid_ref(diag_nogap.d_alpha + cfg.delta)).epsilon(1e-12));
}

TEST_CASE("strategy names round-trip and reject unknowns") {
  for (const char* name : {"greedy", "cad", "coiecd", "confcd", "adacad", "cocoa"}) {
    CHECK(cocoa::to_string(cocoa::parse_strategy(name)) == name);
  }
  CHECK_THROWS_AS(cocoa::parse_strategy("beam"), std::invalid_argument);

  CHECK(cocoa::parse_gate_orientation("prose") == GateOrientation::kProse);
  CHECK(cocoa::parse_gate_orientation("literal") == GateOrientation::kLiteral);
  CHECK(cocoa::to_string(GateOrientation::kProse) == "prose");
  CHECK(cocoa::to_string(GateOrientation::kLiteral) == "literal");
  CHECK_THROWS_AS(cocoa::parse_gate_orientation("upside-down"), std::invalid_argument);
}

TEST_CASE("config validation rejects out-of-range fields") {
  auto cfg = defaults();
  CHECK_NOTHROW(cfg.validate());

  cfg.renyi_order = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = defaults();
  cfg.fixed_lambda = 1.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = defaults();
  cfg.cad_alpha = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);

  cfg = defaults();
  cfg.z = -2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("apply_strategy dispatches to the matching adjustment") {
  auto cfg = defaults();
  auto prior = dist2(0.7);
  auto ctx = dist2(0.3);
  auto diag = cocoa::diagnose(prior, ctx, cfg);

  auto greedy = cocoa::apply_strategy(cocoa::Strategy::kGreedy, prior, ctx, cfg, diag);
  CHECK(cocoa::total_variation(greedy, ctx) <= 1e-15);

  auto cad = cocoa::apply_strategy(cocoa::Strategy::kCad, prior, ctx, cfg, diag);
  CHECK(cocoa::total_variation(cad, cocoa::cad_adjust(prior, ctx, cfg.cad_alpha)) <= 1e-15);

  auto adacad = cocoa::apply_strategy(cocoa::Strategy::kAdacad, prior, ctx, cfg, diag);
  CHECK(cocoa::total_variation(adacad, cocoa::adacad_adjust(prior, ctx).first) <= 1e-15);

  auto coiecd = cocoa::apply_strategy(cocoa::Strategy::kCoiecd, prior, ctx, cfg, diag);
  CHECK(cocoa::total_variation(coiecd, cocoa::coiecd_adjust(prior, ctx, cfg)) <= 1e-15);

  auto confcd = cocoa::apply_strategy(cocoa::Strategy::kConfcd, prior, ctx, cfg, diag);
  CHECK(cocoa::total_variation(confcd, cocoa::confcd_adjust(prior, ctx)) <= 1e-15);

  auto gated = cocoa::apply_strategy(cocoa::Strategy::kCocoa, prior, ctx, cfg, diag);
  CHECK(cocoa::total_variation(gated, cocoa::power_blend(prior, ctx, diag.lambda)) <= 1e-15);
}
