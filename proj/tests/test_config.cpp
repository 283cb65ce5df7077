#include <stdexcept>
#include <string>

#include "core/config.hpp"
#include "core/squeezed.hpp"
#include "doctest.h"

using namespace dyne;

namespace {

// Text of the policy as it would appear on a CLI: NAME[:params].
std::string policy_text(const FeedbackPolicy& p) {
  const std::string params = policy_params(p);
  return params.empty() ? policy_name(p) : policy_name(p) + ":" + params;
}

std::string replaced(std::string text, const std::string& from,
                     const std::string& to) {
  const std::size_t pos = text.find(from);
  REQUIRE(pos != std::string::npos);
  return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("resolved_dv uses the explicit interval unless the paper rule is on") {
  SimConfig c;
  c.dv_feedback = 2e-3;
  CHECK(resolved_dv(c) == 2e-3);

  c.paper_rule = true;
  c.nbar = 1577.0;
  CHECK(resolved_dv(c) == 1577.0 * theoretical_limit(1577.0) / 25.0);
  CHECK(resolved_dv(c) == doctest::Approx(6.2100694907818888e-05).epsilon(1e-15));

  c.nbar = 100.0;
  CHECK(resolved_dv(c) == 100.0 * theoretical_limit(100.0) / 25.0);
}

TEST_CASE("make_initial_state dispatches on the state kind") {
  SimConfig c;
  c.nbar = 16.0;

  c.state_kind = StateKind::kCoherent;
  const SqueezedState coh = make_initial_state(c);
  CHECK(coh.alpha == cplx(4.0, 0.0));
  CHECK(coh.xi == cplx(0.0, 0.0));

  c.state_kind = StateKind::kOptimalSqueezed;
  c.nbar = 1577.0;
  const SqueezedState opt = make_initial_state(c);
  const SqueezedState direct = make_optimal_squeezed(1577.0);
  CHECK(opt.alpha == direct.alpha);
  CHECK(opt.xi == direct.xi);

  c.state_kind = StateKind::kCustom;
  c.custom_alpha = cplx(1.5, -0.25);
  c.custom_xi = cplx(0.3, 0.7);
  const SqueezedState cust = make_initial_state(c);
  CHECK(cust.alpha == cplx(1.5, -0.25));
  CHECK(cust.xi == cplx(0.3, 0.7));

  c.state_kind = StateKind::kCoherent;
  c.nbar = -1.0;
  CHECK_THROWS_AS(make_initial_state(c), std::domain_error);
}

TEST_CASE("ensemble_spec carries every knob into the engine description") {
  SimConfig c;
  c.nbar = 400.0;
  c.state_kind = StateKind::kCoherent;
  c.policy = TimeEpsilon{1.2};
  c.dv_feedback = 5e-4;
  c.substeps = 3;
  c.n_trajectories = 77;
  c.master_seed = 99;
  c.random_true_phase = true;

  const EnsembleSpec spec = ensemble_spec(c);
  CHECK(spec.initial.alpha == cplx(20.0, 0.0));
  CHECK(spec.initial.xi == cplx(0.0, 0.0));
  CHECK(policy_text(spec.policy) == "teps:divisor=1.2");
  CHECK(spec.grid.dv_feedback == 5e-4);
  CHECK(spec.grid.substeps == 3);
  CHECK(spec.grid.v_end == 1.0);
  CHECK(spec.n_trajectories == 77);
  CHECK(spec.master_seed == 99);
  CHECK(spec.random_true_phase);
}

TEST_CASE("config JSON round trip preserves every field") {
  SimConfig c;
  c.nbar = 42.5;
  c.state_kind = StateKind::kCustom;
  c.custom_alpha = cplx(1.5, -0.25);
  c.custom_xi = cplx(0.3, 0.7);
  c.policy = Corrected{2e-4, 1.2, 0.85};
  c.dv_feedback = 5e-4;
  c.substeps = 3;
  c.n_trajectories = 77;
  c.master_seed = 99;
  c.random_true_phase = true;
  c.out_dir = "runs/x";

  const SimConfig back = config_from_json(config_to_json(c));
  CHECK(back.nbar == c.nbar);
  CHECK(back.state_kind == StateKind::kCustom);
  CHECK(back.custom_alpha == c.custom_alpha);
  CHECK(back.custom_xi == c.custom_xi);
  CHECK(policy_text(back.policy) ==
        "corrected:lambda=0.0002,divisor=1.2,onset_v=0.85");
  CHECK(back.dv_feedback == 5e-4);
  CHECK_FALSE(back.paper_rule);
  CHECK(back.substeps == 3);
  CHECK(back.n_trajectories == 77);
  CHECK(back.master_seed == 99);
  CHECK(back.random_true_phase);
  CHECK(back.out_dir == "runs/x");
}

TEST_CASE("paper-rule dv serializes as the string 'paper'") {
  SimConfig c;
  c.nbar = 1577.0;
  c.paper_rule = true;

  const std::string text = config_to_json(c);
  CHECK(text.find("\"paper\"") != std::string::npos);

  const SimConfig back = config_from_json(text);
  CHECK(back.paper_rule);
  CHECK(resolved_dv(back) == resolved_dv(c));
}

TEST_CASE("true-phase mode round-trips through 'zero' and 'uniform'") {
  SimConfig c;
  c.random_true_phase = false;
  CHECK(config_to_json(c).find("\"zero\"") != std::string::npos);
  CHECK_FALSE(config_from_json(config_to_json(c)).random_true_phase);

  c.random_true_phase = true;
  CHECK(config_to_json(c).find("\"uniform\"") != std::string::npos);
  CHECK(config_from_json(config_to_json(c)).random_true_phase);
}

TEST_CASE("config_from_json rejects malformed input") {
  CHECK_THROWS_AS(config_from_json("not json"), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json("{}"), std::invalid_argument);

  const std::string good = config_to_json(SimConfig{});
  CHECK_THROWS_AS(
      config_from_json(replaced(good, "\"schema_version\": 1", "\"schema_version\": 2")),
      std::invalid_argument);
  CHECK_THROWS_AS(
      config_from_json(replaced(good, "optimal_squeezed", "weird")),
      std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(replaced(good, "\"zero\"", "\"sometimes\"")),
                  std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(replaced(good, "mark2", "mark7")),
                  std::invalid_argument);

  SimConfig paper;
  paper.paper_rule = true;
  CHECK_THROWS_AS(
      config_from_json(replaced(config_to_json(paper), "\"paper\"", "\"soon\"")),
      std::invalid_argument);

  SimConfig custom;
  custom.state_kind = StateKind::kCustom;
  custom.custom_alpha = cplx(1.0, 2.0);
  const std::string truncated =
      replaced(config_to_json(custom), "[\n      1.0,\n      2.0\n    ]", "[1.0]");
  CHECK_THROWS_AS(config_from_json(truncated), std::invalid_argument);
}

TEST_CASE("config_hash is stable for equal configs and sensitive to fields") {
  SimConfig a;
  SimConfig b;
  CHECK(config_hash(a) == config_hash(b));

  b.master_seed = 2;
  CHECK(config_hash(a) != config_hash(b));

  b = a;
  b.nbar = 101.0;
  CHECK(config_hash(a) != config_hash(b));

  b = a;
  b.policy = TimeEpsilon{};
  CHECK(config_hash(a) != config_hash(b));

  b = a;
  b.paper_rule = true;
  CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("parse_policy accepts names, aliases, bare values, and key=value") {
  CHECK(policy_text(parse_policy("mark2")) == "mark2");
  CHECK(policy_text(parse_policy("MarkII")) == "mark2");
  CHECK(policy_text(parse_policy("mark1")) == "mark1");
  CHECK(policy_text(parse_policy("marki")) == "mark1");

  CHECK(policy_text(parse_policy("heterodyne")) == "heterodyne:detuning=500");
  CHECK(policy_text(parse_policy("het:450")) == "heterodyne:detuning=450");
  CHECK(policy_text(parse_policy("heterodyne:detuning=450")) ==
        "heterodyne:detuning=450");

  CHECK(policy_text(parse_policy("ceps:0.5")) == "ceps:epsilon=0.5");
  CHECK(policy_text(parse_policy("ceps:eps=0.7")) == "ceps:epsilon=0.7");
  CHECK(policy_text(parse_policy("constant-epsilon:epsilon=0.3")) ==
        "ceps:epsilon=0.3");

  CHECK(policy_text(parse_policy("teps")) == "teps:divisor=1");
  CHECK(policy_text(parse_policy("teps:1.1")) == "teps:divisor=1.1");
  CHECK(policy_text(parse_policy("time-epsilon:divisor=1.2")) ==
        "teps:divisor=1.2");

  CHECK(policy_text(parse_policy("corrected")) ==
        "corrected:lambda=0.001,divisor=1,onset_v=0.9");
  CHECK(policy_text(parse_policy("corrected:5e-4")) ==
        "corrected:lambda=0.0005,divisor=1,onset_v=0.9");
  CHECK(policy_text(parse_policy("corr:lambda=1e-3,divisor=1.1,onset=0.85")) ==
        "corrected:lambda=0.001,divisor=1.1,onset_v=0.85");
  CHECK(policy_text(parse_policy("corrected:onset_v=0.95,divisor=1.2")) ==
        "corrected:lambda=0.001,divisor=1.2,onset_v=0.95");
}

TEST_CASE("parse_policy rejects unknown names, keys, and junk values") {
  CHECK_THROWS_AS(parse_policy("bogus"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy("mark2:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy("mark1:epsilon=0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy("teps:divsor=1.1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy("ceps:epsilon=abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy("het:450kHz"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy("corrected:lambda=1e-3,rate=2"),
                  std::invalid_argument);
}

TEST_CASE("policy text round-trips through parse_policy for every policy") {
  const FeedbackPolicy policies[] = {
      Heterodyne{437.5}, MarkI{},          MarkII{},
      ConstantEpsilon{0.62}, TimeEpsilon{1.15}, Corrected{7e-4, 1.05, 0.88},
  };
  for (const FeedbackPolicy& p : policies) {
    const FeedbackPolicy back = parse_policy(policy_text(p));
    CHECK(policy_name(back) == policy_name(p));
    CHECK(policy_params(back) == policy_params(p));
  }
}

TEST_CASE("presets are pinned to their published configurations") {
  const std::vector<std::string> names = preset_names();
  REQUIRE(names.size() == 7);
  CHECK(names[0] == "n1577");
  CHECK(names[1] == "n1577-fine100");
  CHECK(names[2] == "n1577-fine1000");
  CHECK(names[3] == "crossover-eta98");
  CHECK(names[4] == "corrected-1e4");
  CHECK(names[5] == "corrected-5e6");
  CHECK(names[6] == "corrected-2e7");
  for (const std::string& name : names) {
    REQUIRE(find_preset(name).has_value());
    CHECK(find_preset(name)->name == name);
    CHECK_FALSE(find_preset(name)->description.empty());
  }
  CHECK_FALSE(find_preset("n9999").has_value());

  const Preset n1577 = *find_preset("n1577");
  CHECK(n1577.metric == PresetMetric::kHolevoVariance);
  CHECK(n1577.expected == 1.54e-6);
  CHECK(n1577.rel_tol == 0.10);
  CHECK(n1577.config.nbar == 1577.0);
  CHECK(n1577.config.state_kind == StateKind::kOptimalSqueezed);
  CHECK(policy_text(n1577.config.policy) == "teps:divisor=1");
  CHECK(n1577.config.paper_rule);
  CHECK(n1577.config.substeps == 1);
  CHECK(n1577.config.n_trajectories == 20000);
  CHECK(n1577.config.master_seed == 2);
  CHECK(n1577.config.random_true_phase);

  const Preset fine100 = *find_preset("n1577-fine100");
  CHECK(fine100.expected == 1.93e-6);
  CHECK(fine100.rel_tol == 0.12);
  CHECK_FALSE(fine100.config.paper_rule);
  CHECK(fine100.config.dv_feedback ==
        1577.0 * theoretical_limit(1577.0) / 25.0 / 100.0);
  CHECK(fine100.config.n_trajectories == 5000);
  CHECK(fine100.config.master_seed == 1);

  const Preset fine1000 = *find_preset("n1577-fine1000");
  CHECK(fine1000.expected == 2.13e-6);
  CHECK(fine1000.rel_tol == 0.15);
  CHECK(fine1000.config.dv_feedback ==
        1577.0 * theoretical_limit(1577.0) / 25.0 / 1000.0);
  CHECK(fine1000.config.n_trajectories == 2000);

  const Preset crossover = *find_preset("crossover-eta98");
  CHECK(crossover.metric == PresetMetric::kCrossover);
  CHECK(crossover.eta == 0.98);
  CHECK(crossover.bound_lo == 400.0);
  CHECK(crossover.bound_hi == 1500.0);

  const Preset corrected = *find_preset("corrected-1e4");
  CHECK(corrected.metric == PresetMetric::kExcessRatios);
  CHECK(corrected.ratio_bound == 0.05);
  CHECK(corrected.config.nbar == 1.0e4);
  CHECK(policy_text(corrected.config.policy) ==
        "corrected:lambda=0.001,divisor=1,onset_v=0.9");
  CHECK(corrected.config.n_trajectories == 2000);

  const Preset big = *find_preset("corrected-5e6");
  CHECK(big.ratio_bound == 0.03);
  CHECK(policy_text(big.config.policy) ==
        "corrected:lambda=0.0005,divisor=1.1,onset_v=0.9");
  CHECK(big.config.n_trajectories == 500);

  const Preset biggest = *find_preset("corrected-2e7");
  CHECK(biggest.ratio_bound == 0.03);
  CHECK(policy_text(biggest.config.policy) ==
        "corrected:lambda=0.0005,divisor=1.2,onset_v=0.9");
}
