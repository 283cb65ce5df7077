#include "core/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace dyne {

using nlohmann::json;

double resolved_dv(const SimConfig& config) {
  if (!config.paper_rule) return config.dv_feedback;
  return config.nbar * theoretical_limit(config.nbar) / 25.0;
}

SqueezedState make_initial_state(const SimConfig& config) {
  switch (config.state_kind) {
    case StateKind::kCoherent:
      if (config.nbar < 0.0) throw std::domain_error("coherent state: nbar < 0");
      return SqueezedState{cplx(std::sqrt(config.nbar), 0.0), cplx(0.0, 0.0)};
    case StateKind::kOptimalSqueezed:
      return make_optimal_squeezed(config.nbar);
    case StateKind::kCustom:
      return SqueezedState{config.custom_alpha, config.custom_xi};
  }
  throw std::logic_error("make_initial_state: unknown state kind");
}

EnsembleSpec ensemble_spec(const SimConfig& config) {
  EnsembleSpec spec;
  spec.initial = make_initial_state(config);
  spec.policy = config.policy;
  spec.grid.dv_feedback = resolved_dv(config);
  spec.grid.substeps = config.substeps;
  spec.grid.v_end = 1.0;
  spec.n_trajectories = config.n_trajectories;
  spec.master_seed = config.master_seed;
  spec.random_true_phase = config.random_true_phase;
  return spec;
}

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument(what + ": not a number: '" + s + "'");
  }
  if (pos != s.size()) {
    throw std::invalid_argument(what + ": trailing junk in '" + s + "'");
  }
  return value;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

json policy_to_json(const FeedbackPolicy& policy) {
  json j;
  j["name"] = policy_name(policy);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Heterodyne>) {
          j["detuning"] = p.detuning;
        } else if constexpr (std::is_same_v<T, ConstantEpsilon>) {
          j["epsilon"] = p.epsilon;
        } else if constexpr (std::is_same_v<T, TimeEpsilon>) {
          j["divisor"] = p.divisor;
        } else if constexpr (std::is_same_v<T, Corrected>) {
          j["lambda"] = p.lambda;
          j["divisor"] = p.divisor;
          j["onset_v"] = p.onset_v;
        }
      },
      policy);
  return j;
}

FeedbackPolicy policy_from_json(const json& j) {
  const std::string name = lower(j.at("name").get<std::string>());
  if (name == "heterodyne") {
    Heterodyne p;
    p.detuning = j.value("detuning", p.detuning);
    return p;
  }
  if (name == "mark1") return MarkI{};
  if (name == "mark2") return MarkII{};
  if (name == "ceps") {
    ConstantEpsilon p;
    p.epsilon = j.value("epsilon", p.epsilon);
    return p;
  }
  if (name == "teps") {
    TimeEpsilon p;
    p.divisor = j.value("divisor", p.divisor);
    return p;
  }
  if (name == "corrected") {
    Corrected p;
    p.lambda = j.value("lambda", p.lambda);
    p.divisor = j.value("divisor", p.divisor);
    p.onset_v = j.value("onset_v", p.onset_v);
    return p;
  }
  throw std::invalid_argument("unknown policy name: '" + name + "'");
}

}  // namespace

std::string config_to_json(const SimConfig& config) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["nbar"] = config.nbar;
  switch (config.state_kind) {
    case StateKind::kCoherent:
      j["state"] = {{"kind", "coherent"}};
      break;
    case StateKind::kOptimalSqueezed:
      j["state"] = {{"kind", "optimal_squeezed"}};
      break;
    case StateKind::kCustom:
      j["state"] = {
          {"kind", "custom"},
          {"alpha", {config.custom_alpha.real(), config.custom_alpha.imag()}},
          {"xi", {config.custom_xi.real(), config.custom_xi.imag()}}};
      break;
  }
  j["policy"] = policy_to_json(config.policy);
  if (config.paper_rule) {
    j["dv_feedback"] = "paper";
  } else {
    j["dv_feedback"] = config.dv_feedback;
  }
  j["substeps"] = config.substeps;
  j["trajectories"] = config.n_trajectories;
  j["seed"] = config.master_seed;
  j["true_phase"] = config.random_true_phase ? "uniform" : "zero";
  j["out_dir"] = config.out_dir;
  return j.dump(2);
}

SimConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") +
                                e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw std::invalid_argument("unsupported schema_version " +
                                  std::to_string(version));
    }
    SimConfig config;
    config.nbar = j.at("nbar").get<double>();
    if (j.contains("state")) {
      const json& st = j.at("state");
      const std::string kind = lower(st.at("kind").get<std::string>());
      if (kind == "coherent") {
        config.state_kind = StateKind::kCoherent;
      } else if (kind == "optimal_squeezed") {
        config.state_kind = StateKind::kOptimalSqueezed;
      } else if (kind == "custom") {
        config.state_kind = StateKind::kCustom;
        const auto a = st.at("alpha").get<std::vector<double>>();
        const auto x = st.at("xi").get<std::vector<double>>();
        if (a.size() != 2 || x.size() != 2) {
          throw std::invalid_argument("custom state: alpha/xi need [re, im]");
        }
        config.custom_alpha = cplx(a[0], a[1]);
        config.custom_xi = cplx(x[0], x[1]);
      } else {
        throw std::invalid_argument("unknown state kind '" + kind + "'");
      }
    }
    if (j.contains("policy")) config.policy = policy_from_json(j.at("policy"));
    if (j.contains("dv_feedback")) {
      const json& dv = j.at("dv_feedback");
      if (dv.is_string()) {
        if (lower(dv.get<std::string>()) != "paper") {
          throw std::invalid_argument("dv_feedback must be a number or 'paper'");
        }
        config.paper_rule = true;
      } else {
        config.dv_feedback = dv.get<double>();
        config.paper_rule = false;
      }
    }
    config.substeps = j.value("substeps", config.substeps);
    config.n_trajectories = j.value("trajectories", config.n_trajectories);
    config.master_seed = j.value("seed", config.master_seed);
    if (j.contains("true_phase")) {
      const std::string mode = lower(j.at("true_phase").get<std::string>());
      if (mode == "uniform") {
        config.random_true_phase = true;
      } else if (mode == "zero") {
        config.random_true_phase = false;
      } else {
        throw std::invalid_argument("true_phase must be 'zero' or 'uniform'");
      }
    }
    config.out_dir = j.value("out_dir", config.out_dir);
    return config;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad config: ") + e.what());
  }
}

std::uint64_t config_hash(const SimConfig& config) {
  const std::string canon = config_to_json(config);
  std::uint64_t h = 1469598103934665603ull;  // FNV-1a 64 offset basis
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

FeedbackPolicy parse_policy(const std::string& text) {
  const std::size_t colon = text.find(':');
  const std::string name = lower(text.substr(0, colon));
  std::vector<std::pair<std::string, std::string>> kv;
  if (colon != std::string::npos) {
    std::string rest = text.substr(colon + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      const std::size_t comma = rest.find(',', start);
      const std::string tok =
          rest.substr(start, comma == std::string::npos ? comma : comma - start);
      if (!tok.empty()) {
        const std::size_t eq = tok.find('=');
        if (eq == std::string::npos) {
          kv.emplace_back("", tok);  // bare value -> primary parameter
        } else {
          kv.emplace_back(lower(tok.substr(0, eq)), tok.substr(eq + 1));
        }
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }

  auto reject = [&](const std::string& key) {
    throw std::invalid_argument("policy '" + name + "': unknown parameter '" +
                                key + "'");
  };

  if (name == "heterodyne" || name == "het") {
    Heterodyne p;
    for (const auto& [k, v] : kv) {
      if (k.empty() || k == "detuning") {
        p.detuning = parse_number(v, "detuning");
      } else {
        reject(k);
      }
    }
    return p;
  }
  if (name == "mark1" || name == "marki") {
    if (!kv.empty()) reject(kv.front().first);
    return MarkI{};
  }
  if (name == "mark2" || name == "markii") {
    if (!kv.empty()) reject(kv.front().first);
    return MarkII{};
  }
  if (name == "ceps" || name == "constant-epsilon") {
    ConstantEpsilon p;
    for (const auto& [k, v] : kv) {
      if (k.empty() || k == "epsilon" || k == "eps") {
        p.epsilon = parse_number(v, "epsilon");
      } else {
        reject(k);
      }
    }
    return p;
  }
  if (name == "teps" || name == "time-epsilon") {
    TimeEpsilon p;
    for (const auto& [k, v] : kv) {
      if (k.empty() || k == "divisor") {
        p.divisor = parse_number(v, "divisor");
      } else {
        reject(k);
      }
    }
    return p;
  }
  if (name == "corrected" || name == "corr") {
    Corrected p;
    for (const auto& [k, v] : kv) {
      if (k.empty() || k == "lambda") {
        p.lambda = parse_number(v, "lambda");
      } else if (k == "divisor") {
        p.divisor = parse_number(v, "divisor");
      } else if (k == "onset" || k == "onset_v") {
        p.onset_v = parse_number(v, "onset_v");
      } else {
        reject(k);
      }
    }
    return p;
  }
  throw std::invalid_argument("unknown policy '" + name + "'");
}

std::string policy_name(const FeedbackPolicy& policy) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Heterodyne>) return "heterodyne";
        if constexpr (std::is_same_v<T, MarkI>) return "mark1";
        if constexpr (std::is_same_v<T, MarkII>) return "mark2";
        if constexpr (std::is_same_v<T, ConstantEpsilon>) return "ceps";
        if constexpr (std::is_same_v<T, TimeEpsilon>) return "teps";
        if constexpr (std::is_same_v<T, Corrected>) return "corrected";
      },
      policy);
}

std::string policy_params(const FeedbackPolicy& policy) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, Heterodyne>) {
          return "detuning=" + format_number(p.detuning);
        } else if constexpr (std::is_same_v<T, ConstantEpsilon>) {
          return "epsilon=" + format_number(p.epsilon);
        } else if constexpr (std::is_same_v<T, TimeEpsilon>) {
          return "divisor=" + format_number(p.divisor);
        } else if constexpr (std::is_same_v<T, Corrected>) {
          return "lambda=" + format_number(p.lambda) +
                 ",divisor=" + format_number(p.divisor) +
                 ",onset_v=" + format_number(p.onset_v);
        } else {
          return "";
        }
      },
      policy);
}

namespace {

SimConfig preset_base(double nbar, FeedbackPolicy policy,
                      std::uint64_t trajectories) {
  SimConfig c;
  c.nbar = nbar;
  c.state_kind = StateKind::kOptimalSqueezed;
  c.policy = std::move(policy);
  c.paper_rule = true;
  c.substeps = 1;
  c.n_trajectories = trajectories;
  c.master_seed = 1;
  c.random_true_phase = true;
  return c;
}

std::vector<Preset> build_presets() {
  std::vector<Preset> presets;

  {
    Preset p;
    p.name = "n1577";
    p.description =
        "Time-varying-epsilon measurement on the optimal squeezed state at "
        "n̄ = 1577, feedback interval n̄·V_th/25; pinned variance 1.54e-6 "
        "±10%.";
    p.config = preset_base(1577.0, TimeEpsilon{}, 20000);
    p.config.master_seed = 2;
    p.metric = PresetMetric::kHolevoVariance;
    p.expected = 1.54e-6;
    p.rel_tol = 0.10;
    presets.push_back(std::move(p));
  }
  {
    Preset p;
    p.name = "n1577-fine100";
    p.description =
        "As n1577 but with the feedback interval 100× smaller; the variance "
        "does not converge and rises to 1.93e-6 (±12%).";
    p.config = preset_base(1577.0, TimeEpsilon{}, 5000);
    p.config.paper_rule = false;
    p.config.dv_feedback = 1577.0 * theoretical_limit(1577.0) / 25.0 / 100.0;
    p.metric = PresetMetric::kHolevoVariance;
    p.expected = 1.93e-6;
    p.rel_tol = 0.12;
    presets.push_back(std::move(p));
  }
  {
    Preset p;
    p.name = "n1577-fine1000";
    p.description =
        "As n1577 but with the feedback interval 1000× smaller; pinned "
        "variance 2.13e-6 (±15%).";
    p.config = preset_base(1577.0, TimeEpsilon{}, 2000);
    p.config.paper_rule = false;
    p.config.dv_feedback = 1577.0 * theoretical_limit(1577.0) / 25.0 / 1000.0;
    p.metric = PresetMetric::kHolevoVariance;
    p.expected = 2.13e-6;
    p.rel_tol = 0.15;
    presets.push_back(std::move(p));
  }
  {
    Preset p;
    p.name = "crossover-eta98";
    p.description =
        "Analytic crossover where the mark II introduced variance falls "
        "below the η = 0.98 efficiency floor; must land in [400, 1500].";
    p.metric = PresetMetric::kCrossover;
    p.eta = 0.98;
    p.bound_lo = 400.0;
    p.bound_hi = 1500.0;
    presets.push_back(std::move(p));
  }
  {
    Preset p;
    p.name = "corrected-1e4";
    p.description =
        "Corrected feedback (λ = 1e-3) at n̄ = 1e4; excess-variance ratios "
        "from the ζ scatter must both stay below 0.05.";
    p.config = preset_base(1.0e4, Corrected{}, 2000);
    p.metric = PresetMetric::kExcessRatios;
    p.ratio_bound = 0.05;
    presets.push_back(std::move(p));
  }
  {
    Preset p;
    p.name = "corrected-5e6";
    p.description =
        "Corrected feedback at n̄ = 5e6 with the ε divisor 1.1 and "
        "λ = 5e-4; excess ratios below 0.03. Hours of runtime; not part of "
        "the fast suites.";
    p.config = preset_base(5.0e6, Corrected{5e-4, 1.1, 0.9}, 500);
    p.metric = PresetMetric::kExcessRatios;
    p.ratio_bound = 0.03;
    presets.push_back(std::move(p));
  }
  {
    Preset p;
    p.name = "corrected-2e7";
    p.description =
        "Corrected feedback at n̄ = 2e7 with the ε divisor 1.2 and "
        "λ = 5e-4; excess ratios below 0.03. Hours of runtime; not part of "
        "the fast suites.";
    p.config = preset_base(2.0e7, Corrected{5e-4, 1.2, 0.9}, 500);
    p.metric = PresetMetric::kExcessRatios;
    p.ratio_bound = 0.03;
    presets.push_back(std::move(p));
  }
  return presets;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build_presets();
  return all;
}

}  // namespace

std::optional<Preset> find_preset(const std::string& name) {
  for (const auto& p : presets()) {
    if (p.name == name) return p;
  }
  return std::nullopt;
}

std::vector<std::string> preset_names() {
  std::vector<std::string> names;
  names.reserve(presets().size());
  for (const auto& p : presets()) names.push_back(p.name);
  return names;
}

}  // namespace dyne
