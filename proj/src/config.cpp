#include "drfed/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "drfed/report.hpp"
#include "drfed/rng.hpp"

namespace drfed {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

// The full key set with defaults; required keys map to an empty optional.
struct KeySpec {
  const char* key;
  const char* default_value;  // nullptr = required
};

constexpr KeySpec kKeys[] = {
    {"M", nullptr},
    {"K", nullptr},
    {"T", nullptr},
    {"L", "500"},
    {"tau1", "0"},
    {"graph_model", "er"},
    {"c", "0.9"},
    {"thin", "0"},
    {"reward_family", "bernoulli"},
    {"regime", "subgaussian"},
    {"sigma", "0.5"},
    {"alpha", "0.08"},
    {"h", "0.1"},
    {"base", "0.1"},
    {"C1", "0.1"},
    {"C2", "0"},
    {"c0", "0.5"},
    {"delta", "0.1"},
    {"epsilon", "0.1"},
    {"link_cost", "1"},
    {"seed", "1"},
    {"runs", "50"},
    {"baseline", "drfed"},
    {"fallback", "lagging"},
    {"neighbor_term", "bar"},
    {"diagnostics", "light"},
};

std::int64_t to_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::int64_t v = std::stoll(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an integer, got '" + value + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected an unsigned integer, got '" + value + "'");
  }
}

double to_real(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key, "expected a number, got '" + value + "'");
  }
}

template <typename Enum>
Enum to_enum(const std::string& key, const std::string& value,
             std::initializer_list<std::pair<const char*, Enum>> table) {
  for (const auto& [name, e] : table)
    if (value == name) return e;
  std::string options;
  for (const auto& [name, e] : table) {
    if (!options.empty()) options += " | ";
    options += name;
  }
  throw ConfigError(key, "expected one of {" + options + "}, got '" + value + "'");
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::size_t start = 0;
  int line_no = 0;
  while (start <= text.size()) {
    const std::size_t end = text.find('\n', start);
    std::string line = text.substr(
        start, end == std::string::npos ? std::string::npos : end - start);
    ++line_no;
    start = end == std::string::npos ? text.size() + 1 : end + 1;

    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line, "malformed line " + std::to_string(line_no) +
                                  " (expected key = value)");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)));
    if (key.empty() || !std::all_of(key.begin(), key.end(), [](unsigned char c) {
          return std::isalnum(c) || c == '_';
        }))
      throw ConfigError(key, "invalid key on line " + std::to_string(line_no));
    kv[key] = value;
  }
  return kv;
}

KeyValues load_config_file(const std::string& path) {
  const std::string text = read_text_file(path);
  const std::size_t first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    // Run manifest: pull the resolved config back out.
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ConfigError(path, std::string("manifest JSON parse failure: ") + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object())
      throw ConfigError(path, "manifest has no 'config' object");
    KeyValues kv;
    for (const auto& [key, value] : j["config"].items()) {
      if (value.is_string())
        kv[key] = value.get<std::string>();
      else
        kv[key] = value.dump();
    }
    return kv;
  }
  return parse_config_text(text);
}

void apply_overrides(KeyValues& kv, const std::vector<std::string>& sets) {
  for (const std::string& s : sets) {
    const std::size_t eq = s.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError(s, "malformed --set (expected KEY=VALUE)");
    kv[trim(s.substr(0, eq))] = unquote(trim(s.substr(eq + 1)));
  }
}

RunSettings resolve_config(const KeyValues& kv) {
  std::set<std::string> known;
  for (const KeySpec& spec : kKeys) known.insert(spec.key);
  for (const auto& [key, value] : kv)
    if (!known.count(key)) throw ConfigError(key, "unknown key");

  KeyValues full;
  for (const KeySpec& spec : kKeys) {
    const auto it = kv.find(spec.key);
    if (it != kv.end()) {
      full[spec.key] = it->second;
    } else if (spec.default_value) {
      full[spec.key] = spec.default_value;
    } else {
      throw ConfigError(spec.key, "required key is missing");
    }
  }

  RunSettings settings;
  ExperimentConfig& cfg = settings.experiment;
  cfg.client_count = static_cast<int>(to_int("M", full["M"]));
  cfg.arm_count = static_cast<int>(to_int("K", full["K"]));
  cfg.horizon = to_int("T", full["T"]);
  cfg.burn_in_rounds = to_int("L", full["L"]);
  cfg.chain_warmup = to_int("tau1", full["tau1"]);
  cfg.graph_model = to_enum("graph_model", full["graph_model"],
                            {std::pair<const char*, GraphModel>{"er", GraphModel::er},
                             {"uniform", GraphModel::uniform_connected}});
  cfg.edge_probability = to_real("c", full["c"]);
  cfg.chain_thin = to_int("thin", full["thin"]);
  cfg.reward_family = to_enum(
      "reward_family", full["reward_family"],
      {std::pair<const char*, RewardFamily>{"bernoulli", RewardFamily::bernoulli},
       {"truncated_gaussian", RewardFamily::truncated_gaussian},
       {"truncated_shifted_exponential", RewardFamily::truncated_shifted_exponential}});
  cfg.regime = to_enum("regime", full["regime"],
                       {std::pair<const char*, Regime>{"subgaussian", Regime::sub_gaussian},
                        {"subexponential", Regime::sub_exponential}});
  cfg.sigma = to_real("sigma", full["sigma"]);
  cfg.alpha = to_real("alpha", full["alpha"]);
  cfg.gap_scale = to_real("h", full["h"]);
  cfg.mean_base = to_real("base", full["base"]);
  cfg.c1 = to_real("C1", full["C1"]);
  cfg.c2 = to_real("C2", full["C2"]);
  cfg.c0 = to_real("c0", full["c0"]);
  cfg.delta = to_real("delta", full["delta"]);
  cfg.epsilon = to_real("epsilon", full["epsilon"]);
  cfg.link_cost = to_real("link_cost", full["link_cost"]);
  cfg.seed = to_uint("seed", full["seed"]);
  cfg.baseline =
      to_enum("baseline", full["baseline"],
              {std::pair<const char*, BaselineMode>{"drfed", BaselineMode::drfed},
               {"local_ucb", BaselineMode::local_ucb}});
  cfg.fallback =
      to_enum("fallback", full["fallback"],
              {std::pair<const char*, FallbackMode>{"lagging", FallbackMode::lagging},
               {"all_arms", FallbackMode::all_arms}});
  cfg.neighbor_term =
      to_enum("neighbor_term", full["neighbor_term"],
              {std::pair<const char*, NeighborTerm>{"bar", NeighborTerm::bar},
               {"tilde", NeighborTerm::tilde}});
  cfg.diagnostics = to_enum(
      "diagnostics", full["diagnostics"],
      {std::pair<const char*, DiagnosticsMode>{"light", DiagnosticsMode::light},
       {"full", DiagnosticsMode::full}});
  settings.runs = static_cast<int>(to_int("runs", full["runs"]));
  if (settings.runs < 1) throw ConfigError("runs", "must be >= 1");

  try {
    validate_config(cfg);
  } catch (const std::invalid_argument& e) {
    // validate_config reports "config key 'X': why" — surface it as a
    // ConfigError carrying the key.
    const std::string what = e.what();
    const std::size_t q1 = what.find('\'');
    const std::size_t q2 = q1 == std::string::npos ? std::string::npos
                                                   : what.find('\'', q1 + 1);
    if (q2 != std::string::npos)
      throw ConfigError(what.substr(q1 + 1, q2 - q1 - 1), what.substr(q2 + 3));
    throw ConfigError("config", what);
  }
  return settings;
}

std::map<std::string, std::string> canonical_config(const RunSettings& settings) {
  const ExperimentConfig& cfg = settings.experiment;
  std::map<std::string, std::string> out;
  out["M"] = std::to_string(cfg.client_count);
  out["K"] = std::to_string(cfg.arm_count);
  out["T"] = std::to_string(cfg.horizon);
  out["L"] = std::to_string(cfg.burn_in_rounds);
  out["tau1"] = std::to_string(cfg.chain_warmup);
  out["graph_model"] = cfg.graph_model == GraphModel::er ? "er" : "uniform";
  out["c"] = fmt17(cfg.edge_probability);
  out["thin"] = std::to_string(cfg.chain_thin);
  switch (cfg.reward_family) {
    case RewardFamily::bernoulli:
      out["reward_family"] = "bernoulli";
      break;
    case RewardFamily::truncated_gaussian:
      out["reward_family"] = "truncated_gaussian";
      break;
    case RewardFamily::truncated_shifted_exponential:
      out["reward_family"] = "truncated_shifted_exponential";
      break;
  }
  out["regime"] =
      cfg.regime == Regime::sub_gaussian ? "subgaussian" : "subexponential";
  out["sigma"] = fmt17(cfg.sigma);
  out["alpha"] = fmt17(cfg.alpha);
  out["h"] = fmt17(cfg.gap_scale);
  out["base"] = fmt17(cfg.mean_base);
  out["C1"] = fmt17(cfg.c1);
  out["C2"] = fmt17(cfg.c2);
  out["c0"] = fmt17(cfg.c0);
  out["delta"] = fmt17(cfg.delta);
  out["epsilon"] = fmt17(cfg.epsilon);
  out["link_cost"] = fmt17(cfg.link_cost);
  out["seed"] = std::to_string(cfg.seed);
  out["runs"] = std::to_string(settings.runs);
  out["baseline"] = cfg.baseline == BaselineMode::drfed ? "drfed" : "local_ucb";
  out["fallback"] = cfg.fallback == FallbackMode::lagging ? "lagging" : "all_arms";
  out["neighbor_term"] = cfg.neighbor_term == NeighborTerm::bar ? "bar" : "tilde";
  out["diagnostics"] =
      cfg.diagnostics == DiagnosticsMode::light ? "light" : "full";
  return out;
}

std::string config_hash(const RunSettings& settings) {
  std::string blob;
  for (const auto& [key, value] : canonical_config(settings)) {
    blob += key;
    blob.push_back('=');
    blob += value;
    blob.push_back('\n');
  }
  const std::uint64_t h = fnv1a64(blob);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace drfed
