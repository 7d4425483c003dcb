#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cctype>
#include <cstdio>
#include <string>
#include <vector>

#include "drfed/config.hpp"
#include "drfed/report.hpp"

namespace {

drfed::KeyValues minimal_kv() {
  return drfed::parse_config_text("M = 3\nK = 2\nT = 1000\n");
}

std::string error_key(const std::function<void()>& f) {
  try {
    f();
  } catch (const drfed::ConfigError& err) {
    return err.key();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("parse_config_text: comments, quotes, precedence, malformed lines") {
  const auto kv = drfed::parse_config_text(
      "# experiment\n"
      "M = 3   # clients\n"
      "\n"
      "K=2\n"
      "  graph_model = 'uniform'  \n"
      "seed = \"42\"\n"
      "K = 5\n");  // later assignment wins
  CHECK(kv.at("M") == "3");
  CHECK(kv.at("K") == "5");
  CHECK(kv.at("graph_model") == "uniform");
  CHECK(kv.at("seed") == "42");

  CHECK_THROWS_WITH_AS(drfed::parse_config_text("M = 3\nK = 2\njust words\n"),
                       doctest::Contains("line 3"), drfed::ConfigError);
  CHECK_THROWS_WITH_AS(drfed::parse_config_text("bad-key = 1\n"),
                       doctest::Contains("invalid key"), drfed::ConfigError);
  CHECK_THROWS_AS(drfed::parse_config_text("= 7\n"), drfed::ConfigError);
}

TEST_CASE("resolve_config: documented defaults materialize") {
  const auto settings = drfed::resolve_config(minimal_kv());
  const auto& cfg = settings.experiment;
  CHECK(cfg.client_count == 3);
  CHECK(cfg.arm_count == 2);
  CHECK(cfg.horizon == 1000);
  CHECK(cfg.burn_in_rounds == 500);
  CHECK(cfg.chain_warmup == 0);
  CHECK(cfg.graph_model == drfed::GraphModel::er);
  CHECK(cfg.edge_probability == 0.9);
  CHECK(cfg.chain_thin == 0);
  CHECK(cfg.reward_family == drfed::RewardFamily::bernoulli);
  CHECK(cfg.regime == drfed::Regime::sub_gaussian);
  CHECK(cfg.sigma == 0.5);
  CHECK(cfg.alpha == 0.08);
  CHECK(cfg.gap_scale == 0.1);
  CHECK(cfg.mean_base == 0.1);
  CHECK(cfg.c1 == 0.1);
  CHECK(cfg.c2 == 0.0);
  CHECK(cfg.c0 == 0.5);
  CHECK(cfg.delta == 0.1);
  CHECK(cfg.epsilon == 0.1);
  CHECK(cfg.link_cost == 1.0);
  CHECK(cfg.seed == 1);
  CHECK(settings.runs == 50);
  CHECK(cfg.baseline == drfed::BaselineMode::drfed);
  CHECK(cfg.fallback == drfed::FallbackMode::lagging);
  CHECK(cfg.neighbor_term == drfed::NeighborTerm::bar);
  CHECK(cfg.diagnostics == drfed::DiagnosticsMode::light);
  CHECK_FALSE(cfg.means_override.has_value());
}

TEST_CASE("resolve_config: errors carry the offending key") {
  auto kv = minimal_kv();
  kv.erase("T");
  CHECK(error_key([&] { drfed::resolve_config(kv); }) == "T");

  kv = minimal_kv();
  kv["bogus"] = "1";
  CHECK(error_key([&] { drfed::resolve_config(kv); }) == "bogus");

  kv = minimal_kv();
  kv["M"] = "three";
  CHECK_THROWS_WITH_AS(drfed::resolve_config(kv),
                       doctest::Contains("expected an integer"), drfed::ConfigError);

  kv = minimal_kv();
  kv["M"] = "3.5";  // trailing characters after the integer part
  CHECK(error_key([&] { drfed::resolve_config(kv); }) == "M");

  kv = minimal_kv();
  kv["c"] = "fast";
  CHECK_THROWS_WITH_AS(drfed::resolve_config(kv), doctest::Contains("expected a number"),
                       drfed::ConfigError);

  kv = minimal_kv();
  kv["seed"] = "abc";
  CHECK(error_key([&] { drfed::resolve_config(kv); }) == "seed");

  kv = minimal_kv();
  kv["graph_model"] = "ring";
  CHECK_THROWS_WITH_AS(drfed::resolve_config(kv), doctest::Contains("er | uniform"),
                       drfed::ConfigError);

  kv = minimal_kv();
  kv["regime"] = "heavy";
  CHECK_THROWS_WITH_AS(drfed::resolve_config(kv),
                       doctest::Contains("subgaussian | subexponential"),
                       drfed::ConfigError);

  // Range violations from cross-key validation surface with the same key().
  kv = minimal_kv();
  kv["L"] = "1";  // below K
  CHECK(error_key([&] { drfed::resolve_config(kv); }) == "L");

  kv = minimal_kv();
  kv["runs"] = "0";
  CHECK(error_key([&] { drfed::resolve_config(kv); }) == "runs");

  kv = minimal_kv();
  kv["regime"] = "subexponential";
  kv["C2"] = "0.05";  // below 1.5 * default C1 = 0.15
  CHECK(error_key([&] { drfed::resolve_config(kv); }) == "C2");

  kv = minimal_kv();
  kv["delta"] = "1";
  CHECK(error_key([&] { drfed::resolve_config(kv); }) == "delta");
}

TEST_CASE("apply_overrides: precedence and malformed sets") {
  auto kv = minimal_kv();
  drfed::apply_overrides(kv, {"seed=99", "c = 0.5"});
  CHECK(kv.at("seed") == "99");
  CHECK(kv.at("c") == "0.5");
  drfed::apply_overrides(kv, {"seed=100"});
  CHECK(kv.at("seed") == "100");

  CHECK_THROWS_WITH_AS(drfed::apply_overrides(kv, {"seed"}),
                       doctest::Contains("KEY=VALUE"), drfed::ConfigError);
  CHECK_THROWS_AS(drfed::apply_overrides(kv, {"=3"}), drfed::ConfigError);
}

TEST_CASE("canonical form and content hash are stable") {
  const auto a = drfed::resolve_config(minimal_kv());
  // Same values, different textual spellings.
  const auto b = drfed::resolve_config(
      drfed::parse_config_text("T=1000\nM=3\nK=2\nc = 0.90\nseed = 01\n"));
  CHECK(drfed::canonical_config(a) == drfed::canonical_config(b));
  CHECK(drfed::config_hash(a) == drfed::config_hash(b));

  const auto canon = drfed::canonical_config(a);
  CHECK(canon.size() == 26);  // every key present in the resolved form
  CHECK(canon.at("c") == "0.90000000000000002");  // 17-digit float formatting
  CHECK(canon.at("L") == "500");
  CHECK(canon.at("graph_model") == "er");

  const auto hash = drfed::config_hash(a);
  CHECK(hash.size() == 16);
  for (const char ch : hash) CHECK(std::isxdigit(static_cast<unsigned char>(ch)));

  auto kv = minimal_kv();
  kv["seed"] = "2";
  CHECK(drfed::config_hash(drfed::resolve_config(kv)) != hash);
}

TEST_CASE("manifest JSON round-trips as a config source") {
  auto kv = minimal_kv();
  kv["graph_model"] = "uniform";
  kv["C1"] = "0.17";
  kv["seed"] = "31";
  const auto settings = drfed::resolve_config(kv);
  const std::string manifest = drfed::manifest_json(
      settings, "0.0-test", {31, 32}, {"run_000.csv", "run_001.csv"}, 1.25);

  const std::string path = "test_config_manifest_tmp.json";
  drfed::write_text_file(path, manifest);
  const auto reloaded = drfed::load_config_file(path);
  const auto again = drfed::resolve_config(reloaded);
  CHECK(drfed::canonical_config(again) == drfed::canonical_config(settings));
  CHECK(drfed::config_hash(again) == drfed::config_hash(settings));

  // Manifest sniffing tolerates leading whitespace and reports bad JSON.
  drfed::write_text_file(path, "\n  " + manifest);
  CHECK(drfed::resolve_config(drfed::load_config_file(path)).experiment.seed == 31);

  drfed::write_text_file(path, "{ not json");
  CHECK_THROWS_WITH_AS(drfed::load_config_file(path),
                       doctest::Contains("manifest JSON parse failure"),
                       drfed::ConfigError);
  drfed::write_text_file(path, "{}");
  CHECK_THROWS_WITH_AS(drfed::load_config_file(path),
                       doctest::Contains("no 'config' object"), drfed::ConfigError);
  std::remove(path.c_str());
}

TEST_CASE("plain config files load through the same entry point") {
  const std::string path = "test_config_plain_tmp.cfg";
  drfed::write_text_file(path, "M = 2\nK = 2\nT = 600\nL = 60\nh = 0.2\n");
  const auto settings = drfed::resolve_config(drfed::load_config_file(path));
  CHECK(settings.experiment.client_count == 2);
  CHECK(settings.experiment.burn_in_rounds == 60);
  CHECK(settings.experiment.gap_scale == 0.2);
  std::remove(path.c_str());
}
