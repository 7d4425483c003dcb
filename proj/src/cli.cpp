#include "drfed/cli.hpp"

#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "CLI11.hpp"
#include "drfed/analysis.hpp"
#include "drfed/config.hpp"
#include "drfed/graphs.hpp"
#include "drfed/report.hpp"
#include "drfed/rng.hpp"
#include "drfed/simulator.hpp"

#ifndef DRFED_VERSION_STRING
#define DRFED_VERSION_STRING "0.1.0"
#endif

namespace drfed {

namespace {

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> sets;
  int runs = 0;  // 0 = take from config
  int jobs = 1;
  std::string out_dir;
  std::string diagnostics;
  bool gnuplot = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "config file (or run manifest JSON)")
      ->required();
  cmd->add_option("--set", flags.sets, "override KEY=VALUE (repeatable)");
  cmd->add_option("--runs", flags.runs, "number of seeded runs (overrides config)");
  cmd->add_option("--jobs", flags.jobs, "parallel workers for independent runs");
  cmd->add_option("--out", flags.out_dir, "output directory (default out/<config hash>)");
  cmd->add_option("--diagnostics", flags.diagnostics, "light|full history retention");
  cmd->add_flag("--gnuplot", flags.gnuplot, "also write a gnuplot script");
}

RunSettings load_settings(const CommonFlags& flags,
                          const std::map<std::string, std::string>& extra = {}) {
  KeyValues kv = load_config_file(flags.config_path);
  apply_overrides(kv, flags.sets);
  for (const auto& [key, value] : extra) kv[key] = value;
  if (flags.runs > 0) kv["runs"] = std::to_string(flags.runs);
  if (!flags.diagnostics.empty()) kv["diagnostics"] = flags.diagnostics;
  if (const char* env = std::getenv("DRFED_SEED")) kv["seed"] = env;
  return resolve_config(kv);
}

std::vector<Trajectory> execute_runs(const RunSettings& settings, int jobs) {
  const int n = settings.runs;
  std::vector<Trajectory> out(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&] {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      try {
        ExperimentConfig cfg = settings.experiment;
        cfg.seed = settings.experiment.seed + static_cast<std::uint64_t>(i);
        out[static_cast<std::size_t>(i)] = run_experiment(cfg);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int count = std::min(jobs, n);
    pool.reserve(static_cast<std::size_t>(count));
    for (int w = 0; w < count; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

struct BatchResult {
  AggregateSeries aggregate_series;
  std::string out_dir;
};

// Writes run CSVs, the aggregate, optional gnuplot script, and the manifest
// for one batch of seeded runs. File contents depend only on the resolved
// config (the manifest's wall-clock field aside).
BatchResult write_batch(const RunSettings& settings, const std::vector<Trajectory>& trajs,
                        const std::string& out_dir, bool gnuplot,
                        const std::string& param_label, double wall_clock_seconds) {
  std::vector<std::string> paths;
  std::vector<std::uint64_t> seeds;
  char name[64];
  for (std::size_t i = 0; i < trajs.size(); ++i) {
    std::snprintf(name, sizeof name, "run_%03d.csv", static_cast<int>(i));
    write_text_file(out_dir + "/" + name, trajectory_csv(trajs[i], static_cast<int>(i)));
    paths.emplace_back(name);
    seeds.push_back(settings.experiment.seed + static_cast<std::uint64_t>(i));
  }
  std::vector<std::vector<double>> regrets;
  regrets.reserve(trajs.size());
  for (const Trajectory& t : trajs) regrets.push_back(t.regret_series);
  BatchResult result;
  result.aggregate_series = aggregate(regrets);
  result.out_dir = out_dir;
  write_text_file(out_dir + "/aggregate.csv",
                  aggregate_csv(result.aggregate_series, param_label));
  paths.emplace_back("aggregate.csv");
  if (gnuplot) {
    write_text_file(out_dir + "/plot.gp", gnuplot_script("aggregate.csv"));
    paths.emplace_back("plot.gp");
  }
  write_text_file(out_dir + "/manifest.json",
                  manifest_json(settings, DRFED_VERSION_STRING, seeds, paths,
                                wall_clock_seconds));
  return result;
}

int do_run(const CommonFlags& flags) {
  const auto t0 = std::chrono::steady_clock::now();
  const RunSettings settings = load_settings(flags);
  const std::string out_dir =
      flags.out_dir.empty() ? "out/" + config_hash(settings) : flags.out_dir;
  const std::vector<Trajectory> trajs = execute_runs(settings, flags.jobs);
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const BatchResult result = write_batch(settings, trajs, out_dir, flags.gnuplot, "-", wall);

  int a1a3 = 0;
  for (const Trajectory& t : trajs)
    if (t.event_a.a1_holds && t.event_a.a3_holds) ++a1a3;
  std::printf("run: %d seeded runs, M=%d K=%d T=%lld -> %s\n", settings.runs,
              settings.experiment.client_count, settings.experiment.arm_count,
              static_cast<long long>(settings.experiment.horizon), out_dir.c_str());
  std::printf("final mean regret %.6g +/- %.6g; A1&A3 held in %d/%d runs\n",
              result.aggregate_series.mean.back(),
              result.aggregate_series.half_width.back(), a1a3, settings.runs);
  return 0;
}

std::vector<std::string> split_csv_list(const std::string& text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    std::string tok = text.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(tok.substr(b, e - b + 1));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

int do_sweep(const CommonFlags& flags, const std::string& param,
             const std::string& values_csv) {
  static const std::set<std::string> kSweepable{"h", "M", "c", "K", "L", "T"};
  if (!kSweepable.count(param))
    throw ConfigError(param, "unknown sweep parameter (choose one of h, M, c, K, L, T)");
  const std::vector<std::string> values = split_csv_list(values_csv);
  if (values.empty()) throw ConfigError("values", "need at least one sweep value");

  const auto t0 = std::chrono::steady_clock::now();
  std::vector<SweepPoint> points;
  std::string root;
  std::string tidy_rows;
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    const std::string& value = values[idx];
    const RunSettings settings = load_settings(flags, {{param, value}});
    if (root.empty())
      root = flags.out_dir.empty() ? "out/sweep_" + param + "_" + config_hash(settings)
                                   : flags.out_dir;
    // Independent sub-seed per sweep point, derived from the master seed and
    // the point's identity so reruns and reorderings cannot collide.
    RunSettings seeded = settings;
    std::uint64_t st = settings.experiment.seed ^ fnv1a64("sweep:" + param + "=" + value);
    seeded.experiment.seed = splitmix64_next(st);

    const std::vector<Trajectory> trajs = execute_runs(seeded, flags.jobs);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const std::string dir = root + "/" + param + "=" + value;
    const std::string label = param + "=" + value;
    const BatchResult result =
        write_batch(seeded, trajs, dir, flags.gnuplot, label, wall);
    tidy_rows += aggregate_csv_rows(result.aggregate_series, label);

    SweepPoint point;
    point.param_value = std::strtod(value.c_str(), nullptr);
    point.final_mean = result.aggregate_series.mean.back();
    point.final_half_width = result.aggregate_series.half_width.back();
    points.push_back(point);
  }

  SweepDirection direction = SweepDirection::none;
  if (param == "h" || param == "K") direction = SweepDirection::non_decreasing;
  if (param == "c") direction = SweepDirection::non_increasing;
  const SweepSummary summary = sweep_summary(points, direction);

  write_text_file(root + "/sweep.csv", sweep_csv(param, summary));
  write_text_file(root + "/aggregate_all.csv", "param,t,mean,ci_lo,ci_hi\n" + tidy_rows);
  std::printf("sweep %s over %zu values -> %s\n", param.c_str(), values.size(),
              root.c_str());
  std::printf("%-12s %-14s %-14s\n", param.c_str(), "final_mean", "half_width");
  for (const SweepPoint& p : summary.points)
    std::printf("%-12g %-14.6g %-14.6g\n", p.param_value, p.final_mean,
                p.final_half_width);
  std::printf("verdict: %s\n", summary.verdict.c_str());
  return 0;
}

int do_oracle(int m) {
  const auto graphs = enumerate_connected(m);  // throws std::length_error past M=5
  std::printf("M=%d: %zu connected graph%s", m, graphs.size(),
              graphs.size() == 1 ? "" : "s");
  if (m >= 2) {
    const auto frac = edge_presence_fraction(m);
    std::printf("; edge probability %lld/%lld", frac.first, frac.second);
  }
  if (m >= 2 && m <= 4) {
    const auto p = transition_matrix(m);
    const double u = 1.0 / static_cast<double>(p.size());
    double residual = 0.0;
    for (std::size_t b = 0; b < p.size(); ++b) {
      double acc = 0.0;
      for (std::size_t a = 0; a < p.size(); ++a) acc += u * p[a][b];
      residual = std::max(residual, std::abs(acc - u));
    }
    std::printf("; stationarity residual %.2e (%s 1e-12)", residual,
                residual < 1e-12 ? "<" : ">=");
  } else if (m == 5) {
    std::printf("; transition matrix skipped (size limit M <= 4)");
  }
  std::printf("\n");
  return 0;
}

int do_mixing(int m, std::int64_t tau1, std::int64_t samples) {
  if (m < 2 || m > 4)
    throw std::length_error("mixing: size limit is 2 <= M <= 4 (needs exact enumeration)");
  if (tau1 < 0 || samples < 1)
    throw ConfigError("samples", "need tau1 >= 0 and samples >= 1");
  std::uint64_t seed = 1;
  if (const char* env = std::getenv("DRFED_SEED")) seed = std::strtoull(env, nullptr, 10);

  const auto states = enumerate_connected(m);
  const auto pairs = pair_list(m);
  std::unordered_map<std::uint64_t, std::size_t> index_of;
  for (std::size_t s = 0; s < states.size(); ++s) {
    std::uint64_t mask = 0;
    for (std::size_t b = 0; b < pairs.size(); ++b)
      if (states[s].edge(pairs[b].first, pairs[b].second)) mask |= 1ull << b;
    index_of[mask] = s;
  }

  std::set<std::int64_t> checkpoint_set{100, 1000, 10000, tau1, samples};
  std::vector<std::int64_t> checkpoints;
  for (const std::int64_t c : checkpoint_set)
    if (c >= 1 && c <= samples) checkpoints.push_back(c);

  ChainState chain = sample_uniform_connected(m, tau1, derive_stream(seed, "mixing"));
  std::vector<double> counts(states.size(), 0.0);
  const std::vector<double> uniform(states.size(), 1.0 / static_cast<double>(states.size()));
  std::size_t next_checkpoint = 0;
  double final_tv = 0.0;
  std::printf("M=%d, tau1=%lld warm-up steps, %lld samples, %zu states\n", m,
              static_cast<long long>(tau1), static_cast<long long>(samples),
              states.size());
  for (std::int64_t s = 1; s <= samples; ++s) {
    mh_step(chain);
    std::uint64_t mask = 0;
    for (std::size_t b = 0; b < pairs.size(); ++b)
      if (chain.current.edge(pairs[b].first, pairs[b].second)) mask |= 1ull << b;
    counts[index_of.at(mask)] += 1.0;
    if (next_checkpoint < checkpoints.size() && s == checkpoints[next_checkpoint]) {
      std::vector<double> empirical(counts);
      for (double& c : empirical) c /= static_cast<double>(s);
      final_tv = tv_distance(empirical, uniform);
      std::printf("samples=%-10lld TV=%.4f\n", static_cast<long long>(s), final_tv);
      ++next_checkpoint;
    }
  }
  std::printf("final TV %.4f (target < 0.05)\n", final_tv);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"drfed: decentralized bandit simulation over random graphs"};
  app.require_subcommand(1);

  CommonFlags run_flags;
  CLI::App* run_cmd = app.add_subcommand("run", "execute seeded experiment runs");
  add_common_flags(run_cmd, run_flags);

  CommonFlags sweep_flags;
  std::string sweep_param, sweep_values;
  CLI::App* sweep_cmd = app.add_subcommand("sweep", "sweep one parameter over values");
  add_common_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--param", sweep_param, "parameter: h|M|c|K|L|T")->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated value list")->required();

  int oracle_m = 0;
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "exact connected-graph facts for small M");
  oracle_cmd->add_option("M", oracle_m, "node count (<= 5)")->required();

  int mixing_m = 0;
  std::int64_t mixing_tau1 = 0, mixing_samples = 0;
  CLI::App* mixing_cmd =
      app.add_subcommand("mixing", "chain-vs-uniform TV distance at checkpoints");
  mixing_cmd->add_option("M", mixing_m, "node count (2..4)")->required();
  mixing_cmd->add_option("tau1", mixing_tau1, "warm-up steps")->required();
  mixing_cmd->add_option("samples", mixing_samples, "chain samples")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "argument error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (run_cmd->parsed()) return do_run(run_flags);
    if (sweep_cmd->parsed()) return do_sweep(sweep_flags, sweep_param, sweep_values);
    if (oracle_cmd->parsed()) return do_oracle(oracle_m);
    if (mixing_cmd->parsed()) return do_mixing(mixing_m, mixing_tau1, mixing_samples);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::length_error& e) {
    std::cerr << "size limit: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
  return 3;
}

}  // namespace drfed
