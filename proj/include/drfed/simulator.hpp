#pragma once

// Round-based orchestration: environment graph sequence, M agents, barrier-
// synchronized exchange, and the measurement series (regret, communication,
// concentration diagnostics). Owns determinism: every random draw comes from
// a stream derived from (seed, role, index), so runs are reproducible and
// independent of scheduling.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "drfed/agent.hpp"
#include "drfed/graphs.hpp"
#include "drfed/rewards.hpp"
#include "drfed/rng.hpp"

namespace drfed {

enum class GraphModel { er, uniform_connected };
enum class BaselineMode { drfed, local_ucb };
enum class DiagnosticsMode { light, full };

struct ExperimentConfig {
  int client_count = 0;   // M (required)
  int arm_count = 0;      // K (required)
  std::int64_t horizon = 0;        // T (required)
  std::int64_t burn_in_rounds = 500;  // L
  std::int64_t chain_warmup = 0;      // tau1 (uniform model only)

  GraphModel graph_model = GraphModel::er;
  double edge_probability = 0.9;  // c, E-R model
  std::int64_t chain_thin = 0;    // MH steps between emitted graphs; 0 = M^2

  RewardFamily reward_family = RewardFamily::bernoulli;
  Regime regime = Regime::sub_gaussian;
  double sigma = 0.5;
  double alpha = 0.08;
  double gap_scale = 0.1;  // h
  double mean_base = 0.1;  // base

  double c1 = 0.1;   // UCB bonus scale
  double c2 = 0.0;   // sub-exponential linear term; 0 = auto 1.5 * c1
  double c0 = 0.5;   // staleness constant in A2
  double delta = 0.1;
  double epsilon = 0.1;
  double link_cost = 1.0;  // per-link communication cost coefficient

  std::uint64_t seed = 1;
  BaselineMode baseline = BaselineMode::drfed;
  FallbackMode fallback = FallbackMode::lagging;
  NeighborTerm neighbor_term = NeighborTerm::bar;
  DiagnosticsMode diagnostics = DiagnosticsMode::light;

  // Overrides the spread construction with explicit per-client means
  // (API-level hook used by tests and the baseline comparison; not a config
  // file key).
  std::optional<MeanMatrix> means_override;
};

/// Throws std::invalid_argument naming the offending key when a field is out
/// of its documented range.
void validate_config(const ExperimentConfig& cfg);

struct RoundRecord {
  std::int64_t t = 0;
  Graph graph;
  std::vector<int> actions;
  std::vector<double> rewards;
  std::vector<std::int64_t> n_gap;       // per agent: max_i (N - n)
  std::vector<double> weight_residual;   // per agent
  std::vector<std::uint8_t> zero_cache;  // per agent: stale zero consumed
};

struct EventAReport {
  bool a1_holds = true;
  std::int64_t a1_first_violation = 0;  // 0 = none
  double a1_sup_deviation = 0.0;        // sup over t >= L, pairs
  bool a2_holds = true;
  double a2_worst_ratio = 0.0;  // staleness / (c0 * min count), max over t >= L
  bool a3_holds = true;
  std::int64_t a3_first_disconnected = 0;  // 0 = none
};

struct Trajectory {
  ExperimentConfig config;
  MeanMatrix means;
  GlobalStats stats;

  // Per-round series, index 0 <=> t = 1, length T.
  std::vector<double> regret_series;          // cumulative pseudo-regret
  std::vector<std::int64_t> comm_series;      // cumulative sum |E_s| (raw edges)
  std::vector<double> a1_dev_series;          // per-round sup |pair freq - c|
  std::vector<std::uint8_t> connected_series;
  std::vector<std::int64_t> min_n_series;     // min over agents/arms
  std::vector<std::int64_t> max_gap_series;   // max over agents/arms of N - n

  std::vector<std::vector<int>> actions;  // [t-1][m]

  EventAReport event_a;
  double weight_residual_max = 0.0;   // over learning rounds/agents
  std::int64_t zero_cache_rounds = 0; // learning rounds where any agent used a zero cache
  std::int64_t balance_violations = 0;  // count-balance condition violations (logged)

  std::vector<RoundRecord> rounds;      // full diagnostics mode only
  std::vector<AgentState> final_agents;
};

/// Runs one seeded experiment (or the local-UCB baseline, per cfg.baseline).
Trajectory run_experiment(const ExperimentConfig& cfg);

/// Baseline: same harness and environment draws, but agents ignore all
/// messages and select by argmax of local mean + sub-Gaussian bonus.
Trajectory local_ucb_baseline(ExperimentConfig cfg);

/// Pseudo-regret from true means: R_t = t*mu_opt - (1/M) sum_{s<=t} sum_m
/// mu^m(a_m^s). Computed from means, not realized rewards.
std::vector<double> pseudo_regret(const std::vector<std::vector<int>>& actions,
                                  const GlobalStats& stats, const MeanMatrix& means);

/// Cumulative communication cost c1_cost * sum_s |E_s|.
std::vector<double> communication_cost(const std::vector<Graph>& graphs, double c1_cost);

/// Recomputes the event-A report offline from retained round history
/// (requires full diagnostics). Throws std::invalid_argument on empty
/// history.
EventAReport event_a_diagnostics(const std::vector<RoundRecord>& history,
                                 const ExperimentConfig& cfg);

enum class BoundSetting { s1, s2, s3 };

/// Advisory burn-in length from the setting-specific closed forms; runs use
/// cfg.burn_in_rounds regardless. lambda/p_star matter for s2 only; M enters
/// s3 only. Throws std::domain_error when a logarithm leaves its domain.
double burn_in_length_bound(BoundSetting setting, std::int64_t T, int K, double delta,
                            double epsilon, double c0, double lambda, double p_star,
                            int M);

/// The per-pair edge probability the A1 diagnostic compares frequencies
/// against: the configured c for the E-R model; the enumeration value (M <=
/// 5) or the 2ln(M)/(M-1) surrogate for the uniform-connected model.
double a1_target_probability(const ExperimentConfig& cfg);

}  // namespace drfed
