#include "drfed/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace drfed {

void validate_config(const ExperimentConfig& cfg) {
  const auto fail = [](const std::string& key, const std::string& why) {
    throw std::invalid_argument("config key '" + key + "': " + why);
  };
  if (cfg.client_count < 1) fail("M", "must be >= 1");
  if (cfg.arm_count < 1) fail("K", "must be >= 1");
  if (cfg.horizon < 1) fail("T", "must be >= 1");
  if (cfg.burn_in_rounds < 0 || cfg.burn_in_rounds > cfg.horizon)
    fail("L", "must satisfy 0 <= L <= T");
  if (cfg.burn_in_rounds < cfg.arm_count)
    fail("L", "must be >= K so every arm is pulled during burn-in");
  if (cfg.chain_warmup < 0 || cfg.chain_warmup > cfg.burn_in_rounds)
    fail("tau1", "must satisfy 0 <= tau1 <= L");
  if (!(cfg.edge_probability >= 0.0) || !(cfg.edge_probability <= 1.0))
    fail("c", "must lie in [0, 1]");
  if (cfg.chain_thin < 0) fail("thin", "must be >= 0 (0 = auto M^2)");
  if (cfg.graph_model == GraphModel::uniform_connected && cfg.client_count < 2)
    fail("graph_model", "uniform_connected needs M >= 2");
  if (!(cfg.delta > 0.0) || !(cfg.delta < 1.0)) fail("delta", "must lie in (0, 1)");
  if (!(cfg.epsilon > 0.0) || !(cfg.epsilon < 1.0)) fail("epsilon", "must lie in (0, 1)");
  if (!(cfg.c0 > 0.0) || !(cfg.c0 < 1.0)) fail("c0", "must lie in (0, 1)");
  if (!(cfg.sigma >= 0.0)) fail("sigma", "must be >= 0");
  if (!(cfg.alpha > 0.0)) fail("alpha", "must be > 0");
  if (!(cfg.c1 > 0.0)) fail("C1", "must be > 0");
  if (cfg.c2 < 0.0) fail("C2", "must be >= 0 (0 = auto 1.5*C1)");
  if (cfg.regime == Regime::sub_exponential && cfg.c2 != 0.0 &&
      cfg.c2 < 1.5 * cfg.c1 - 1e-12)
    fail("C2", "sub-exponential regime requires C2 >= 1.5*C1");
  if (!(cfg.link_cost >= 0.0)) fail("link_cost", "must be >= 0");
  if (cfg.means_override) {
    if (cfg.means_override->client_count != cfg.client_count ||
        cfg.means_override->arm_count != cfg.arm_count)
      fail("means_override", "dimension mismatch with M/K");
    for (const double mu : cfg.means_override->mu)
      if (!(mu >= 0.0) || !(mu <= 1.0)) fail("means_override", "means must lie in [0, 1]");
  } else {
    if (cfg.gap_scale < 0.0) fail("h", "must be >= 0");
    if (cfg.mean_base < 0.0) fail("base", "must be >= 0");
    if (cfg.mean_base + cfg.gap_scale > 1.0) fail("base", "base + h must be <= 1");
  }
}

double a1_target_probability(const ExperimentConfig& cfg) {
  if (cfg.graph_model == GraphModel::er) return cfg.edge_probability;
  return cfg.client_count <= 5
             ? edge_presence_probability(cfg.client_count, EdgeProbMode::enumeration)
             : edge_presence_probability(cfg.client_count, EdgeProbMode::formula);
}

namespace {

// Environment graph sequence: fresh E-R draw per round, or a thinned
// Metropolis–Hastings chain for the uniform-connected model.
class GraphSource {
 public:
  GraphSource(const ExperimentConfig& cfg, RngStream env_stream)
      : model_(cfg.graph_model),
        node_count_(cfg.client_count),
        edge_probability_(cfg.edge_probability),
        thin_(cfg.chain_thin > 0
                  ? cfg.chain_thin
                  : static_cast<std::int64_t>(cfg.client_count) * cfg.client_count),
        er_stream_(env_stream) {
    if (model_ == GraphModel::uniform_connected)
      chain_ = sample_uniform_connected(node_count_, cfg.chain_warmup, env_stream);
  }

  Graph next() {
    if (model_ == GraphModel::er)
      return generate_er(node_count_, edge_probability_, er_stream_);
    for (std::int64_t s = 0; s < thin_; ++s) mh_step(*chain_);
    return chain_->current;
  }

 private:
  GraphModel model_;
  int node_count_;
  double edge_probability_;
  std::int64_t thin_;
  RngStream er_stream_;
  std::optional<ChainState> chain_;
};

int argmax_local_ucb(const AgentState& st, double c1, std::int64_t t) {
  int best = 0;
  double best_value = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < st.arm_count; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const double value =
        st.bar[iu] + std::sqrt(c1 * std::log(static_cast<double>(t)) /
                               static_cast<double>(st.n[iu]));
    if (value > best_value) {
      best_value = value;
      best = i;
    }
  }
  return best;
}

// Running state for the event-A / CSV diagnostics the simulator keeps in
// both diagnostics modes (all O(M^2) per round).
struct DiagTracker {
  int m = 0;
  double target_c = 0.0;
  std::int64_t burn_in = 0;
  double c0 = 0.0, delta = 0.0;
  std::vector<double> pair_freq;          // M*M symmetric, self-diagonal unused
  std::vector<std::int64_t> last_pair_t;  // M*M, 0 = never

  EventAReport report;

  void init(const ExperimentConfig& cfg) {
    m = cfg.client_count;
    target_c = a1_target_probability(cfg);
    burn_in = cfg.burn_in_rounds;
    c0 = cfg.c0;
    delta = cfg.delta;
    pair_freq.assign(static_cast<std::size_t>(m) * m, 0.0);
    last_pair_t.assign(static_cast<std::size_t>(m) * m, 0);
  }

  // Returns this round's sup-deviation |pair frequency - target| and folds
  // the round into the running A1/A2/A3 verdicts.
  double absorb_round(std::int64_t t, const Graph& g, bool connected,
                      const std::vector<AgentState>& agents) {
    double dev = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j) {
        const auto a = static_cast<std::size_t>(i) * m + j;
        const bool present = g.edge(i, j);
        double& p = pair_freq[a];
        p = ((static_cast<double>(t) - 1.0) * p + (present ? 1.0 : 0.0)) /
            static_cast<double>(t);
        pair_freq[static_cast<std::size_t>(j) * m + i] = p;
        if (present) {
          last_pair_t[a] = t;
          last_pair_t[static_cast<std::size_t>(j) * m + i] = t;
        }
        dev = std::max(dev, std::abs(p - target_c));
      }
    if (t < burn_in) return dev;

    if (dev > report.a1_sup_deviation) report.a1_sup_deviation = dev;
    if (dev > delta && report.a1_holds) {
      report.a1_holds = false;
      report.a1_first_violation = t;
    }
    if (!connected && report.a3_holds) {
      report.a3_holds = false;
      report.a3_first_disconnected = t;
    }
    if (m > 1) {
      std::int64_t min_count = std::numeric_limits<std::int64_t>::max();
      for (const AgentState& st : agents)
        for (const std::int64_t n : st.n) min_count = std::min(min_count, n);
      for (int i = 0; i < m; ++i) {
        std::int64_t oldest = std::numeric_limits<std::int64_t>::max();
        for (int j = 0; j < m; ++j)
          if (j != i)
            oldest = std::min(oldest, last_pair_t[static_cast<std::size_t>(i) * m + j]);
        const double staleness = static_cast<double>(t + 1 - oldest);
        const double bound = c0 * static_cast<double>(min_count);
        const double ratio = bound > 0.0 ? staleness / bound
                                         : std::numeric_limits<double>::infinity();
        if (ratio > report.a2_worst_ratio) report.a2_worst_ratio = ratio;
        if (ratio > 1.0) report.a2_holds = false;
      }
    }
    return dev;
  }
};

}  // namespace

std::vector<double> pseudo_regret(const std::vector<std::vector<int>>& actions,
                                  const GlobalStats& stats, const MeanMatrix& means) {
  const int m_count = means.client_count;
  const double mu_opt =
      stats.global_means[static_cast<std::size_t>(stats.optimal_arm)];
  std::vector<double> out;
  out.reserve(actions.size());
  double acc = 0.0;
  for (const auto& round : actions) {
    if (static_cast<int>(round.size()) != m_count)
      throw std::invalid_argument("pseudo_regret: actions row length != M");
    double own = 0.0;
    for (int m = 0; m < m_count; ++m) {
      const int a = round[static_cast<std::size_t>(m)];
      if (a < 0 || a >= means.arm_count)
        throw std::invalid_argument("pseudo_regret: arm index out of range");
      own += means.at(m, a);
    }
    acc += mu_opt - own / static_cast<double>(m_count);
    out.push_back(acc);
  }
  return out;
}

std::vector<double> communication_cost(const std::vector<Graph>& graphs, double c1_cost) {
  if (c1_cost < 0.0)
    throw std::invalid_argument("communication_cost: c1 must be >= 0");
  std::vector<double> out;
  out.reserve(graphs.size());
  double acc = 0.0;
  for (const Graph& g : graphs) {
    acc += c1_cost * g.edge_count();
    out.push_back(acc);
  }
  return out;
}

Trajectory run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const int m_count = cfg.client_count;
  const int k_count = cfg.arm_count;
  const bool use_network = cfg.baseline == BaselineMode::drfed;
  const bool full_diag = cfg.diagnostics == DiagnosticsMode::full;

  Trajectory traj;
  traj.config = cfg;
  traj.means = cfg.means_override ? *cfg.means_override
                                  : build_heterogeneous_means(m_count, k_count,
                                                              cfg.gap_scale, cfg.mean_base);
  traj.stats = global_stats(traj.means);
  const RewardModel model =
      make_reward_model(cfg.regime, cfg.reward_family, traj.means, cfg.sigma, cfg.alpha);

  BonusConfig bonus;
  bonus.regime = cfg.regime;
  bonus.c1 = cfg.c1;
  bonus.c2 = cfg.c2 > 0.0 ? cfg.c2 : 1.5 * cfg.c1;
  bonus.horizon = cfg.horizon;

  GraphSource env(cfg, derive_stream(cfg.seed, "env"));
  std::vector<RngStream> reward_streams, select_streams;
  reward_streams.reserve(static_cast<std::size_t>(m_count));
  select_streams.reserve(static_cast<std::size_t>(m_count));
  for (int m = 0; m < m_count; ++m) {
    reward_streams.push_back(derive_stream(cfg.seed, "reward", static_cast<std::uint64_t>(m)));
    select_streams.push_back(derive_stream(cfg.seed, "select", static_cast<std::uint64_t>(m)));
  }

  std::vector<AgentState> agents;
  agents.reserve(static_cast<std::size_t>(m_count));
  for (int m = 0; m < m_count; ++m) agents.push_back(make_agent(m, m_count, k_count));

  DiagTracker diag;
  diag.init(cfg);

  const std::int64_t T = cfg.horizon;
  traj.regret_series.reserve(static_cast<std::size_t>(T));
  traj.comm_series.reserve(static_cast<std::size_t>(T));
  traj.a1_dev_series.reserve(static_cast<std::size_t>(T));
  traj.connected_series.reserve(static_cast<std::size_t>(T));
  traj.min_n_series.reserve(static_cast<std::size_t>(T));
  traj.max_gap_series.reserve(static_cast<std::size_t>(T));
  traj.actions.reserve(static_cast<std::size_t>(T));

  const double mu_opt =
      traj.stats.global_means[static_cast<std::size_t>(traj.stats.optimal_arm)];
  double regret_acc = 0.0;
  std::int64_t comm_acc = 0;
  const std::int64_t balance_threshold =
      2 * (static_cast<std::int64_t>(k_count) * k_count +
           static_cast<std::int64_t>(k_count) * m_count + m_count);

  std::vector<int> arms(static_cast<std::size_t>(m_count), 0);
  std::vector<double> rewards(static_cast<std::size_t>(m_count), 0.0);
  std::vector<Message> outbox(static_cast<std::size_t>(m_count));
  std::vector<Message> inbox;

  for (std::int64_t t = 1; t <= T; ++t) {
    const bool in_burn_in = t <= cfg.burn_in_rounds;

    // Select and pull.
    for (int m = 0; m < m_count; ++m) {
      const auto mu = static_cast<std::size_t>(m);
      if (in_burn_in)
        arms[mu] = burn_in_act(agents[mu], agents[mu].clock);
      else if (use_network)
        arms[mu] = select_arm(agents[mu], bonus, cfg.fallback, select_streams[mu]);
      else
        arms[mu] = argmax_local_ucb(agents[mu], cfg.c1, t);
      rewards[mu] = sample_reward(model, m, arms[mu], reward_streams[mu]);
    }

    // Environment draws this round's communication graph.
    const Graph g = env.next();
    const bool connected = is_connected(g);

    // Exchange and update. Burn-in messages carry the post-observation local
    // means; learning messages snapshot the pre-update state. Baseline
    // agents hear their neighbors but ignore all payloads.
    if (in_burn_in) {
      for (int m = 0; m < m_count; ++m) {
        const auto mu = static_cast<std::size_t>(m);
        observe(agents[mu], arms[mu], rewards[mu]);
      }
      if (use_network)
        for (int m = 0; m < m_count; ++m)
          outbox[static_cast<std::size_t>(m)] =
              make_burn_in_message(agents[static_cast<std::size_t>(m)]);
      for (int m = 0; m < m_count; ++m) {
        const auto mu = static_cast<std::size_t>(m);
        const std::vector<int> nbrs = g.neighbors(m);
        inbox.clear();
        if (use_network)
          for (const int j : nbrs) inbox.push_back(outbox[static_cast<std::size_t>(j)]);
        record_neighbors(agents[mu], nbrs, t, inbox);
      }
      if (t == cfg.burn_in_rounds)
        for (int m = 0; m < m_count; ++m)
          finalize_burn_in(agents[static_cast<std::size_t>(m)], cfg.burn_in_rounds);
    } else {
      if (use_network) {
        for (int m = 0; m < m_count; ++m)
          outbox[static_cast<std::size_t>(m)] =
              make_message(agents[static_cast<std::size_t>(m)]);
        for (int m = 0; m < m_count; ++m) {
          const auto mu = static_cast<std::size_t>(m);
          const std::vector<int> nbrs = g.neighbors(m);
          inbox.clear();
          for (const int j : nbrs) inbox.push_back(outbox[static_cast<std::size_t>(j)]);
          update_round(agents[mu], t, arms[mu], rewards[mu], nbrs, inbox,
                       cfg.neighbor_term);
          if (agents[mu].weight_residual > traj.weight_residual_max)
            traj.weight_residual_max = agents[mu].weight_residual;
        }
        bool any_zero = false;
        for (const AgentState& st : agents) any_zero = any_zero || st.consumed_zero_cache;
        if (any_zero) ++traj.zero_cache_rounds;
      } else {
        for (int m = 0; m < m_count; ++m) {
          const auto mu = static_cast<std::size_t>(m);
          observe(agents[mu], arms[mu], rewards[mu]);
          record_neighbors(agents[mu], g.neighbors(m), t, {});
          agents[mu].big_n = agents[mu].n;
        }
      }
    }

    // Measurement series.
    double own_mean_sum = 0.0;
    for (int m = 0; m < m_count; ++m)
      own_mean_sum += traj.means.at(m, arms[static_cast<std::size_t>(m)]);
    regret_acc += mu_opt - own_mean_sum / static_cast<double>(m_count);
    comm_acc += g.edge_count();

    std::int64_t min_n = std::numeric_limits<std::int64_t>::max();
    std::int64_t max_gap = 0;
    for (const AgentState& st : agents)
      for (int i = 0; i < k_count; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        min_n = std::min(min_n, st.n[iu]);
        max_gap = std::max(max_gap, st.big_n[iu] - st.n[iu]);
      }

    // Count-balance condition (logged, not asserted: it presumes every
    // graph so far was connected).
    if (connected)
      for (const AgentState& st : agents)
        for (int i = 0; i < k_count; ++i) {
          const auto iu = static_cast<std::size_t>(i);
          if (st.n[iu] < balance_threshold) continue;
          std::int64_t min_li = std::numeric_limits<std::int64_t>::max();
          for (const AgentState& other : agents) min_li = std::min(min_li, other.n[iu]);
          if (st.n[iu] > 2 * min_li) ++traj.balance_violations;
        }

    const double a1_dev = diag.absorb_round(t, g, connected, agents);

    traj.regret_series.push_back(regret_acc);
    traj.comm_series.push_back(comm_acc);
    traj.a1_dev_series.push_back(a1_dev);
    traj.connected_series.push_back(connected ? 1 : 0);
    traj.min_n_series.push_back(min_n);
    traj.max_gap_series.push_back(max_gap);
    traj.actions.push_back(arms);

    if (full_diag) {
      RoundRecord rec;
      rec.t = t;
      rec.graph = g;
      rec.actions = arms;
      rec.rewards = rewards;
      rec.n_gap.resize(static_cast<std::size_t>(m_count));
      rec.weight_residual.resize(static_cast<std::size_t>(m_count));
      rec.zero_cache.resize(static_cast<std::size_t>(m_count));
      for (int m = 0; m < m_count; ++m) {
        const auto mu = static_cast<std::size_t>(m);
        std::int64_t gap = 0;
        for (int i = 0; i < k_count; ++i)
          gap = std::max(gap, agents[mu].big_n[static_cast<std::size_t>(i)] -
                                  agents[mu].n[static_cast<std::size_t>(i)]);
        rec.n_gap[mu] = gap;
        rec.weight_residual[mu] = agents[mu].weight_residual;
        rec.zero_cache[mu] = agents[mu].consumed_zero_cache ? 1 : 0;
      }
      traj.rounds.push_back(std::move(rec));
    }
  }

  traj.event_a = diag.report;
  traj.final_agents = std::move(agents);
  return traj;
}

Trajectory local_ucb_baseline(ExperimentConfig cfg) {
  cfg.baseline = BaselineMode::local_ucb;
  return run_experiment(cfg);
}

EventAReport event_a_diagnostics(const std::vector<RoundRecord>& history,
                                 const ExperimentConfig& cfg) {
  if (history.empty())
    throw std::invalid_argument("event_a_diagnostics: missing history (need full diagnostics)");
  const int m_count = cfg.client_count;
  DiagTracker diag;
  diag.init(cfg);
  // Replay counts from the recorded actions; agents are stand-ins holding
  // only the pull counters the A2 bound needs.
  std::vector<AgentState> counters;
  for (int m = 0; m < m_count; ++m)
    counters.push_back(make_agent(m, m_count, cfg.arm_count));
  std::int64_t expect_t = 1;
  for (const RoundRecord& rec : history) {
    if (rec.t != expect_t)
      throw std::invalid_argument(
          "event_a_diagnostics: missing history (rounds must be contiguous from t=1)");
    if (static_cast<int>(rec.actions.size()) != m_count)
      throw std::invalid_argument("event_a_diagnostics: actions row length != M");
    for (int m = 0; m < m_count; ++m)
      counters[static_cast<std::size_t>(m)]
          .n[static_cast<std::size_t>(rec.actions[static_cast<std::size_t>(m)])] += 1;
    diag.absorb_round(rec.t, rec.graph, is_connected(rec.graph), counters);
    ++expect_t;
  }
  return diag.report;
}

double burn_in_length_bound(BoundSetting setting, std::int64_t T, int K, double delta,
                            double epsilon, double c0, double lambda, double p_star,
                            int M) {
  if (T < 1) throw std::domain_error("burn_in_length_bound: T must be >= 1");
  if (K < 1) throw std::domain_error("burn_in_length_bound: K must be >= 1");
  if (!(delta > 0.0) || !(delta < 1.0) || !(epsilon > 0.0) || !(epsilon < 1.0) ||
      !(c0 > 0.0) || !(c0 < 1.0))
    throw std::domain_error("burn_in_length_bound: delta, epsilon, c0 must lie in (0, 1)");
  const double t_real = static_cast<double>(T);
  const double freq_term = std::log(t_real / (2.0 * epsilon)) / (2.0 * delta * delta);
  const double count_term = 4.0 * K * std::log2(t_real) / c0;
  if (setting == BoundSetting::s1) return std::max(freq_term, count_term);

  if (!(lambda > 0.0) || !(lambda < 1.0) || !(p_star > 0.0) || !(p_star < 1.0))
    throw std::domain_error("burn_in_length_bound: lambda and p_star must lie in (0, 1)");
  const double mixing_term =
      std::log(delta / 10.0) / std::log(p_star) +
      25.0 * (1.0 + lambda) / (1.0 - lambda) * freq_term;
  if (setting == BoundSetting::s2) return std::max(mixing_term, count_term);

  if (M < 2) throw std::domain_error("burn_in_length_bound: s3 needs M >= 2");
  const double q = 1.0 - 2.0 * std::log(static_cast<double>(M)) / (M - 1.0);
  if (!(q > 0.0))
    throw std::domain_error(
        "burn_in_length_bound: s3 undefined, 2ln(M)/(M-1) >= 1 at this M");
  const double contact_term =
      K * std::log(static_cast<double>(M) * t_real / epsilon) /
      (c0 * std::log(1.0 / q));
  return std::max(mixing_term, contact_term);
}

}  // namespace drfed
