#include "drfed/agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "json.hpp"

namespace drfed {

namespace {

void check_payload_size(const Message& msg, int arm_count) {
  if (static_cast<int>(msg.n.size()) != arm_count ||
      static_cast<int>(msg.big_n.size()) != arm_count ||
      static_cast<int>(msg.bar.size()) != arm_count ||
      static_cast<int>(msg.tilde.size()) != arm_count)
    throw std::invalid_argument("record_neighbors: message payload dimension mismatch");
}

}  // namespace

AgentState make_agent(int id, int client_count, int arm_count) {
  if (client_count < 1 || arm_count < 1 || id < 0 || id >= client_count)
    throw std::invalid_argument("make_agent: need 0 <= id < M and K >= 1");
  AgentState st;
  st.id = id;
  st.client_count = client_count;
  st.arm_count = arm_count;
  st.n.assign(arm_count, 0);
  st.big_n.assign(arm_count, 0);
  st.bar.assign(arm_count, 0.0);
  st.tilde.assign(arm_count, 0.0);
  st.p_row.assign(client_count, 0.0);
  st.p_row[static_cast<std::size_t>(id)] = 1.0;  // an agent always sees itself
  st.last_contact.assign(client_count, 0);
  st.cache.resize(client_count);
  for (auto& c : st.cache) {
    c.n.assign(arm_count, 0);
    c.big_n.assign(arm_count, 0);
    c.bar.assign(arm_count, 0.0);
    c.tilde.assign(arm_count, 0.0);
  }
  return st;
}

int burn_in_act(const AgentState& state, std::int64_t t) {
  if (state.phase != Phase::burn_in)
    throw std::logic_error("burn_in_act: agent is past the burn-in phase");
  if (t < 0) throw std::invalid_argument("burn_in_act: t must be >= 0");
  return static_cast<int>(t % state.arm_count);
}

void observe(AgentState& state, int arm, double reward) {
  if (arm < 0 || arm >= state.arm_count)
    throw std::invalid_argument("observe: arm out of range");
  if (!(reward >= 0.0) || !(reward <= 1.0))
    throw std::invalid_argument("observe: reward outside [0, 1]");
  auto& n = state.n[static_cast<std::size_t>(arm)];
  auto& bar = state.bar[static_cast<std::size_t>(arm)];
  n += 1;
  bar += (reward - bar) / static_cast<double>(n);
}

void record_neighbors(AgentState& state, const std::vector<int>& neighbor_ids,
                      std::int64_t t, const std::vector<Message>& messages) {
  if (t != state.clock + 1)
    throw std::logic_error("record_neighbors: inconsistent clock (round " +
                           std::to_string(t) + " after " + std::to_string(state.clock) +
                           " completed)");
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(state.client_count), 0);
  seen[static_cast<std::size_t>(state.id)] = 1;
  for (const int j : neighbor_ids) {
    if (j < 0 || j >= state.client_count || j == state.id)
      throw std::invalid_argument("record_neighbors: neighbor id out of range");
    seen[static_cast<std::size_t>(j)] = 1;
    state.last_contact[static_cast<std::size_t>(j)] = t;
  }
  for (int j = 0; j < state.client_count; ++j) {
    auto& p = state.p_row[static_cast<std::size_t>(j)];
    p = ((static_cast<double>(t) - 1.0) * p + (seen[static_cast<std::size_t>(j)] ? 1.0 : 0.0)) /
        static_cast<double>(t);
  }
  for (const Message& msg : messages) {
    if (msg.sender < 0 || msg.sender >= state.client_count || msg.sender == state.id ||
        !seen[static_cast<std::size_t>(msg.sender)])
      throw std::invalid_argument("record_neighbors: sender " +
                                  std::to_string(msg.sender) +
                                  " is not in neighbor_ids");
    check_payload_size(msg, state.arm_count);
    PeerCache& c = state.cache[static_cast<std::size_t>(msg.sender)];
    c.n = msg.n;
    c.bar = msg.bar;
    c.t_bar = t;
    if (state.phase == Phase::learning) {
      c.big_n = msg.big_n;
      c.tilde = msg.tilde;
      c.t_full = t;
    }
  }
  state.clock = t;
}

void finalize_burn_in(AgentState& state, std::int64_t burn_in_rounds) {
  if (state.phase != Phase::burn_in)
    throw std::logic_error("finalize_burn_in: agent is not in burn-in");
  if (state.clock != burn_in_rounds)
    throw std::logic_error("finalize_burn_in: clock " + std::to_string(state.clock) +
                           " does not equal the burn-in length " +
                           std::to_string(burn_in_rounds));
  const double w = 1.0 / static_cast<double>(state.client_count);
  for (int i = 0; i < state.arm_count; ++i) {
    double acc = 0.0;
    for (int j = 0; j < state.client_count; ++j) {
      if (state.p_row[static_cast<std::size_t>(j)] <= 0.0) continue;
      const double bar_j = (j == state.id)
                               ? state.bar[static_cast<std::size_t>(i)]
                               : state.cache[static_cast<std::size_t>(j)]
                                     .bar[static_cast<std::size_t>(i)];
      acc += w * bar_j;
    }
    state.tilde[static_cast<std::size_t>(i)] = acc;
  }
  state.big_n = state.n;
  state.phase = Phase::learning;
}

double ucb_bonus(const BonusConfig& cfg, std::int64_t n, double t) {
  if (n < 1) throw std::domain_error("ucb_bonus: n must be >= 1");
  if (cfg.regime == Regime::sub_gaussian) {
    if (!(t >= 1.0)) throw std::domain_error("ucb_bonus: t must be >= 1");
    return std::sqrt(cfg.c1 * std::log(t) / static_cast<double>(n));
  }
  if (cfg.horizon < 1)
    throw std::domain_error("ucb_bonus: sub-exponential bonus needs horizon >= 1");
  const double log_T = std::log(static_cast<double>(cfg.horizon));
  return std::sqrt(cfg.c1 * log_T / static_cast<double>(n)) +
         cfg.c2 * log_T / static_cast<double>(n);
}

int select_arm(const AgentState& state, const BonusConfig& bonus, FallbackMode fallback,
               RngStream& rng) {
  if (state.phase != Phase::learning)
    throw std::logic_error("select_arm: agent is still in burn-in");
  std::vector<int> lagging;
  for (int i = 0; i < state.arm_count; ++i)
    if (state.n[static_cast<std::size_t>(i)] <=
        state.big_n[static_cast<std::size_t>(i)] - state.arm_count)
      lagging.push_back(i);
  if (lagging.empty()) {
    const double t = static_cast<double>(state.clock + 1);
    int best = 0;
    double best_value = -1.0;
    for (int i = 0; i < state.arm_count; ++i) {
      const double value =
          state.tilde[static_cast<std::size_t>(i)] +
          ucb_bonus(bonus, state.n[static_cast<std::size_t>(i)], t);
      if (value > best_value) {  // strict: ties resolve to the lowest index
        best_value = value;
        best = i;
      }
    }
    return best;
  }
  if (fallback == FallbackMode::lagging)
    return lagging[rng.next_below(lagging.size())];
  return static_cast<int>(rng.next_below(static_cast<std::uint64_t>(state.arm_count)));
}

void update_round(AgentState& state, std::int64_t t, int my_arm, double my_reward,
                  const std::vector<int>& neighbor_ids, const std::vector<Message>& messages,
                  NeighborTerm neighbor_term) {
  if (state.phase != Phase::learning)
    throw std::logic_error("update_round: agent is still in burn-in");
  if (t != state.clock + 1)
    throw std::logic_error("update_round: inconsistent clock (round " + std::to_string(t) +
                           " after " + std::to_string(state.clock) + " completed)");
  observe(state, my_arm, my_reward);
  record_neighbors(state, neighbor_ids, t, messages);

  // Network-level counts: own counts joined with this round's received ones.
  state.big_n = state.n;
  for (const Message& msg : messages)
    for (int i = 0; i < state.arm_count; ++i)
      state.big_n[static_cast<std::size_t>(i)] =
          std::max(state.big_n[static_cast<std::size_t>(i)],
                   msg.big_n[static_cast<std::size_t>(i)]);

  const int m_count = state.client_count;
  const double peer_w =
      static_cast<double>(m_count - 1) / (static_cast<double>(m_count) * m_count);
  std::vector<std::uint8_t> is_nbr(static_cast<std::size_t>(m_count), 0);
  for (const int j : neighbor_ids) is_nbr[static_cast<std::size_t>(j)] = 1;

  double sum_pw = 0.0;
  std::vector<std::uint8_t> has_pw(static_cast<std::size_t>(m_count), 0);
  for (int j = 0; j < m_count; ++j)
    if (state.p_row[static_cast<std::size_t>(j)] > 0.0) {
      has_pw[static_cast<std::size_t>(j)] = 1;
      sum_pw += peer_w;
    }
  const double d = (1.0 - sum_pw) / static_cast<double>(m_count);
  state.weight_residual = std::abs(sum_pw + d * m_count - 1.0);

  bool consumed_zero = false;
  std::vector<double> next_tilde(static_cast<std::size_t>(state.arm_count), 0.0);
  for (int i = 0; i < state.arm_count; ++i) {
    double acc = 0.0;
    for (int j = 0; j < m_count; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const auto iu = static_cast<std::size_t>(i);
      // Estimator mixing term: every client seen at least once contributes
      // its latest cached network estimator (the agent's own current one for
      // j = id, pre-overwrite).
      if (has_pw[ju]) {
        const double tilde_j =
            (j == state.id) ? state.tilde[iu] : state.cache[ju].tilde[iu];
        acc += peer_w * tilde_j;
        if (j != state.id && state.cache[ju].t_full == 0) consumed_zero = true;
      }
      // Local-mean term with the residual weight: fresh for this round's
      // neighbors, latest cached (possibly initial zero) for everyone else.
      double local_j;
      if (j == state.id) {
        local_j = state.bar[iu];
      } else if (is_nbr[ju]) {
        local_j = (neighbor_term == NeighborTerm::bar) ? state.cache[ju].bar[iu]
                                                       : state.cache[ju].tilde[iu];
      } else {
        local_j = state.cache[ju].bar[iu];
        if (state.cache[ju].t_bar == 0) consumed_zero = true;
      }
      acc += d * local_j;
    }
    next_tilde[static_cast<std::size_t>(i)] = acc;
  }
  state.tilde = std::move(next_tilde);
  state.consumed_zero_cache = consumed_zero;
}

Message make_message(const AgentState& state) {
  if (state.phase != Phase::learning)
    throw std::logic_error("make_message: agent is still in burn-in");
  Message msg;
  msg.sender = state.id;
  msg.t = state.clock + 1;
  msg.n = state.n;
  msg.big_n = state.big_n;
  msg.bar = state.bar;
  msg.tilde = state.tilde;
  return msg;
}

Message make_burn_in_message(const AgentState& state) {
  if (state.phase != Phase::burn_in)
    throw std::logic_error("make_burn_in_message: agent is past the burn-in phase");
  Message msg;
  msg.sender = state.id;
  msg.t = state.clock + 1;
  msg.n = state.n;
  msg.big_n.assign(static_cast<std::size_t>(state.arm_count), 0);
  msg.bar = state.bar;
  msg.tilde.assign(static_cast<std::size_t>(state.arm_count), 0.0);
  return msg;
}

std::string agent_to_json(const AgentState& state) {
  nlohmann::ordered_json j;
  j["id"] = state.id;
  j["client_count"] = state.client_count;
  j["arm_count"] = state.arm_count;
  j["phase"] = state.phase == Phase::burn_in ? "burn_in" : "learning";
  j["clock"] = state.clock;
  j["n"] = state.n;
  j["big_n"] = state.big_n;
  j["bar"] = state.bar;
  j["tilde"] = state.tilde;
  j["p_row"] = state.p_row;
  j["last_contact"] = state.last_contact;
  j["weight_residual"] = state.weight_residual;
  j["consumed_zero_cache"] = state.consumed_zero_cache;
  nlohmann::ordered_json cache = nlohmann::ordered_json::array();
  for (const PeerCache& c : state.cache) {
    nlohmann::ordered_json e;
    e["t_bar"] = c.t_bar;
    e["t_full"] = c.t_full;
    e["n"] = c.n;
    e["big_n"] = c.big_n;
    e["bar"] = c.bar;
    e["tilde"] = c.tilde;
    cache.push_back(std::move(e));
  }
  j["cache"] = std::move(cache);
  return j.dump();
}

AgentState agent_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("agent_from_json: malformed JSON: ") + e.what());
  }
  try {
    AgentState st = make_agent(j.at("id").get<int>(), j.at("client_count").get<int>(),
                               j.at("arm_count").get<int>());
    st.phase = j.at("phase").get<std::string>() == "burn_in" ? Phase::burn_in
                                                             : Phase::learning;
    st.clock = j.at("clock").get<std::int64_t>();
    st.n = j.at("n").get<std::vector<std::int64_t>>();
    st.big_n = j.at("big_n").get<std::vector<std::int64_t>>();
    st.bar = j.at("bar").get<std::vector<double>>();
    st.tilde = j.at("tilde").get<std::vector<double>>();
    st.p_row = j.at("p_row").get<std::vector<double>>();
    st.last_contact = j.at("last_contact").get<std::vector<std::int64_t>>();
    st.weight_residual = j.at("weight_residual").get<double>();
    st.consumed_zero_cache = j.at("consumed_zero_cache").get<bool>();
    const auto& cache = j.at("cache");
    if (cache.size() != st.cache.size())
      throw std::invalid_argument("agent_from_json: cache size mismatch");
    for (std::size_t k = 0; k < st.cache.size(); ++k) {
      const auto& e = cache[k];
      PeerCache& c = st.cache[k];
      c.t_bar = e.at("t_bar").get<std::int64_t>();
      c.t_full = e.at("t_full").get<std::int64_t>();
      c.n = e.at("n").get<std::vector<std::int64_t>>();
      c.big_n = e.at("big_n").get<std::vector<std::int64_t>>();
      c.bar = e.at("bar").get<std::vector<double>>();
      c.tilde = e.at("tilde").get<std::vector<double>>();
    }
    if (static_cast<int>(st.n.size()) != st.arm_count ||
        static_cast<int>(st.bar.size()) != st.arm_count ||
        static_cast<int>(st.p_row.size()) != st.client_count)
      throw std::invalid_argument("agent_from_json: field dimension mismatch");
    return st;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("agent_from_json: missing or mistyped field: ") +
                                e.what());
  }
}

}  // namespace drfed
