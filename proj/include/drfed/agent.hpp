#pragma once

// Per-client state and update rules for the decentralized UCB algorithm with
// delayed, randomly-arriving neighbor information. Agents track local counts
// and means, a network-level estimator fed by cached peer snapshots, and a
// running frequency estimate of who they have seen.
//
// Round/clock convention: simulation rounds are 1-based (t = 1, 2, ...);
// AgentState::clock counts completed rounds, so at the start of round t the
// clock reads t - 1 and update_round must be called with exactly t.

#include <cstdint>
#include <string>
#include <vector>

#include "drfed/rewards.hpp"
#include "drfed/rng.hpp"

namespace drfed {

enum class Phase { burn_in, learning };

/// What peers broadcast. During burn-in only `bar` is meaningful (local
/// counts/means exchange); learning messages snapshot the full state as it
/// stood *before* the sender's own update this round.
struct Message {
  int sender = -1;
  std::int64_t t = 0;  // round the snapshot was taken in
  std::vector<std::int64_t> n;       // sender's local pull counts
  std::vector<std::int64_t> big_n;   // sender's network-level counts
  std::vector<double> bar;           // sender's local means
  std::vector<double> tilde;         // sender's network estimator
};

/// Latest snapshot received from one peer, with separate receipt clocks for
/// the burn-in payload (bar) and the learning payload (big_n / tilde); a
/// clock of 0 means "never received", and the zeroed values then stand in —
/// which the diagnostics flag when they are actually consumed.
struct PeerCache {
  std::int64_t t_bar = 0;
  std::int64_t t_full = 0;
  std::vector<std::int64_t> n;
  std::vector<std::int64_t> big_n;
  std::vector<double> bar;
  std::vector<double> tilde;
};

enum class FallbackMode { lagging, all_arms };
enum class NeighborTerm { bar, tilde };

/// Constants for the exploration bonus.
struct BonusConfig {
  Regime regime = Regime::sub_gaussian;
  double c1 = 0.2;          // scales the sqrt term
  double c2 = 0.3;          // scales the linear sub-exponential correction
  double horizon = 0.0;     // T, used by the sub-exponential bonus
};

struct AgentState {
  int id = 0;
  int client_count = 0;  // M
  int arm_count = 0;     // K
  Phase phase = Phase::burn_in;
  std::int64_t clock = 0;  // completed rounds

  std::vector<std::int64_t> n;      // local pull counts per arm
  std::vector<std::int64_t> big_n;  // network-level counts per arm
  std::vector<double> bar;          // local running means per arm
  std::vector<double> tilde;        // network estimator per arm

  std::vector<double> p_row;              // running contact frequencies, self = 1
  std::vector<std::int64_t> last_contact; // latest round each peer was a neighbor
  std::vector<PeerCache> cache;

  // Diagnostics refreshed by update_round.
  double weight_residual = 0.0;      // |sum of mixing weights - 1|
  bool consumed_zero_cache = false;  // this round used a never-received snapshot
};

AgentState make_agent(int id, int client_count, int arm_count);

/// Burn-in action: deterministic round-robin over arms; t is the number of
/// completed rounds (i.e. the agent's clock), so round 1 plays arm 0.
int burn_in_act(const AgentState& state, std::int64_t t);

/// Records one pulled arm + reward into the local count and running mean.
void observe(AgentState& state, int arm, double reward);

/// Ingests this round's neighbor set and their messages: updates the contact
/// frequency row as ((t-1) * p + seen) / t, stamps last_contact, and
/// overwrites the per-peer cache with each message's payload. Works for both
/// phases; during burn-in only the bar payload is cached. Throws
/// std::invalid_argument if a message's sender is not in neighbor_ids.
void record_neighbors(AgentState& state, const std::vector<int>& neighbor_ids,
                      std::int64_t t, const std::vector<Message>& messages);

/// Closes the burn-in at round L: seeds the network estimator from the last
/// cached local means of every contacted peer plus the agent's own (equal
/// weights 1/M over peers with positive contact frequency), sets the
/// network-level counts to the local counts, and flips the phase. Requires
/// clock == L and phase == burn_in.
void finalize_burn_in(AgentState& state, std::int64_t burn_in_rounds);

/// Exploration bonus F(n, t): sqrt(c1 * ln(t) / n) in the sub-Gaussian
/// regime; sqrt(c1 * ln(T) / n) + c2 * ln(T) / n in the sub-exponential one
/// (which uses the horizon instead of the current round). Requires n >= 1.
double ucb_bonus(const BonusConfig& cfg, std::int64_t n, double t);

/// UCB action with forced-exploration fallback: if every arm's local count
/// is within K of its network-level count, play argmax of tilde + bonus
/// (ties to the lowest index); otherwise draw uniformly from the lagging set
/// (fallback = lagging) or from all arms (fallback = all_arms). The rng is
/// consumed only on the fallback path.
int select_arm(const AgentState& state, const BonusConfig& bonus, FallbackMode fallback,
               RngStream& rng);

/// One learning-phase update at round t (= clock + 1): observe the pull,
/// ingest neighbors, refresh the network-level counts from this round's
/// messages, then recompute the network estimator with the frequency-derived
/// mixing weights — peers with positive contact frequency contribute their
/// cached estimator with weight (M-1)/M^2, and every client's local-mean
/// term enters with the residual weight d = (1 - sum of those) / M, fresh
/// for this round's neighbors (using bar or tilde per neighbor_term) and
/// stale (last cached) for the rest. Throws std::logic_error on clock
/// mismatch or wrong phase.
void update_round(AgentState& state, std::int64_t t, int my_arm, double my_reward,
                  const std::vector<int>& neighbor_ids, const std::vector<Message>& messages,
                  NeighborTerm neighbor_term = NeighborTerm::bar);

/// Learning-phase broadcast: snapshot of (n, N, bar, tilde) as they stand
/// now, i.e. before this round's update_round. Requires phase == learning.
Message make_message(const AgentState& state);

/// Burn-in broadcast: local means only (Alg-style counts/means exchange).
Message make_burn_in_message(const AgentState& state);

/// Fixed-field-order JSON snapshot of an agent (17-significant-digit floats)
/// and its exact inverse; serialize(deserialize(s)) == s.
std::string agent_to_json(const AgentState& state);
AgentState agent_from_json(const std::string& text);

}  // namespace drfed
