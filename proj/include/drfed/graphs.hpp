#pragma once

// Time-varying communication graphs: Erdős–Rényi snapshots, exact enumeration
// of connected graphs for small M, and a Metropolis–Hastings chain whose
// stationary distribution is uniform over connected graphs.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "drfed/rng.hpp"

namespace drfed {

/// Simple undirected graph on nodes 0..node_count-1, dense adjacency.
struct Graph {
  int node_count = 0;
  std::vector<std::uint8_t> adj;  // row-major node_count x node_count, 0/1

  Graph() = default;
  explicit Graph(int m) : node_count(m), adj(static_cast<std::size_t>(m) * m, 0) {}

  bool edge(int i, int j) const {
    return adj[static_cast<std::size_t>(i) * node_count + j] != 0;
  }
  void set_edge(int i, int j, bool present) {
    adj[static_cast<std::size_t>(i) * node_count + j] = present ? 1 : 0;
    adj[static_cast<std::size_t>(j) * node_count + i] = present ? 1 : 0;
  }
  int edge_count() const;
  std::vector<int> neighbors(int m) const;

  bool operator==(const Graph& other) const {
    return node_count == other.node_count && adj == other.adj;
  }
};

/// Lexicographic list of the M(M-1)/2 unordered pairs (i, j), i < j.
std::vector<std::pair<int, int>> pair_list(int node_count);

/// Erdős–Rényi G(M, c): one uniform draw per pair, in lexicographic pair
/// order, so the output is a pure function of (M, c, stream state).
Graph generate_er(int node_count, double edge_probability, RngStream& rng);

/// DFS connectivity. A graph on one node is connected; on zero nodes, false.
bool is_connected(const Graph& g);

/// Joins the connected components by adding components-1 edges: each
/// subsequent component (in ascending min-node order) is attached by an edge
/// between a uniformly chosen node of the already-connected part and a
/// uniformly chosen node of the component. No-op on connected input.
Graph connect_minimally(const Graph& g, RngStream& rng);

/// State of the uniform-over-connected-graphs Metropolis–Hastings chain.
struct ChainState {
  Graph current;
  std::int64_t steps_taken = 0;
  RngStream rng_stream;
};

/// One MH step: pick one of the M(M-1)/2 pairs uniformly; if the edge is
/// absent, add it (always accepted); if present, remove it only when the
/// graph stays connected, otherwise stay put. Every step consumes the same
/// number of draws regardless of outcome.
void mh_step(ChainState& state);

/// Starts the chain from a connected seed graph (E-R at c = 1/2, minimally
/// connected) and advances it warmup_steps times.
ChainState sample_uniform_connected(int node_count, std::int64_t warmup_steps,
                                    RngStream rng);

/// All connected labelled graphs on node_count <= 5 nodes, in ascending
/// edge-bitmask order (bit b of the mask is pair b of pair_list). Throws
/// std::length_error beyond the size limit.
std::vector<Graph> enumerate_connected(int node_count);

/// Exact probability that a fixed pair is joined in a uniformly random
/// connected graph, as a fraction (favourable count, total count). node_count <= 5.
std::pair<long long, long long> edge_presence_fraction(int node_count);

enum class EdgeProbMode {
  formula,      // 2 ln(M) / (M - 1), clipped to [0, 1]
  enumeration,  // exact, via enumerate_connected (M <= 5)
};

/// Per-pair edge probability used to match the E-R model to the uniform
/// connected model. The formula mode is the closed-form surrogate; the
/// enumeration mode is exact for small M.
double edge_presence_probability(int node_count, EdgeProbMode mode);

/// Exact MH transition matrix over enumerate_connected(node_count) order,
/// node_count <= 4. Rows sum to 1; off-diagonal entries are 2/(M(M-1)) for
/// pairs of connected graphs differing in exactly one edge.
std::vector<std::vector<double>> transition_matrix(int node_count);

/// Total variation distance 0.5 * sum |p - q|. Throws std::invalid_argument
/// on length mismatch or if either vector fails to sum to 1 within 1e-9.
double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

/// Text form: first line node_count, then one "i j" line per edge with
/// i < j, lexicographically sorted. Round-trips through graph_from_text.
std::string graph_to_text(const Graph& g);
Graph graph_from_text(const std::string& text);

}  // namespace drfed
