#include "drfed/graphs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <string>

namespace drfed {

int Graph::edge_count() const {
  int count = 0;
  for (int i = 0; i < node_count; ++i)
    for (int j = i + 1; j < node_count; ++j)
      if (edge(i, j)) ++count;
  return count;
}

std::vector<int> Graph::neighbors(int m) const {
  std::vector<int> out;
  for (int j = 0; j < node_count; ++j)
    if (j != m && edge(m, j)) out.push_back(j);
  return out;
}

std::vector<std::pair<int, int>> pair_list(int node_count) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<std::size_t>(node_count) * (node_count - 1) / 2);
  for (int i = 0; i < node_count; ++i)
    for (int j = i + 1; j < node_count; ++j) pairs.emplace_back(i, j);
  return pairs;
}

Graph generate_er(int node_count, double edge_probability, RngStream& rng) {
  if (node_count < 1) throw std::invalid_argument("generate_er: node_count must be >= 1");
  if (!(edge_probability >= 0.0) || !(edge_probability <= 1.0))
    throw std::invalid_argument("generate_er: invalid probability (must lie in [0, 1])");
  Graph g(node_count);
  for (int i = 0; i < node_count; ++i)
    for (int j = i + 1; j < node_count; ++j)
      if (rng.next_double() < edge_probability) g.set_edge(i, j, true);
  return g;
}

bool is_connected(const Graph& g) {
  if (g.node_count == 0) return false;
  std::vector<std::uint8_t> seen(g.node_count, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < g.node_count; ++v) {
      if (v != u && g.edge(u, v) && !seen[v]) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
    }
  }
  return reached == g.node_count;
}

namespace {

// Connected components as node lists, ordered by their smallest node.
std::vector<std::vector<int>> components_of(const Graph& g) {
  std::vector<std::vector<int>> comps;
  std::vector<std::uint8_t> seen(g.node_count, 0);
  for (int start = 0; start < g.node_count; ++start) {
    if (seen[start]) continue;
    std::vector<int> comp;
    std::vector<int> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (int v = 0; v < g.node_count; ++v) {
        if (v != u && g.edge(u, v) && !seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    comps.push_back(std::move(comp));
  }
  return comps;
}

}  // namespace

Graph connect_minimally(const Graph& g, RngStream& rng) {
  Graph out = g;
  auto comps = components_of(out);
  if (comps.size() <= 1) return out;
  std::vector<int> joined = comps[0];
  for (std::size_t k = 1; k < comps.size(); ++k) {
    const int a = joined[rng.next_below(joined.size())];
    const auto& comp = comps[k];
    const int b = comp[rng.next_below(comp.size())];
    out.set_edge(a, b, true);
    joined.insert(joined.end(), comp.begin(), comp.end());
  }
  return out;
}

void mh_step(ChainState& state) {
  Graph& g = state.current;
  const int m = g.node_count;
  const std::uint64_t pair_count = static_cast<std::uint64_t>(m) * (m - 1) / 2;
  const std::uint64_t k = state.rng_stream.next_below(pair_count);
  // Unrank the lexicographic pair index.
  int i = 0;
  std::uint64_t offset = k;
  while (offset >= static_cast<std::uint64_t>(m - 1 - i)) {
    offset -= static_cast<std::uint64_t>(m - 1 - i);
    ++i;
  }
  const int j = i + 1 + static_cast<int>(offset);
  if (g.edge(i, j)) {
    // Removal is accepted only when the graph stays connected, which keeps
    // the chain inside the connected family; otherwise the step is a
    // self-transition.
    g.set_edge(i, j, false);
    if (!is_connected(g)) g.set_edge(i, j, true);
  } else {
    g.set_edge(i, j, true);
  }
  ++state.steps_taken;
}

ChainState sample_uniform_connected(int node_count, std::int64_t warmup_steps,
                                    RngStream rng) {
  if (node_count < 2)
    throw std::invalid_argument("sample_uniform_connected: node_count must be >= 2");
  Graph seed = generate_er(node_count, 0.5, rng);
  seed = connect_minimally(seed, rng);
  ChainState state{std::move(seed), 0, rng};
  for (std::int64_t s = 0; s < warmup_steps; ++s) mh_step(state);
  return state;
}

std::vector<Graph> enumerate_connected(int node_count) {
  if (node_count < 1 || node_count > 5)
    throw std::length_error(
        "enumerate_connected: size limit is 1 <= node_count <= 5 (exact enumeration)");
  const auto pairs = pair_list(node_count);
  const int bits = static_cast<int>(pairs.size());
  std::vector<Graph> out;
  for (std::uint64_t mask = 0; mask < (1ull << bits); ++mask) {
    Graph g(node_count);
    for (int b = 0; b < bits; ++b)
      if (mask & (1ull << b)) g.set_edge(pairs[b].first, pairs[b].second, true);
    if (is_connected(g)) out.push_back(std::move(g));
  }
  return out;
}

std::pair<long long, long long> edge_presence_fraction(int node_count) {
  const auto all = enumerate_connected(node_count);
  if (node_count < 2)
    throw std::invalid_argument("edge_presence_fraction: need node_count >= 2");
  long long favourable = 0;
  // By symmetry every pair has the same presence probability; count pair (0, 1).
  for (const auto& g : all)
    if (g.edge(0, 1)) ++favourable;
  return {favourable, static_cast<long long>(all.size())};
}

double edge_presence_probability(int node_count, EdgeProbMode mode) {
  if (node_count < 2)
    throw std::invalid_argument("edge_presence_probability: need node_count >= 2");
  if (mode == EdgeProbMode::enumeration) {
    const auto frac = edge_presence_fraction(node_count);
    return static_cast<double>(frac.first) / static_cast<double>(frac.second);
  }
  const double raw = 2.0 * std::log(static_cast<double>(node_count)) /
                     (static_cast<double>(node_count) - 1.0);
  return std::min(1.0, std::max(0.0, raw));
}

std::vector<std::vector<double>> transition_matrix(int node_count) {
  if (node_count < 2 || node_count > 4)
    throw std::length_error(
        "transition_matrix: size limit is 2 <= node_count <= 4 (exact enumeration)");
  const auto states = enumerate_connected(node_count);
  const auto pairs = pair_list(node_count);
  const double proposal =
      2.0 / (static_cast<double>(node_count) * (node_count - 1));
  const std::size_t n = states.size();
  std::vector<std::vector<double>> p(n, std::vector<double>(n, 0.0));
  for (std::size_t a = 0; a < n; ++a) {
    double off_diag = 0.0;
    for (const auto& [i, j] : pairs) {
      Graph g = states[a];
      g.set_edge(i, j, !g.edge(i, j));
      if (!is_connected(g)) continue;  // rejected removal: self-transition
      const auto it = std::find(states.begin(), states.end(), g);
      const std::size_t b = static_cast<std::size_t>(it - states.begin());
      p[a][b] += proposal;
      off_diag += proposal;
    }
    p[a][a] = 1.0 - off_diag;
  }
  return p;
}

double tv_distance(const std::vector<double>& p, const std::vector<double>& q) {
  if (p.size() != q.size())
    throw std::invalid_argument("tv_distance: dimension mismatch");
  double sum_p = 0.0, sum_q = 0.0, acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    sum_p += p[i];
    sum_q += q[i];
    acc += std::abs(p[i] - q[i]);
  }
  if (std::abs(sum_p - 1.0) > 1e-9 || std::abs(sum_q - 1.0) > 1e-9)
    throw std::invalid_argument("tv_distance: inputs must each sum to 1");
  return 0.5 * acc;
}

std::string graph_to_text(const Graph& g) {
  std::string out = std::to_string(g.node_count);
  out.push_back('\n');
  for (int i = 0; i < g.node_count; ++i)
    for (int j = i + 1; j < g.node_count; ++j)
      if (g.edge(i, j)) {
        out += std::to_string(i);
        out.push_back(' ');
        out += std::to_string(j);
        out.push_back('\n');
      }
  return out;
}

Graph graph_from_text(const std::string& text) {
  std::istringstream in(text);
  int m = 0;
  if (!(in >> m) || m < 1)
    throw std::invalid_argument("graph_from_text: malformed header line");
  Graph g(m);
  int i = 0, j = 0;
  while (in >> i >> j) {
    if (i < 0 || j < 0 || i >= m || j >= m || i == j)
      throw std::invalid_argument("graph_from_text: edge endpoint out of range");
    g.set_edge(i, j, true);
  }
  return g;
}

}  // namespace drfed
