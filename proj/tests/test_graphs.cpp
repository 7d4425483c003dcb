#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "doctest.h"
#include "drfed/graphs.hpp"
#include "drfed/rng.hpp"

using drfed::ChainState;
using drfed::Graph;
using drfed::RngStream;

// ---------------------------------------------------------------------------
// Exact enumeration oracles (counts computed independently by hand):
// connected labelled graphs on M nodes number 1, 1, 4, 38, 728 for M = 1..5.
// ---------------------------------------------------------------------------

TEST_CASE("connected graph counts match the known sequence") {
  CHECK(drfed::enumerate_connected(1).size() == 1);
  CHECK(drfed::enumerate_connected(2).size() == 1);
  CHECK(drfed::enumerate_connected(3).size() == 4);
  CHECK(drfed::enumerate_connected(4).size() == 38);
  CHECK(drfed::enumerate_connected(5).size() == 728);
  CHECK_THROWS_AS((void)drfed::enumerate_connected(6), std::length_error);
}

TEST_CASE("enumeration is in ascending edge-bitmask order") {
  const auto graphs = drfed::enumerate_connected(3);
  // Pairs in lexicographic order: (0,1), (0,2), (1,2). The first connected
  // mask is 0b011 = edges (0,1) and (0,2); the last is the triangle.
  CHECK(graphs.front().edge(0, 1));
  CHECK(graphs.front().edge(0, 2));
  CHECK_FALSE(graphs.front().edge(1, 2));
  CHECK(graphs.back().edge_count() == 3);
}

TEST_CASE("edge presence probability, exact enumeration") {
  // Hand counts: M=2 -> 1/1; M=3 -> 3/4; M=4 -> 24/38 = 12/19.
  CHECK(drfed::edge_presence_fraction(2) == std::pair<long long, long long>{1, 1});
  CHECK(drfed::edge_presence_fraction(3) == std::pair<long long, long long>{3, 4});
  const auto f4 = drfed::edge_presence_fraction(4);
  CHECK(f4.first * 19 == f4.second * 12);
  CHECK(drfed::edge_presence_probability(3, drfed::EdgeProbMode::enumeration) ==
        doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("edge presence probability, closed-form surrogate") {
  // 2 ln(M)/(M-1), clipped to [0,1]: M=2 gives 1.386.. -> 1; M=5 gives 0.8047.
  CHECK(drfed::edge_presence_probability(2, drfed::EdgeProbMode::formula) == 1.0);
  CHECK(drfed::edge_presence_probability(5, drfed::EdgeProbMode::formula) ==
        doctest::Approx(2.0 * std::log(5.0) / 4.0).epsilon(1e-12));
  CHECK(drfed::edge_presence_probability(3, drfed::EdgeProbMode::formula) == 1.0);
  CHECK(drfed::edge_presence_probability(11, drfed::EdgeProbMode::formula) ==
        doctest::Approx(2.0 * std::log(11.0) / 10.0).epsilon(1e-12));
}

TEST_CASE("transition matrix for M=3 matches the hand-derived chain") {
  const auto p = drfed::transition_matrix(3);
  REQUIRE(p.size() == 4);
  // States in mask order: three 2-edge paths, then the triangle (index 3).
  for (int a = 0; a < 3; ++a) {
    CHECK(p[a][a] == doctest::Approx(2.0 / 3.0));
    CHECK(p[a][3] == doctest::Approx(1.0 / 3.0));
    for (int b = 0; b < 3; ++b)
      if (b != a) CHECK(p[a][b] == 0.0);
  }
  CHECK(p[3][3] == 0.0);
  for (int b = 0; b < 3; ++b) CHECK(p[3][b] == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("uniform distribution is stationary for the exact chain") {
  for (int m = 2; m <= 4; ++m) {
    const auto p = drfed::transition_matrix(m);
    const std::size_t n = p.size();
    const double u = 1.0 / static_cast<double>(n);
    for (std::size_t b = 0; b < n; ++b) {
      double acc = 0.0;
      double row_sum = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        acc += u * p[a][b];
        row_sum += p[b][a];
      }
      CHECK(acc == doctest::Approx(u).epsilon(1e-12));
      CHECK(row_sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("tv_distance basics") {
  CHECK(drfed::tv_distance({0.5, 0.5}, {1.0, 0.0}) == doctest::Approx(0.5));
  CHECK(drfed::tv_distance({0.25, 0.75}, {0.25, 0.75}) == 0.0);
  CHECK_THROWS_AS((void)drfed::tv_distance({1.0}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS((void)drfed::tv_distance({0.7, 0.7}, {0.5, 0.5}), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Erdős–Rényi generator
// ---------------------------------------------------------------------------

TEST_CASE("generate_er is bit-identical for the same stream state") {
  RngStream a(123u), b(123u);
  for (int rep = 0; rep < 20; ++rep) {
    const Graph ga = drfed::generate_er(6, 0.37, a);
    const Graph gb = drfed::generate_er(6, 0.37, b);
    CHECK(ga == gb);
  }
}

TEST_CASE("generate_er edge frequencies match the edge probability") {
  RngStream r(2718u);
  const int reps = 20000;
  const double c = 0.3;
  std::vector<int> hits(10, 0);  // 5 choose 2 pairs
  for (int rep = 0; rep < reps; ++rep) {
    const Graph g = drfed::generate_er(5, c, r);
    int b = 0;
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j, ++b)
        if (g.edge(i, j)) ++hits[b];
  }
  for (const int h : hits)
    CHECK(std::abs(static_cast<double>(h) / reps - c) < 0.015);  // ~4.6 sigma
}

TEST_CASE("generate_er degenerate probabilities") {
  RngStream r(5u);
  const Graph full = drfed::generate_er(4, 1.0, r);
  CHECK(full.edge_count() == 6);
  const Graph empty = drfed::generate_er(4, 0.0, r);
  CHECK(empty.edge_count() == 0);
  CHECK_THROWS_AS((void)drfed::generate_er(4, 1.5, r), std::invalid_argument);
}

// ---------------------------------------------------------------------------
// Connectivity helpers
// ---------------------------------------------------------------------------

TEST_CASE("is_connected on hand-built graphs") {
  Graph g(4);
  CHECK_FALSE(drfed::is_connected(g));
  g.set_edge(0, 1, true);
  g.set_edge(2, 3, true);
  CHECK_FALSE(drfed::is_connected(g));
  g.set_edge(1, 2, true);
  CHECK(drfed::is_connected(g));
  CHECK(drfed::is_connected(Graph(1)));
}

TEST_CASE("connect_minimally adds exactly components-1 edges") {
  RngStream r(9u);
  Graph g(6);  // six singletons
  const Graph joined = drfed::connect_minimally(g, r);
  CHECK(drfed::is_connected(joined));
  CHECK(joined.edge_count() == 5);

  Graph two(5);
  two.set_edge(0, 1, true);
  two.set_edge(1, 2, true);
  two.set_edge(3, 4, true);
  const Graph j2 = drfed::connect_minimally(two, r);
  CHECK(drfed::is_connected(j2));
  CHECK(j2.edge_count() == 4);

  // Connected input comes back unchanged (and consumes no draws).
  RngStream before(31u), after(31u);
  const Graph tri = drfed::generate_er(3, 1.0, before);
  Graph tri_cmp = tri;
  CHECK(drfed::connect_minimally(tri, before) == tri_cmp);
  (void)drfed::generate_er(3, 1.0, after);
  CHECK(before.next_u64() == after.next_u64());
}

// ---------------------------------------------------------------------------
// Metropolis–Hastings chain over connected graphs
// ---------------------------------------------------------------------------

TEST_CASE("mh_step preserves connectivity and counts steps") {
  ChainState st = drfed::sample_uniform_connected(4, 0, RngStream(77u));
  CHECK(st.steps_taken == 0);
  CHECK(drfed::is_connected(st.current));
  for (int s = 0; s < 2000; ++s) {
    drfed::mh_step(st);
    REQUIRE(drfed::is_connected(st.current));
  }
  CHECK(st.steps_taken == 2000);
}

TEST_CASE("sample_uniform_connected is deterministic in the seed") {
  ChainState a = drfed::sample_uniform_connected(5, 500, RngStream(4242u));
  ChainState b = drfed::sample_uniform_connected(5, 500, RngStream(4242u));
  CHECK(a.current == b.current);
  CHECK(a.steps_taken == 500);
}

TEST_CASE("long-run chain distribution is near uniform on M=3") {
  const auto states = drfed::enumerate_connected(3);
  ChainState st = drfed::sample_uniform_connected(3, 1000, RngStream(1313u));
  std::vector<double> counts(states.size(), 0.0);
  const int samples = 40000;
  for (int s = 0; s < samples; ++s) {
    drfed::mh_step(st);
    const auto it = std::find(states.begin(), states.end(), st.current);
    REQUIRE(it != states.end());
    counts[static_cast<std::size_t>(it - states.begin())] += 1.0;
  }
  for (auto& c : counts) c /= samples;
  std::vector<double> uniform(states.size(), 1.0 / states.size());
  // Correlated samples, so the tolerance is loose; the CLI mixing command
  // reports the same statistic at scale.
  CHECK(drfed::tv_distance(counts, uniform) < 0.03);
}

// ---------------------------------------------------------------------------
// Text round-trip
// ---------------------------------------------------------------------------

TEST_CASE("graph text form round-trips and is canonical") {
  Graph g(4);
  g.set_edge(2, 3, true);
  g.set_edge(0, 3, true);
  g.set_edge(0, 1, true);
  const std::string text = drfed::graph_to_text(g);
  CHECK(text == "4\n0 1\n0 3\n2 3\n");
  CHECK(drfed::graph_from_text(text) == g);
  CHECK_THROWS_AS((void)drfed::graph_from_text("4\n0 9\n"), std::invalid_argument);
}
