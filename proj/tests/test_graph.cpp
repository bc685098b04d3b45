#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <queue>
#include <set>

#include "surplus/graph.hpp"
#include "surplus/random_stream.hpp"

using namespace surplus;

namespace {

// Four-node test network used throughout: in-neighbor sets
// {4}, {1,3,4}, {1,4}, {2,3}.
const char* kFourNodeDoc =
    "4\n"
    "4 1\n"
    "1 2\n"
    "3 2\n"
    "4 2\n"
    "1 3\n"
    "4 3\n"
    "2 4\n"
    "3 4\n";

std::set<int> in_set(const Digraph& g, int node) {
  std::set<int> out;
  for (int idx : g.in_edges(node)) out.insert(g.edges()[idx].from);
  return out;
}

// Reachability oracle: plain BFS from every node.
bool bfs_strongly_connected(const Digraph& g) {
  const int n = g.node_count();
  for (int start = 0; start < n; ++start) {
    std::vector<bool> seen(n, false);
    std::queue<int> frontier;
    frontier.push(start);
    seen[start] = true;
    int reached = 1;
    while (!frontier.empty()) {
      const int v = frontier.front();
      frontier.pop();
      for (int idx : g.out_edges(v)) {
        const int next = g.edges()[idx].to;
        if (!seen[next]) {
          seen[next] = true;
          ++reached;
          frontier.push(next);
        }
      }
    }
    if (reached != n) return false;
  }
  return true;
}

Digraph random_digraph(int n, double p, RandomStream& stream) {
  std::vector<std::pair<int, int>> arcs;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j && stream.next_bernoulli(p)) arcs.push_back({j, i});
  if (arcs.empty()) arcs.push_back({0, 1});
  return make_digraph(n, arcs);
}

}  // namespace

TEST_CASE("parsing recovers the four-node neighbor structure") {
  const Digraph g = parse_digraph(kFourNodeDoc);
  CHECK(g.node_count() == 4);
  CHECK(g.edge_count() == 8);
  CHECK(in_set(g, 0) == std::set<int>{3});
  CHECK(in_set(g, 1) == std::set<int>{0, 2, 3});
  CHECK(in_set(g, 2) == std::set<int>{0, 3});
  CHECK(in_set(g, 3) == std::set<int>{1, 2});
}

TEST_CASE("parsing the smallest bidirectional digraph") {
  const Digraph g = parse_digraph("2\n1 2\n2 1\n");
  CHECK(g.node_count() == 2);
  CHECK(in_set(g, 0) == std::set<int>{1});
  CHECK(in_set(g, 1) == std::set<int>{0});
}

TEST_CASE("parser rejects malformed documents") {
  CHECK_THROWS_AS(parse_digraph("2\n1 1\n"), parse_error);             // self-loop
  CHECK_THROWS_AS(parse_digraph("2\n1 2\n1 2\n"), parse_error);        // duplicate
  CHECK_THROWS_AS(parse_digraph("2\n1\n"), parse_error);               // malformed line
  CHECK_THROWS_AS(parse_digraph("2\n1 2 1.5\n"), parse_error);         // weight outside (0,1)
  CHECK_THROWS_AS(parse_digraph("2\n1 3\n"), parse_error);             // id out of range
  CHECK_THROWS_AS(parse_digraph("abc\n1 2\n"), parse_error);           // bad node count
  CHECK_THROWS_AS(parse_digraph("2\none two\n"), parse_error);         // non-numeric ids
  CHECK_THROWS_AS(parse_digraph("2\n1 2 0.5 abc\n"), parse_error);     // bad weight token
  CHECK_THROWS_AS(parse_digraph("2\n1 2 0.5 0.5 9\n"), parse_error);   // trailing tokens
  CHECK_THROWS_AS(parse_digraph("", WeightScheme::kNeighborCount), parse_error);
  // explicit weights whose per-node sum reaches 1
  CHECK_THROWS_AS(parse_digraph("3\n1 3 0.5 0.4\n2 3 0.5 0.4\n3 1 0.1 0.1\n"), parse_error);
  // defaults can violate the sum constraint too: a lone sender under the
  // edge-count scheme accumulates b = m * (1/m) = 1
  CHECK_THROWS_AS(parse_digraph("3\n1 2\n1 3\n", WeightScheme::kEdgeCount), parse_error);
}

TEST_CASE("comments and blank lines are ignored") {
  const Digraph g = parse_digraph("# ring\n\n3\n1 2 # first\n2 3\n3 1\n");
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 3);
}

TEST_CASE("strong connectivity predicate") {
  CHECK(is_strongly_connected(parse_digraph(kFourNodeDoc)));
  CHECK_FALSE(is_strongly_connected(parse_digraph("3\n1 2\n2 3\n")));
  for (int n : {3, 5, 8}) CHECK(is_strongly_connected(cyclic_digraph(n)));
}

TEST_CASE("strong connectivity matches BFS reachability") {
  // Exhaustive over all 3-node digraphs.
  for (int mask = 0; mask < 64; ++mask) {
    std::vector<Edge> edges;
    int bit = 0;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) {
        if (i == j) continue;
        if (mask & (1 << bit)) edges.push_back({j, i, 0.4, 0.4});
        ++bit;
      }
    if (edges.empty()) continue;
    const Digraph g(3, std::move(edges));
    CHECK(is_strongly_connected(g) == bfs_strongly_connected(g));
  }
  // Random digraphs up to six nodes.
  RandomStream stream(42);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 4 + stream.next_index(3);
    const Digraph g = random_digraph(n, 0.3, stream);
    CHECK(is_strongly_connected(g) == bfs_strongly_connected(g));
  }
}

TEST_CASE("balance predicate") {
  CHECK(is_balanced(parse_digraph("2\n1 2 0.5 0.5\n2 1 0.5 0.5\n")));
  CHECK(is_balanced(cyclic_digraph(6)));
  // Mismatched in/out degrees with equal weights cannot balance.
  CHECK_FALSE(is_balanced(with_weights(parse_digraph(kFourNodeDoc), WeightScheme::kEdgeCount)));
}

TEST_CASE("degree is the max in-neighbor count") {
  CHECK(degree(parse_digraph(kFourNodeDoc)) == 3);
  CHECK(degree(cyclic_digraph(7)) == 1);
  std::vector<Edge> complete;
  const int n = 5;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if (i != j) complete.push_back({j, i, 1.0 / n, 1.0 / n});
  CHECK(degree(Digraph(n, std::move(complete))) == n - 1);
}

TEST_CASE("weight system of the four-node network") {
  const WeightSystem w = build_weight_system(parse_digraph(kFourNodeDoc));
  const Eigen::MatrixXd row_stoch = Eigen::MatrixXd::Identity(4, 4) - w.L;
  Eigen::MatrixXd expected_rows(4, 4);
  expected_rows << 1.0 / 2, 0, 0, 1.0 / 2,
                   1.0 / 4, 1.0 / 4, 1.0 / 4, 1.0 / 4,
                   1.0 / 3, 0, 1.0 / 3, 1.0 / 3,
                   0, 1.0 / 3, 1.0 / 3, 1.0 / 3;
  CHECK((row_stoch - expected_rows).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("weight system of the two-node bidirectional graph") {
  const WeightSystem w = build_weight_system(parse_digraph("2\n1 2 0.5 0.5\n2 1 0.5 0.5\n"));
  Eigen::MatrixXd expected_l(2, 2), expected_s(2, 2);
  expected_l << 0.5, -0.5, -0.5, 0.5;
  expected_s << 0.5, 0.5, 0.5, 0.5;
  CHECK((w.L - expected_l).cwiseAbs().maxCoeff() == 0.0);
  CHECK((w.S - expected_s).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("ring weight system is circulant with S = I - 2L") {
  const int n = 4;
  const WeightSystem w = build_weight_system(cyclic_digraph(n));
  Eigen::MatrixXd expected_l = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    expected_l(i, i) = 1.0 / 8;
    expected_l(i, (i + n - 1) % n) = -1.0 / 8;
  }
  CHECK((w.L - expected_l).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::MatrixXd expected_s = Eigen::MatrixXd::Identity(n, n) - 2.0 * w.L;
  CHECK((w.S - expected_s).cwiseAbs().maxCoeff() <= 1e-16);
}

TEST_CASE("stochastic factors on random digraphs") {
  RandomStream stream(7);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + stream.next_index(9);
    const Digraph g = random_digraph(n, 0.4, stream);
    const WeightSystem w = build_weight_system(g);
    const Eigen::MatrixXd row_stoch = Eigen::MatrixXd::Identity(n, n) - w.L;
    for (int i = 0; i < n; ++i) {
      CHECK(std::abs(row_stoch.row(i).sum() - 1.0) <= 1e-12);
      CHECK(std::abs(w.S.col(i).sum() - 1.0) <= 1e-12);
    }
    CHECK(row_stoch.minCoeff() >= -1e-15);
    CHECK(w.S.minCoeff() >= -1e-15);
    if (is_strongly_connected(g)) {
      CHECK(pattern_strongly_connected(row_stoch));
      CHECK(pattern_strongly_connected(w.S));
    }
  }
}

TEST_CASE("serialize/parse round-trip is the identity") {
  RandomStream stream(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + stream.next_index(7);
    const Digraph g = random_digraph(n, 0.5, stream);
    const Digraph back = parse_digraph(serialize_digraph(g));
    REQUIRE(back.node_count() == g.node_count());
    REQUIRE(back.edge_count() == g.edge_count());
    for (int e = 0; e < g.edge_count(); ++e) {
      CHECK(back.edges()[e].from == g.edges()[e].from);
      CHECK(back.edges()[e].to == g.edges()[e].to);
      CHECK(back.edges()[e].a == g.edges()[e].a);
      CHECK(back.edges()[e].b == g.edges()[e].b);
    }
    CHECK(serialize_digraph(back) == serialize_digraph(g));
  }
}

TEST_CASE("weight schemes") {
  const Digraph g = parse_digraph(kFourNodeDoc, WeightScheme::kEdgeCount);
  for (const Edge& e : g.edges()) {
    CHECK(e.a == doctest::Approx(1.0 / 16).epsilon(1e-15));
    CHECK(e.b == doctest::Approx(1.0 / 8).epsilon(1e-15));
  }
  const Digraph reg = with_weights(g, WeightScheme::kDegreeRegular);
  for (const Edge& e : reg.edges()) {
    CHECK(e.a == doctest::Approx(1.0 / 24).epsilon(1e-15));  // d = 3, n = 4
    CHECK(e.b == doctest::Approx(1.0 / 12).epsilon(1e-15));
  }
}

TEST_CASE("topology predicates") {
  CHECK(is_cyclic_topology(cyclic_digraph(5)));
  CHECK_FALSE(is_cyclic_topology(parse_digraph(kFourNodeDoc)));
  CHECK(is_symmetric(parse_digraph("2\n1 2\n2 1\n")));
  CHECK_FALSE(is_symmetric(parse_digraph(kFourNodeDoc)));
}
