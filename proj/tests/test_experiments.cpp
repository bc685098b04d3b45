#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "surplus/experiments.hpp"
#include "surplus/special_topologies.hpp"

using namespace surplus;

namespace {

const char* kFourNodeDoc = "4\n4 1\n1 2\n3 2\n4 2\n1 3\n4 3\n2 4\n3 4\n";

std::string temp_graph_file(const std::string& body, const std::string& name) {
  const std::filesystem::path path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("full edge probability yields the two-cycle") {
  const Digraph g = random_strongly_connected(2, 1.0, 7);
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(0, 1));
  CHECK(g.has_edge(1, 0));
}

TEST_CASE("random digraphs are strongly connected and reproducible") {
  const Digraph a = random_strongly_connected(50, 0.5, 99);
  CHECK(is_strongly_connected(a));
  CHECK(a.node_count() == 50);
  const Digraph b = random_strongly_connected(50, 0.5, 99);
  CHECK(serialize_digraph(a) == serialize_digraph(b));
  const Digraph c = random_strongly_connected(50, 0.5, 100);
  CHECK(serialize_digraph(a) != serialize_digraph(c));
}

TEST_CASE("hopeless edge probabilities exhaust the resample budget") {
  CHECK_THROWS_AS(random_strongly_connected(12, 0.01, 1), numeric_error);
}

TEST_CASE("random undirected graphs are symmetric and connected") {
  const Digraph g = random_connected_undirected(8, 0.4, 3);
  CHECK(is_symmetric(g));
  CHECK(is_strongly_connected(g));
  CHECK(is_balanced(g));
}

TEST_CASE("generated initial states have zero mean") {
  const Vector x0 = random_initial_state(40, 11);
  CHECK(std::abs(x0.mean()) <= 1e-14);
  CHECK((x0 - random_initial_state(40, 11)).cwiseAbs().maxCoeff() == 0.0);
  CHECK(x0.cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("weight choice parsing") {
  CHECK(parse_weight_choice("example1").scheme == WeightScheme::kNeighborCount);
  CHECK(parse_weight_choice("uniform").scheme == WeightScheme::kEdgeCount);
  CHECK(parse_weight_choice("regular").scheme == WeightScheme::kDegreeRegular);
  const WeightChoice pair = parse_weight_choice("0.02,0.04");
  REQUIRE(pair.explicit_ab.has_value());
  CHECK(pair.explicit_ab->first == 0.02);
  CHECK(pair.explicit_ab->second == 0.04);
  CHECK_THROWS_AS(parse_weight_choice("banana"), config_error);
  CHECK_THROWS_AS(parse_weight_choice("0.1,"), config_error);
}

TEST_CASE("explicit weight pairs are applied to every edge") {
  const Digraph g = apply_weight_choice(parse_digraph(kFourNodeDoc),
                                        parse_weight_choice("0.05,0.1"));
  for (const Edge& e : g.edges()) {
    CHECK(e.a == 0.05);
    CHECK(e.b == 0.1);
  }
}

TEST_CASE("scheme selection never clobbers explicit file weights") {
  ExperimentConfig cfg;
  cfg.graph_file = temp_graph_file("2\n1 2 0.25 0.125\n2 1\n", "mixed_weights.txt");
  cfg.weights = parse_weight_choice("uniform");
  const Digraph g = load_graph(cfg);
  const Edge& explicit_edge = g.edges()[g.edge_index(0, 1)];
  CHECK(explicit_edge.a == 0.25);   // from the file
  CHECK(explicit_edge.b == 0.125);
  const Edge& defaulted = g.edges()[g.edge_index(1, 0)];
  CHECK(defaulted.a == 0.25);       // 1/(2m) with m = 2
  CHECK(defaulted.b == 0.5);        // 1/m

  cfg.weights = parse_weight_choice("0.3,0.4");
  const Digraph overridden = load_graph(cfg);
  for (const Edge& e : overridden.edges()) {
    CHECK(e.a == 0.3);
    CHECK(e.b == 0.4);
  }
}

TEST_CASE("analyze reports the four-node network") {
  ExperimentConfig cfg;
  cfg.graph_file = temp_graph_file(kFourNodeDoc, "analyze_four.txt");
  cfg.epsilon = 0.1;
  const nlohmann::json report = cmd_analyze(cfg);
  CHECK(report["n"] == 4);
  CHECK(report["strongly_connected"] == true);
  CHECK(report["balanced"] == false);
  CHECK(report["degree"] == 3);
  CHECK(report["lambda2_d"].get<double>() < 1.0);
  CHECK(report["lambda2_g"].get<double>() > 0.0);
  CHECK(report["epsilon_bound"].get<double>() > 0.0);
  CHECK(report["epsilon_bound_log"].get<double>() < 0.0);
  CHECK(report["certified"] == true);
}

TEST_CASE("analyze adds ring thresholds on ring topologies") {
  ExperimentConfig cfg;
  cfg.graph_file = temp_graph_file(serialize_digraph(cyclic_digraph(8)), "analyze_ring.txt");
  const nlohmann::json report = cmd_analyze(cfg);
  CHECK(report.contains("cyclic_bound"));
  CHECK(report["cyclic_bound"].get<double>() ==
        doctest::Approx(cyclic_epsilon_bound(8).epsilon_bound));
}

TEST_CASE("analyze omits spectral fields on disconnected digraphs") {
  ExperimentConfig cfg;
  cfg.graph_file = temp_graph_file("3\n1 2\n2 3\n", "analyze_chain.txt");
  const nlohmann::json report = cmd_analyze(cfg);
  CHECK(report["strongly_connected"] == false);
  CHECK_FALSE(report.contains("lambda2_d"));
  CHECK_FALSE(report.contains("epsilon_bound"));
}

TEST_CASE("analyze omits the gossip factor above the dimension cap") {
  ExperimentConfig cfg;
  cfg.random_graph = RandomGraphSpec{25, 0.5, 4};  // 4n^2 = 2500 > cap
  const nlohmann::json report = cmd_analyze(cfg);
  CHECK_FALSE(report.contains("lambda2_g"));
  CHECK(report.contains("lambda2_g_omitted"));
}

TEST_CASE("deterministic run converges and writes the expected artifacts") {
  ExperimentConfig cfg;
  cfg.graph_file = temp_graph_file(kFourNodeDoc, "run_four.txt");
  cfg.epsilon = 0.3;
  cfg.max_iter = 500000;
  cfg.tol = 1e-9;
  cfg.seed = 21;
  const RunOutput out = cmd_run(cfg);
  CHECK(out.verdict == RunVerdict::kConverged);
  CHECK(out.summary["verdict"] == "converged");
  CHECK(out.summary["lambda2"].get<double>() < 1.0);
  CHECK(std::abs(out.summary["x_avg"].get<double>()) <= 1e-14);
  const std::vector<std::string> lines = lines_of(out.trajectory_csv);
  CHECK(lines.front() == "k,x_1,x_2,x_3,x_4,s_1,s_2,s_3,s_4");
  CHECK(lines.size() >= 3);
  CHECK(lines[1].substr(0, 2) == "0,");
}

TEST_CASE("gossip runs converge for several seeds") {
  ExperimentConfig cfg;
  cfg.graph_file = temp_graph_file(kFourNodeDoc, "run_four_gossip.txt");
  cfg.mode = "gossip";
  cfg.epsilon = 0.05;
  cfg.max_iter = 3000000;
  cfg.tol = 1e-7;
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    cfg.seed = seed;
    const RunOutput out = cmd_run(cfg);
    CHECK(out.verdict == RunVerdict::kConverged);
  }
  cfg.seed = 4;
  const RunOutput out = cmd_run(cfg);
  const std::vector<std::string> lines = lines_of(out.trajectory_csv);
  CHECK(lines.front() == "k,x_1,x_2,x_3,x_4,s_1,s_2,s_3,s_4,edge");
}

TEST_CASE("gossip runs can emit the Monte Carlo error curve") {
  ExperimentConfig cfg;
  cfg.graph_file = temp_graph_file(kFourNodeDoc, "run_mse.txt");
  cfg.mode = "gossip";
  cfg.epsilon = 0.05;
  cfg.max_iter = 100000;
  cfg.trials = 200;
  cfg.mse_horizon = 5;
  cfg.seed = 6;
  const RunOutput out = cmd_run(cfg);
  const std::vector<std::string> lines = lines_of(out.mse_csv);
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "k,mse_full,mse_state,stderr");
  double k0, mse0, state0, se0;
  REQUIRE(std::sscanf(lines[1].c_str(), "%lf,%lf,%lf,%lf", &k0, &mse0, &state0, &se0) == 4);
  CHECK(k0 == 0.0);
  CHECK(se0 == 0.0);  // no randomness in the first row
  CHECK(mse0 == doctest::Approx(state0).epsilon(1e-12));  // surpluses start at zero
}

TEST_CASE("zero gain cannot reach the average on a non-balanced digraph") {
  ExperimentConfig cfg;
  cfg.graph_file = temp_graph_file(kFourNodeDoc, "run_zero_eps.txt");
  cfg.epsilon = 0.0;
  cfg.max_iter = 20000;
  cfg.tol = 1e-8;
  cfg.seed = 5;
  const RunOutput out = cmd_run(cfg);
  CHECK(out.verdict == RunVerdict::kTimeout);
  CHECK(out.summary["verdict"] == "timeout");
}

TEST_CASE("sweep rows are consistent with directly computed factors") {
  ExperimentConfig cfg;
  cfg.random_graph = RandomGraphSpec{8, 0.5, 31};
  cfg.eps_grid = {0.1};
  cfg.sweep_graphs = 1;
  cfg.sweep_gossip = true;
  cfg.seed = 77;
  const std::string csv = cmd_sweep(cfg);
  const std::vector<std::string> lines = lines_of(csv);
  REQUIRE(lines.size() == 2);
  CHECK(lines[0] == "epsilon,lambda2_d_mean,lambda2_g_mean");

  const std::uint64_t sub_seed = RandomStream::derive(77, "sweep-graph", 0).next_u64();
  const Digraph g = random_strongly_connected(8, 0.5, sub_seed);
  const double det = convergence_factor(assemble_system(build_weight_system(g), 0.1));
  const double gos = convergence_factor_gossip(make_gossip_system(g, 0.1));
  double eps_col, det_col, gos_col;
  REQUIRE(std::sscanf(lines[1].c_str(), "%lf,%lf,%lf", &eps_col, &det_col, &gos_col) == 3);
  CHECK(eps_col == 0.1);
  CHECK(det_col == doctest::Approx(det).epsilon(1e-12));
  CHECK(gos_col == doctest::Approx(gos).epsilon(1e-12));
}

TEST_CASE("sweeps are deterministic and reject bad configurations") {
  ExperimentConfig cfg;
  cfg.random_graph = RandomGraphSpec{6, 0.5, 3};
  cfg.eps_grid = {0.05, 0.2, 0.8};
  cfg.sweep_graphs = 4;
  cfg.seed = 9;
  CHECK(cmd_sweep(cfg) == cmd_sweep(cfg));

  ExperimentConfig no_grid = cfg;
  no_grid.eps_grid.clear();
  CHECK_THROWS_WITH_AS(cmd_sweep(no_grid),
                       doctest::Contains("eps-grid"), config_error);

  ExperimentConfig over_cap = cfg;
  over_cap.random_graph = RandomGraphSpec{25, 0.5, 3};
  over_cap.sweep_gossip = true;
  CHECK_THROWS_WITH_AS(cmd_sweep(over_cap), doctest::Contains("gossip"), config_error);
}

TEST_CASE("threshold table covers the configured node range") {
  ExperimentConfig cfg;
  cfg.n_min = 2;
  cfg.n_max = 8;
  cfg.samples = 100;
  cfg.seed = 13;
  const std::string csv = cmd_bounds(cfg);
  const std::vector<std::string> lines = lines_of(csv);
  REQUIRE(lines.size() == 8);
  CHECK(lines[0] == "n,bound_sampled,bound_undirected,bound_cyclic");
  CHECK(lines[1].rfind("2,", 0) == 0);
  CHECK(lines[1].find("0.75") != std::string::npos);
  CHECK(lines[1].substr(lines[1].size() - 3) == "nan");  // no 2-ring threshold

  double prev_undirected = 0.0, prev_cyclic = 10.0;
  for (size_t i = 1; i < lines.size(); ++i) {
    int n;
    double sampled, undirected, cyclic;
    if (std::sscanf(lines[i].c_str(), "%d,%lf,%lf,%lf", &n, &sampled, &undirected, &cyclic) < 3)
      continue;
    CHECK(sampled > 0.0);
    CHECK(undirected > prev_undirected);
    prev_undirected = undirected;
    if (n >= 3) {
      CHECK(cyclic < prev_cyclic);
      prev_cyclic = cyclic;
    }
  }
  CHECK(cmd_bounds(cfg) == csv);
}

TEST_CASE("generated digraph documents parse back") {
  ExperimentConfig cfg;
  cfg.random_graph = RandomGraphSpec{12, 0.4, 8};
  const std::string doc = cmd_gen(cfg);
  const Digraph g = parse_digraph(doc);
  CHECK(g.node_count() == 12);
  CHECK(is_strongly_connected(g));
  CHECK(cmd_gen(cfg) == doc);
}

TEST_CASE("certification agrees with run verdicts") {
  for (int trial = 0; trial < 20; ++trial) {
    const std::uint64_t seed = 200 + trial;
    const Digraph g = random_strongly_connected(4 + trial % 5, 0.5, seed);
    const double epsilon = trial % 2 == 0 ? 0.05 : 3.0;
    const DeterministicSystem sys = assemble_system(build_weight_system(g), epsilon);
    const Certification cert = certify(sys);
    const Vector x0 = random_initial_state(g.node_count(), seed);
    const RunResult result = run(sys, x0, 2000000, 1e-6);
    CHECK(cert.certified == (result.verdict == RunVerdict::kConverged));
  }
}

TEST_CASE("missing graph sources are reported by field") {
  ExperimentConfig cfg;
  CHECK_THROWS_WITH_AS(cmd_analyze(cfg), doctest::Contains("graph"), config_error);
  cfg.graph_file = "nonexistent_file.txt";
  CHECK_THROWS_WITH_AS(cmd_analyze(cfg), doctest::Contains("graph"), config_error);
}
