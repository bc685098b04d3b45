#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "surplus/deterministic.hpp"
#include "surplus/gossip.hpp"
#include "surplus/graph.hpp"

namespace surplus {

/// Thrown for invalid experiment configurations; messages name the field.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Weight selection: one of the named schemes, or an explicit "a,b" pair
/// applied to every edge.
struct WeightChoice {
  WeightScheme scheme = WeightScheme::kNeighborCount;
  std::optional<std::pair<double, double>> explicit_ab;
};

/// Accepts "example1", "uniform", "regular" or "<a>,<b>".
WeightChoice parse_weight_choice(const std::string& text);

Digraph apply_weight_choice(const Digraph& g, const WeightChoice& choice);

struct RandomGraphSpec {
  int n = 0;
  double p_edge = 0.5;
  std::uint64_t seed = 1;
};

/// Settings shared by the batch commands. Exactly one of graph_file /
/// random_graph supplies the topology (bounds mode needs neither).
struct ExperimentConfig {
  std::string graph_file;
  std::optional<RandomGraphSpec> random_graph;
  WeightChoice weights;
  std::string mode = "det";  // det | gossip (run mode)
  double epsilon = 0.1;
  std::vector<double> eps_grid;
  double tol = 1e-8;
  long max_iter = 100000;
  int trials = 1000;       // gossip Monte Carlo trials
  int mse_horizon = 0;     // rounds of the mean-square error curve (0 = off)
  int sweep_graphs = 20;   // digraphs averaged per sweep point
  bool sweep_gossip = false;
  int samples = 1000;      // mu samples for the sampled balanced bound
  int n_min = 3, n_max = 20;  // bounds-mode node range
  double gossip_weight = 0.5;
  std::string x0_file;
  std::uint64_t seed = 1;
};

/// Samples each ordered pair independently with p_edge and redraws until the
/// digraph is strongly connected; deterministic given the seed.
Digraph random_strongly_connected(int n, double p_edge, std::uint64_t seed,
                                  WeightScheme scheme = WeightScheme::kNeighborCount);

/// Random connected undirected graph, stored as a symmetric digraph with
/// kDegreeRegular weights.
Digraph random_connected_undirected(int n, double p_edge, std::uint64_t seed);

/// Mean-zero i.i.d. standard-normal initial state.
Vector random_initial_state(int n, std::uint64_t seed);

/// Loads the configured topology and applies the weight choice.
Digraph load_graph(const ExperimentConfig& cfg);

/// Structural report: connectivity, balance, degree, spectral quantities and
/// whichever special-topology thresholds apply.
nlohmann::json cmd_analyze(const ExperimentConfig& cfg);

struct RunOutput {
  nlohmann::json summary;
  std::string trajectory_csv;
  std::string mse_csv;  // "k,mse_full,mse_state,stderr"; gossip mode with mse_horizon > 0
  RunVerdict verdict = RunVerdict::kTimeout;
};

/// Single trajectory (deterministic or gossip per cfg.mode) plus a summary
/// record {verdict, iterations, lambda2, epsilon, x_avg}. In gossip mode a
/// positive mse_horizon additionally produces the Monte Carlo error curve
/// over cfg.trials sample paths.
RunOutput cmd_run(const ExperimentConfig& cfg);

/// Per-epsilon mean convergence factors over random digraphs;
/// CSV "epsilon,lambda2_d_mean,lambda2_g_mean".
std::string cmd_sweep(const ExperimentConfig& cfg);

/// Per-n threshold table; CSV "n,bound_sampled,bound_undirected,bound_cyclic".
std::string cmd_bounds(const ExperimentConfig& cfg);

/// Serialized random strongly connected digraph.
std::string cmd_gen(const ExperimentConfig& cfg);

std::string verdict_name(RunVerdict v);

}  // namespace surplus
