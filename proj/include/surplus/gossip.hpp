#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "surplus/deterministic.hpp"
#include "surplus/graph.hpp"
#include "surplus/linalg.hpp"
#include "surplus/random_stream.hpp"

namespace surplus {

/// Edge-activation distribution: one edge per round, i.i.d. across rounds.
struct GossipSchedule {
  std::vector<std::pair<int, int>> edges;  // (from, to), sorted
  std::vector<double> probabilities;       // strictly positive, sum 1
  std::vector<double> cumulative;          // prefix sums; back() == 1
};

GossipSchedule uniform_schedule(const Digraph& g);
GossipSchedule make_schedule(const Digraph& g, std::vector<double> probabilities);

/// Asynchronous pairwise iteration: when edge (j,i) fires, the receiver i
/// absorbs the sender's state difference and surplus, the sender's surplus
/// resets to zero; everyone else is untouched.
struct GossipSystem {
  int n = 0;
  std::vector<std::pair<int, int>> edges;  // sorted (from, to)
  std::vector<double> w;                   // per-edge updating weight
  double epsilon = 0.0;
  GossipSchedule schedule;

  int edge_index(int from, int to) const;
};

GossipSystem make_gossip_system(const Digraph& g, double epsilon, double uniform_weight = 0.5);
GossipSystem make_gossip_system(const Digraph& g, double epsilon, std::vector<double> weights,
                                GossipSchedule schedule);

/// 2n x 2n round matrix for one activated edge:
/// [ I-L_e  e*D_e ; L_e  S_e - e*D_e ]; every column sums to 1 and the
/// sender's surplus row is zeroed.
Matrix assemble_edge_matrix(const GossipSystem& sys, int from, int to);

/// Row-stochastic state factor I - L_e of one edge.
Matrix edge_row_stochastic(const GossipSystem& sys, int from, int to);

/// Column-stochastic surplus factor S_e of one edge.
Matrix edge_column_stochastic(const GossipSystem& sys, int from, int to);

std::pair<int, int> sample_edge(const GossipSchedule& schedule, RandomStream& stream);

/// Scalar update rules for one activated edge; equals
/// assemble_edge_matrix(...) * [x;s] to within roundoff.
AugmentedState gossip_step(const GossipSystem& sys, const AugmentedState& st, int from, int to);

struct GossipTrajectoryPoint {
  long k = 0;
  Vector x;
  Vector s;
  int edge_from = -1;  // edge whose activation produced this state; -1 at k=0
  int edge_to = -1;
};

struct GossipRunResult {
  RunVerdict verdict = RunVerdict::kTimeout;
  long iterations = 0;
  double x_avg = 0.0;
  AugmentedState final_state;
  std::vector<GossipTrajectoryPoint> trajectory;
};

/// One seeded sample path with the same stopping rules as the synchronous
/// runner.
GossipRunResult run_gossip(const GossipSystem& sys, const Vector& x0, long max_iter,
                           double tol, std::uint64_t seed);

/// Second-moment transition matrix sum_e p_e (M_e kron M_e), assembled
/// edge-by-edge from the sparse deviation of each M_e from the identity.
Matrix expected_kronecker(const GossipSystem& sys);

/// Modulus of the second-largest eigenvalue of expected_kronecker().
double convergence_factor_gossip(const GossipSystem& sys);

Certification certify_gossip(const GossipSystem& sys);

/// Monte Carlo estimate of the squared consensus error per round, averaged
/// over `trials` independent sample paths. mse_full uses the stacked error
/// [x - avg*1; s], mse_state only the x part; stderr_full is the standard
/// error of mse_full.
struct MseCurve {
  std::vector<double> mse_full;
  std::vector<double> mse_state;
  std::vector<double> stderr_full;
};

MseCurve mean_square_error_curve(const GossipSystem& sys, const Vector& x0, int horizon,
                                 int trials, std::uint64_t seed);

}  // namespace surplus
