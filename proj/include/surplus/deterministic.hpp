#pragma once

#include <vector>

#include "surplus/graph.hpp"
#include "surplus/linalg.hpp"

namespace surplus {

/// Paired state/surplus vectors at time k. Along any trajectory the total
/// 1'(x+s) stays equal to 1'x(0).
struct AugmentedState {
  Vector x;
  Vector s;
  long k = 0;
};

/// The synchronous iteration [x;s] <- M [x;s] with
///   M  = [ I-L  eI ; L  S-eI ],  M = M0 + e*F,
///   M0 = [ I-L  0  ; L  S    ],  F = [ 0  I ; 0  -I ].
/// Also carries the sparse adjacency view the scalar per-node update uses.
struct DeterministicSystem {
  WeightSystem weights;
  double epsilon = 0.0;
  Matrix M, M0, F;

  // Node-local views of A and B: in_a[i] = {(j, a_ij)}, in_b[i] = {(j, b_ji)}.
  std::vector<std::vector<std::pair<int, double>>> in_a;
  std::vector<std::vector<std::pair<int, double>>> in_b;
  Vector out_b_sum;  // per-sender sending-weight totals
};

/// Builds M, M0, F from the weight system. epsilon = 0 is allowed and yields
/// the block-triangular M0 (the plain consensus baseline in the x block).
DeterministicSystem assemble_system(const WeightSystem& w, double epsilon);

/// One synchronous round, computed from the per-node scalar recursions (not
/// as a product with M). Matches M*[x;s] to within roundoff.
AugmentedState step(const DeterministicSystem& sys, const AugmentedState& st);

enum class RunVerdict { kConverged, kDiverged, kTimeout };

struct TrajectoryPoint {
  long k = 0;
  Vector x;
  Vector s;
};

struct RunResult {
  RunVerdict verdict = RunVerdict::kTimeout;
  long iterations = 0;
  double x_avg = 0.0;
  AugmentedState final_state;
  /// Stored rounds: every round while the full history stays under 1e5
  /// scalars, otherwise strided at ceil(max_iter/1000); first and last rounds
  /// are always present.
  std::vector<TrajectoryPoint> trajectory;
};

/// Iterates from (x0, s=0) until both max_i|x_i - x_avg| and max_i|s_i| drop
/// below tol, the state norm blows past 1e9*(1+|x0|_inf) (diverged), or
/// max_iter rounds elapse (timeout).
RunResult run(const DeterministicSystem& sys, const Vector& x0, long max_iter, double tol);

/// Modulus of the second-largest eigenvalue of M.
double convergence_factor(const DeterministicSystem& sys);

struct Certification {
  double factor = 0.0;
  bool unit_eigenvalue_simple = false;
  bool certified = false;  // unit simple and factor < 1
};

Certification certify(const DeterministicSystem& sys);

/// The general epsilon threshold (1-|l3|)^n / (20+8n)^n, with |l3| the
/// largest modulus in sigma(I-L) u sigma(S) after removing one unit
/// eigenvalue from each factor. The linear-domain value can be subnormal or
/// zero; log_value = n*(log(1-|l3|) - log(20+8n)) is always finite.
struct EpsilonBound {
  double lambda3_modulus = 0.0;
  double value = 0.0;
  double log_value = 0.0;
};

EpsilonBound epsilon_bound_general(const WeightSystem& w);

/// Bottleneck spectrum distance: min over permutations of
/// max_i |lambda_i - mu_pi(i)|. Exact; enumerates permutations up to size 8,
/// then switches to threshold search with bipartite matching.
double optimal_matching_distance(const SpectrumReport& s1, const SpectrumReport& s2);

}  // namespace surplus
