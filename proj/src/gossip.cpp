#include "surplus/gossip.hpp"

#include <algorithm>
#include <cmath>

#include "surplus/parallel.hpp"

namespace surplus {

namespace {

GossipSchedule finalize_schedule(std::vector<std::pair<int, int>> edges,
                                 std::vector<double> probabilities) {
  GossipSchedule sched;
  sched.edges = std::move(edges);
  sched.probabilities = std::move(probabilities);
  const bool single = sched.probabilities.size() == 1;  // a lone edge carries p = 1
  double total = 0.0;
  for (double p : sched.probabilities) {
    if (p <= 0.0 || p > 1.0 || (p == 1.0 && !single))
      throw std::invalid_argument("schedule probabilities must lie in (0,1)");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("schedule probabilities must sum to 1");
  sched.cumulative.resize(sched.probabilities.size());
  double acc = 0.0;
  for (size_t i = 0; i < sched.probabilities.size(); ++i) {
    acc += sched.probabilities[i];
    sched.cumulative[i] = acc;
  }
  sched.cumulative.back() = 1.0;
  return sched;
}

std::vector<std::pair<int, int>> edge_pairs(const Digraph& g) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(g.edges().size());
  for (const Edge& e : g.edges()) pairs.push_back({e.from, e.to});
  return pairs;
}

}  // namespace

GossipSchedule uniform_schedule(const Digraph& g) {
  const int m = g.edge_count();
  return finalize_schedule(edge_pairs(g), std::vector<double>(m, 1.0 / m));
}

GossipSchedule make_schedule(const Digraph& g, std::vector<double> probabilities) {
  if (static_cast<int>(probabilities.size()) != g.edge_count())
    throw std::invalid_argument("schedule support must equal the edge set");
  return finalize_schedule(edge_pairs(g), std::move(probabilities));
}

int GossipSystem::edge_index(int from, int to) const {
  const auto it = std::lower_bound(edges.begin(), edges.end(), std::make_pair(from, to));
  if (it == edges.end() || *it != std::make_pair(from, to)) return -1;
  return static_cast<int>(it - edges.begin());
}

GossipSystem make_gossip_system(const Digraph& g, double epsilon, double uniform_weight) {
  return make_gossip_system(g, epsilon,
                            std::vector<double>(g.edge_count(), uniform_weight),
                            uniform_schedule(g));
}

GossipSystem make_gossip_system(const Digraph& g, double epsilon, std::vector<double> weights,
                                GossipSchedule schedule) {
  if (epsilon < 0.0) throw std::invalid_argument("gossip: epsilon must be >= 0");
  if (static_cast<int>(weights.size()) != g.edge_count())
    throw std::invalid_argument("gossip: one weight per edge required");
  for (double w : weights)
    if (w <= 0.0 || w >= 1.0) throw std::invalid_argument("gossip: weights must lie in (0,1)");
  if (schedule.edges != edge_pairs(g))
    throw std::invalid_argument("gossip: schedule support must equal the edge set");
  GossipSystem sys;
  sys.n = g.node_count();
  sys.edges = edge_pairs(g);
  sys.w = std::move(weights);
  sys.epsilon = epsilon;
  sys.schedule = std::move(schedule);
  return sys;
}

namespace {

struct Deviation {
  int row, col;
  double value;
};

// M_e = I + U with U supported on rows {to, n+to, n+from}.
std::vector<Deviation> edge_deviation(const GossipSystem& sys, int idx) {
  const auto [from, to] = sys.edges[idx];
  const int n = sys.n;
  const double w = sys.w[idx];
  const double ew = sys.epsilon * w;
  return {
      {to, to, -w},
      {to, from, w},
      {to, n + to, ew},
      {n + to, to, w},
      {n + to, from, -w},
      {n + to, n + to, -ew},
      {n + to, n + from, 1.0},
      {n + from, n + from, -1.0},
  };
}

int require_edge(const GossipSystem& sys, int from, int to) {
  const int idx = sys.edge_index(from, to);
  if (idx < 0)
    throw std::invalid_argument("edge (" + std::to_string(from + 1) + "," +
                                std::to_string(to + 1) + ") is not in the digraph");
  return idx;
}

}  // namespace

Matrix assemble_edge_matrix(const GossipSystem& sys, int from, int to) {
  const int idx = require_edge(sys, from, to);
  Matrix m = Matrix::Identity(2 * sys.n, 2 * sys.n);
  for (const Deviation& d : edge_deviation(sys, idx)) m(d.row, d.col) += d.value;
  return m;
}

Matrix edge_row_stochastic(const GossipSystem& sys, int from, int to) {
  const int idx = require_edge(sys, from, to);
  Matrix m = Matrix::Identity(sys.n, sys.n);
  m(to, to) -= sys.w[idx];
  m(to, from) += sys.w[idx];
  return m;
}

Matrix edge_column_stochastic(const GossipSystem& sys, int from, int to) {
  require_edge(sys, from, to);
  Matrix m = Matrix::Identity(sys.n, sys.n);
  m(from, from) = 0.0;
  m(to, from) = 1.0;
  return m;
}

std::pair<int, int> sample_edge(const GossipSchedule& schedule, RandomStream& stream) {
  const double u = stream.next_double();
  const auto it = std::upper_bound(schedule.cumulative.begin(), schedule.cumulative.end(), u);
  const size_t idx = std::min(static_cast<size_t>(it - schedule.cumulative.begin()),
                              schedule.edges.size() - 1);
  return schedule.edges[idx];
}

AugmentedState gossip_step(const GossipSystem& sys, const AugmentedState& st, int from, int to) {
  const int idx = require_edge(sys, from, to);
  if (st.x.size() != sys.n || st.s.size() != sys.n)
    throw std::invalid_argument("gossip_step: state dimension mismatch");
  AugmentedState next = st;
  next.k = st.k + 1;
  const double w = sys.w[idx];
  const double dx = w * (st.x(from) - st.x(to)) + sys.epsilon * w * st.s(to);
  next.x(to) = st.x(to) + dx;
  next.s(to) = st.s(to) + st.s(from) - dx;
  next.s(from) = 0.0;
  return next;
}

GossipRunResult run_gossip(const GossipSystem& sys, const Vector& x0, long max_iter,
                           double tol, std::uint64_t seed) {
  if (x0.size() != sys.n) throw std::invalid_argument("run_gossip: x0 dimension mismatch");
  if (max_iter < 1) throw std::invalid_argument("run_gossip: max_iter must be >= 1");

  GossipRunResult result;
  result.x_avg = x0.mean();
  const double blow_up = 1e9 * (1.0 + x0.cwiseAbs().maxCoeff());
  const double scalars = static_cast<double>(max_iter + 1) * 2.0 * sys.n;
  const long stride =
      scalars < 1e5 ? 1 : static_cast<long>(std::ceil(static_cast<double>(max_iter) / 1000.0));

  RandomStream stream = RandomStream::derive(seed, "gossip-path");
  AugmentedState st{x0, Vector::Zero(sys.n), 0};
  int last_from = -1, last_to = -1;
  result.trajectory.push_back({0, st.x, st.s, -1, -1});
  long recorded_k = 0;

  for (long k = 0; k <= max_iter; ++k) {
    if (k > 0 && k % stride == 0 && k != recorded_k) {
      result.trajectory.push_back({k, st.x, st.s, last_from, last_to});
      recorded_k = k;
    }
    const double x_err = (st.x.array() - result.x_avg).abs().maxCoeff();
    const double s_err = st.s.cwiseAbs().maxCoeff();
    if (x_err < tol && s_err < tol) {
      result.verdict = RunVerdict::kConverged;
      result.iterations = k;
      break;
    }
    if (std::max(st.x.cwiseAbs().maxCoeff(), st.s.cwiseAbs().maxCoeff()) > blow_up) {
      result.verdict = RunVerdict::kDiverged;
      result.iterations = k;
      break;
    }
    if (k == max_iter) {
      result.verdict = RunVerdict::kTimeout;
      result.iterations = k;
      break;
    }
    const auto [from, to] = sample_edge(sys.schedule, stream);
    st = gossip_step(sys, st, from, to);
    last_from = from;
    last_to = to;
  }
  if (result.trajectory.back().k != st.k)
    result.trajectory.push_back({st.k, st.x, st.s, last_from, last_to});
  result.final_state = std::move(st);
  return result;
}

Matrix expected_kronecker(const GossipSystem& sys) {
  const int two_n = 2 * sys.n;
  const long dim = static_cast<long>(two_n) * two_n;
  if (dim > kDimensionCap)
    throw std::invalid_argument("expected_kronecker: dimension " + std::to_string(dim) +
                                " exceeds cap " + std::to_string(kDimensionCap));
  Matrix out = Matrix::Identity(dim, dim);
  for (size_t idx = 0; idx < sys.edges.size(); ++idx) {
    const double p = sys.schedule.probabilities[idx];
    const std::vector<Deviation> dev = edge_deviation(sys, static_cast<int>(idx));
    // (I+U) kron (I+U) = I + I kron U + U kron I + U kron U.
    for (int blk = 0; blk < two_n; ++blk)
      for (const Deviation& d : dev)
        out(blk * two_n + d.row, blk * two_n + d.col) += p * d.value;
    for (const Deviation& d : dev)
      for (int q = 0; q < two_n; ++q)
        out(d.row * two_n + q, d.col * two_n + q) += p * d.value;
    for (const Deviation& a : dev)
      for (const Deviation& b : dev)
        out(a.row * two_n + b.row, a.col * two_n + b.col) += p * a.value * b.value;
  }
  return out;
}

double convergence_factor_gossip(const GossipSystem& sys) {
  return modulus_excluding_unit(eigenvalues(expected_kronecker(sys)));
}

Certification certify_gossip(const GossipSystem& sys) {
  const SpectrumReport spectrum = eigenvalues(expected_kronecker(sys));
  Certification c;
  c.factor = modulus_excluding_unit(spectrum);
  c.unit_eigenvalue_simple = spectrum.unit_eigenvalue_simple;
  c.certified = c.unit_eigenvalue_simple && c.factor < 1.0;
  return c;
}

MseCurve mean_square_error_curve(const GossipSystem& sys, const Vector& x0, int horizon,
                                 int trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("mean_square_error_curve: trials must be >= 1");
  if (horizon < 0) throw std::invalid_argument("mean_square_error_curve: negative horizon");
  if (x0.size() != sys.n)
    throw std::invalid_argument("mean_square_error_curve: x0 dimension mismatch");

  const double x_avg = x0.mean();
  const int points = horizon + 1;

  // Per-chunk Welford moments; chunks merge in a fixed order so the output
  // does not depend on the worker count.
  struct Accumulator {
    long count = 0;
    std::vector<double> mean_full, m2_full, sum_state;
    void init(int points) {
      mean_full.assign(points, 0.0);
      m2_full.assign(points, 0.0);
      sum_state.assign(points, 0.0);
    }
  };

  const int chunk_size = 1024;
  const int chunk_count = (trials + chunk_size - 1) / chunk_size;
  std::vector<Accumulator> chunks(chunk_count);

  auto run_chunk = [&](int chunk) {
    Accumulator& acc = chunks[chunk];
    acc.init(points);
    const int t_begin = chunk * chunk_size;
    const int t_end = std::min(trials, t_begin + chunk_size);
    for (int t = t_begin; t < t_end; ++t) {
      RandomStream stream = RandomStream::derive(seed, "mse-trial", static_cast<std::uint64_t>(t));
      AugmentedState st{x0, Vector::Zero(sys.n), 0};
      ++acc.count;
      for (int k = 0; k < points; ++k) {
        if (k > 0) {
          const auto [from, to] = sample_edge(sys.schedule, stream);
          st = gossip_step(sys, st, from, to);
        }
        const double state_err = (st.x.array() - x_avg).matrix().squaredNorm();
        const double full_err = state_err + st.s.squaredNorm();
        const double delta = full_err - acc.mean_full[k];
        acc.mean_full[k] += delta / acc.count;
        acc.m2_full[k] += delta * (full_err - acc.mean_full[k]);
        acc.sum_state[k] += state_err;
      }
    }
  };

  parallel_for(chunk_count, run_chunk);

  MseCurve curve;
  curve.mse_full.assign(points, 0.0);
  curve.mse_state.assign(points, 0.0);
  curve.stderr_full.assign(points, 0.0);
  for (int k = 0; k < points; ++k) {
    long count = 0;
    double mean = 0.0, m2 = 0.0, sum_state = 0.0;
    for (const Accumulator& acc : chunks) {
      if (acc.count == 0) continue;
      const double delta = acc.mean_full[k] - mean;
      const long combined = count + acc.count;
      m2 += acc.m2_full[k] +
            delta * delta * static_cast<double>(count) * static_cast<double>(acc.count) /
                static_cast<double>(combined);
      mean += delta * static_cast<double>(acc.count) / static_cast<double>(combined);
      count = combined;
      sum_state += acc.sum_state[k];
    }
    curve.mse_full[k] = mean;
    curve.mse_state[k] = sum_state / trials;
    if (trials > 1) curve.stderr_full[k] = std::sqrt(std::max(0.0, m2 / (trials - 1)) / trials);
  }
  return curve;
}

}  // namespace surplus
