#include "surplus/deterministic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace surplus {

DeterministicSystem assemble_system(const WeightSystem& w, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("assemble_system: epsilon must be >= 0");
  const int n = w.n;
  DeterministicSystem sys;
  sys.weights = w;
  sys.epsilon = epsilon;

  const Matrix id = Matrix::Identity(n, n);
  sys.M0 = Matrix::Zero(2 * n, 2 * n);
  sys.M0.topLeftCorner(n, n) = id - w.L;
  sys.M0.bottomLeftCorner(n, n) = w.L;
  sys.M0.bottomRightCorner(n, n) = w.S;

  sys.F = Matrix::Zero(2 * n, 2 * n);
  sys.F.topRightCorner(n, n) = id;
  sys.F.bottomRightCorner(n, n) = -id;

  sys.M = sys.M0 + epsilon * sys.F;

  sys.in_a.assign(n, {});
  sys.in_b.assign(n, {});
  sys.out_b_sum = Vector::Zero(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (w.A(i, j) != 0.0) sys.in_a[i].push_back({j, w.A(i, j)});
      if (w.B(i, j) != 0.0) {
        sys.in_b[i].push_back({j, w.B(i, j)});
        sys.out_b_sum(j) += w.B(i, j);
      }
    }
  return sys;
}

AugmentedState step(const DeterministicSystem& sys, const AugmentedState& st) {
  const int n = sys.weights.n;
  if (st.x.size() != n || st.s.size() != n)
    throw std::invalid_argument("step: state dimension mismatch");
  AugmentedState next;
  next.x = Vector(n);
  next.s = Vector(n);
  next.k = st.k + 1;
  for (int i = 0; i < n; ++i) {
    double dx = 0.0;
    for (const auto& [j, a] : sys.in_a[i]) dx += a * (st.x(j) - st.x(i));
    dx += sys.epsilon * st.s(i);
    next.x(i) = st.x(i) + dx;

    double s_in = (1.0 - sys.out_b_sum(i)) * st.s(i);
    for (const auto& [j, b] : sys.in_b[i]) s_in += b * st.s(j);
    next.s(i) = s_in - dx;
  }
  return next;
}

namespace {

long trajectory_stride(long max_iter, int n) {
  const double scalars = static_cast<double>(max_iter + 1) * 2.0 * n;
  if (scalars < 1e5) return 1;
  return static_cast<long>(std::ceil(static_cast<double>(max_iter) / 1000.0));
}

}  // namespace

RunResult run(const DeterministicSystem& sys, const Vector& x0, long max_iter, double tol) {
  const int n = sys.weights.n;
  if (x0.size() != n) throw std::invalid_argument("run: x0 dimension mismatch");
  if (max_iter < 1) throw std::invalid_argument("run: max_iter must be >= 1");

  RunResult result;
  result.x_avg = x0.mean();
  const double blow_up = 1e9 * (1.0 + x0.cwiseAbs().maxCoeff());
  const long stride = trajectory_stride(max_iter, n);

  AugmentedState st{x0, Vector::Zero(n), 0};
  result.trajectory.push_back({0, st.x, st.s});
  long recorded_k = 0;

  for (long k = 0; k <= max_iter; ++k) {
    const double x_err = (st.x.array() - result.x_avg).abs().maxCoeff();
    const double s_err = st.s.cwiseAbs().maxCoeff();
    if (k > 0 && k % stride == 0 && k != recorded_k) {
      result.trajectory.push_back({k, st.x, st.s});
      recorded_k = k;
    }
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
    st = step(sys, st);
  }
  if (result.trajectory.back().k != st.k) result.trajectory.push_back({st.k, st.x, st.s});
  result.final_state = std::move(st);
  return result;
}

double convergence_factor(const DeterministicSystem& sys) {
  return modulus_excluding_unit(eigenvalues(sys.M));
}

Certification certify(const DeterministicSystem& sys) {
  const SpectrumReport spectrum = eigenvalues(sys.M);
  Certification c;
  c.factor = modulus_excluding_unit(spectrum);
  c.unit_eigenvalue_simple = spectrum.unit_eigenvalue_simple;
  c.certified = c.unit_eigenvalue_simple && c.factor < 1.0;
  return c;
}

EpsilonBound epsilon_bound_general(const WeightSystem& w) {
  if (!pattern_strongly_connected(w.A))
    throw std::invalid_argument("epsilon_bound_general: digraph is not strongly connected");
  const int n = w.n;
  const Matrix row_stoch = Matrix::Identity(n, n) - w.L;
  const double lam_rows = modulus_excluding_unit(eigenvalues(row_stoch));
  const double lam_cols = modulus_excluding_unit(eigenvalues(w.S));

  EpsilonBound bound;
  bound.lambda3_modulus = std::max(lam_rows, lam_cols);
  // At double precision anything this close to 1 is indistinguishable from a
  // degenerate spectrum; log1p below would amplify pure roundoff.
  if (bound.lambda3_modulus >= 1.0 - 1e-12)
    throw numeric_error("epsilon_bound_general: |lambda_3| >= 1 (numerical degeneracy)");
  bound.log_value = n * (std::log1p(-bound.lambda3_modulus) - std::log(20.0 + 8.0 * n));
  bound.value = std::exp(bound.log_value);
  return bound;
}

namespace {

double matching_by_enumeration(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  std::vector<int> perm(a.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = 0.0;
    for (size_t i = 0; i < a.size() && worst < best; ++i)
      worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Kuhn's augmenting-path matching on the bipartite graph of pairs with
// distance <= threshold.
bool perfect_matching_exists(const std::vector<std::vector<double>>& dist, double threshold) {
  const int n = static_cast<int>(dist.size());
  std::vector<int> match_right(n, -1);
  std::vector<char> visited;

  auto augment = [&](auto&& self, int left) -> bool {
    for (int right = 0; right < n; ++right) {
      if (visited[right] || dist[left][right] > threshold) continue;
      visited[right] = 1;
      if (match_right[right] < 0 || self(self, match_right[right])) {
        match_right[right] = left;
        return true;
      }
    }
    return false;
  };

  for (int left = 0; left < n; ++left) {
    visited.assign(n, 0);
    if (!augment(augment, left)) return false;
  }
  return true;
}

double matching_by_threshold_search(const std::vector<Complex>& a,
                                    const std::vector<Complex>& b) {
  const int n = static_cast<int>(a.size());
  std::vector<std::vector<double>> dist(n, std::vector<double>(n));
  std::vector<double> values;
  values.reserve(static_cast<size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      dist[i][j] = std::abs(a[i] - b[j]);
      values.push_back(dist[i][j]);
    }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());

  // Smallest threshold admitting a perfect matching; the optimum is one of
  // the pairwise distances.
  size_t lo = 0, hi = values.size() - 1;
  while (lo < hi) {
    const size_t mid = lo + (hi - lo) / 2;
    if (perfect_matching_exists(dist, values[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return values[lo];
}

}  // namespace

double optimal_matching_distance(const SpectrumReport& s1, const SpectrumReport& s2) {
  if (s1.eigenvalues.size() != s2.eigenvalues.size())
    throw std::invalid_argument("optimal_matching_distance: spectrum sizes differ");
  if (s1.eigenvalues.empty()) return 0.0;
  if (s1.eigenvalues.size() <= 8)
    return matching_by_enumeration(s1.eigenvalues, s2.eigenvalues);
  return matching_by_threshold_search(s1.eigenvalues, s2.eigenvalues);
}

}  // namespace surplus
