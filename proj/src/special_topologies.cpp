#include "surplus/special_topologies.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "surplus/random_stream.hpp"

namespace surplus {

QuadraticPoly balanced_poly(Complex mu, double epsilon) {
  QuadraticPoly p;
  p.alpha1 = 3.0 * mu + (epsilon - 2.0);
  p.alpha0 = 2.0 * mu * mu - 3.0 * mu + (1.0 - epsilon);
  return p;
}

bool jury_stable(const QuadraticPoly& p) {
  const double beta0 = 1.0 - std::norm(p.alpha0);
  if (beta0 <= 0.0) return false;
  const Complex inner = p.alpha1 - std::conj(p.alpha1) * p.alpha0;
  const double beta1 = beta0 * beta0 - std::norm(inner);
  return beta1 > 0.0;
}

std::array<Complex, 2> quadratic_roots(const QuadraticPoly& p) {
  const Complex half_b = p.alpha1 / 2.0;
  const Complex root_disc = std::sqrt(half_b * half_b - p.alpha0);
  // Stable evaluation: pick the larger-magnitude root first, derive the other
  // from the product of roots.
  const Complex r1 = (std::abs(-half_b + root_disc) >= std::abs(-half_b - root_disc))
                         ? -half_b + root_disc
                         : -half_b - root_disc;
  const Complex r2 = (r1 != Complex(0.0, 0.0)) ? p.alpha0 / r1 : -p.alpha1 - r1;
  return {r1, r2};
}

double balanced_epsilon_bound(int n, int samples, std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("balanced_epsilon_bound: n must be >= 2");
  if (samples < 1) throw std::invalid_argument("balanced_epsilon_bound: samples must be >= 1");

  const double radius = 1.0 / (2.0 * n);
  RandomStream stream = RandomStream::derive(seed, "balanced-mu");
  std::vector<Complex> mus;
  mus.reserve(samples);
  const int boundary = samples / 2;
  while (static_cast<int>(mus.size()) < samples) {
    const bool on_boundary = static_cast<int>(mus.size()) < boundary;
    const double phi = stream.next_range(0.0, 2.0 * std::numbers::pi);
    const double rho = on_boundary ? 1.0 : std::sqrt(stream.next_double());
    const Complex mu = radius + radius * rho * std::polar(1.0, phi);
    if (std::abs(mu) < 1e-12) continue;
    mus.push_back(mu);
  }

  auto all_stable = [&](double eps) {
    for (const Complex& mu : mus)
      if (!jury_stable(balanced_poly(mu, eps))) return false;
    return true;
  };

  double lo = 0.0, hi = 4.0;
  while (all_stable(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) return lo;  // unconstrained by these samples
  }
  while (hi - lo > 1e-3 * hi) {
    const double mid = 0.5 * (lo + hi);
    (all_stable(mid) ? lo : hi) = mid;
  }
  return lo;
}

double undirected_epsilon_bound(int n) {
  if (n < 2) throw std::invalid_argument("undirected_epsilon_bound: n must be >= 2");
  return (1.0 - 1.0 / n) * (2.0 - 1.0 / n);
}

CyclicBound cyclic_epsilon_bound(int n) {
  if (n < 3) throw std::invalid_argument("cyclic_epsilon_bound: n must be >= 3");
  const double inv_n = 1.0 / n;
  CyclicBound out;
  out.lambda3_modulus = std::sqrt(1.0 - inv_n + 0.5 * inv_n * inv_n +
                                  inv_n * (1.0 - 0.5 * inv_n) *
                                      std::cos(2.0 * std::numbers::pi * inv_n));
  out.epsilon_bound =
      std::numbers::sqrt2 / (3.0 + std::sqrt(5.0)) * (1.0 - out.lambda3_modulus);
  return out;
}

double bauer_fike_radius(double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("bauer_fike_radius: epsilon must be >= 0");
  return 0.5 * (3.0 + std::sqrt(5.0)) * std::numbers::sqrt2 * epsilon;
}

}  // namespace surplus
