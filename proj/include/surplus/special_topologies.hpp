#pragma once

#include <array>
#include <complex>
#include <cstdint>

#include "surplus/linalg.hpp"

namespace surplus {

/// Monic quadratic p(z) = z^2 + alpha1*z + alpha0 with complex coefficients.
struct QuadraticPoly {
  Complex alpha0;
  Complex alpha1;
};

/// The per-eigenvalue quadratic of the balanced case with S = I - 2L:
/// both roots of z^2 + (3mu+eps-2)z + (2mu^2-3mu-eps+1) are eigenvalues of
/// the round matrix whenever mu is a Laplacian eigenvalue.
QuadraticPoly balanced_poly(Complex mu, double epsilon);

/// Discrete-time stability: true iff both roots lie strictly inside the unit
/// circle. Evaluates the two real determinant conditions
///   b0 = 1 - |a0|^2 > 0,
///   b1 = b0^2 - |a1 - conj(a1) a0|^2 > 0
/// (the nested 2x2 determinant collapses to this real form).
bool jury_stable(const QuadraticPoly& p);

std::array<Complex, 2> quadratic_roots(const QuadraticPoly& p);

/// Largest epsilon (bisection, relative 1e-3) keeping the quadratic stable
/// for every sampled mu != 0 from the disc |mu - 1/(2n)| <= 1/(2n); half the
/// samples sit on the boundary circle, samples with |mu| < 1e-12 are
/// redrawn. Deterministic given the seed.
double balanced_epsilon_bound(int n, int samples, std::uint64_t seed);

/// Closed-form threshold (1 - 1/n)(2 - 1/n) for connected undirected graphs
/// under the 1/(2dn) weighting.
double undirected_epsilon_bound(int n);

struct CyclicBound {
  double epsilon_bound = 0.0;
  double lambda3_modulus = 0.0;
};

/// Ring threshold sqrt(2)/(3+sqrt(5)) * (1-|l3|) with the closed-form
/// |l3| = sqrt(1 - 1/n + 1/(2n^2) + (1/n)(1 - 1/(2n)) cos(2*pi/n)).
CyclicBound cyclic_epsilon_bound(int n);

/// Eigenvalue displacement radius ((3+sqrt(5))/2) * sqrt(2) * epsilon of the
/// ring system: every eigenvalue of M lies within this distance of an
/// eigenvalue of M0.
double bauer_fike_radius(double epsilon);

}  // namespace surplus
