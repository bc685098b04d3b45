#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace surplus {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Complex = std::complex<double>;

/// Thrown when a numerical routine fails or degenerates (eigensolver
/// non-convergence, spectral quantities outside their admissible range).
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Largest dimension the dense spectral routines accept. Sized for the
/// second-moment lift 4n^2 at n = 20.
inline constexpr int kDimensionCap = 1600;

/// Full spectrum of a real square matrix, sorted by descending modulus
/// (ties broken by descending real, then imaginary part, so conjugate pairs
/// sit next to each other).
struct SpectrumReport {
  std::vector<Complex> eigenvalues;
  std::vector<double> moduli;
  /// True iff exactly one eigenvalue lies within 1e-8 of 1+0i and
  /// rank(m - I) at tolerance 1e-10 equals dim-1.
  bool unit_eigenvalue_simple = false;
  /// Modulus of the second entry of `eigenvalues` (0 for 1x1 input).
  double second_modulus = 0.0;
};

SpectrumReport eigenvalues(const Matrix& m);

/// Largest modulus after discarding the one eigenvalue closest to 1+0i.
/// Column-stochastic-sum systems always carry a structural unit eigenvalue;
/// the modulus of the rest is what certifies or refutes contraction, and it
/// exceeds 1 exactly when an unstable mode has overtaken the structural one.
double modulus_excluding_unit(const SpectrumReport& r);

/// Count of singular values exceeding tol * (largest singular value).
int numerical_rank(const Matrix& m, double tol);

Matrix kronecker(const Matrix& a, const Matrix& b);

/// m^k v by k successive products; never forms m^k.
Vector matrix_power_apply(const Matrix& m, const Vector& v, long k);

double spectral_radius(const Matrix& m);

/// Debug dump: one row per line, entries "%.12e" space-separated.
std::string format_matrix(const Matrix& m);

}  // namespace surplus
