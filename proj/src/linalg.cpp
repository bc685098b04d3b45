#include "surplus/linalg.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace surplus {

namespace {

void require_square_under_cap(const Matrix& m, const char* op) {
  if (m.rows() != m.cols())
    throw std::invalid_argument(std::string(op) + ": matrix must be square");
  if (m.rows() > kDimensionCap)
    throw std::invalid_argument(std::string(op) + ": dimension " +
                                std::to_string(m.rows()) + " exceeds cap " +
                                std::to_string(kDimensionCap));
}

}  // namespace

SpectrumReport eigenvalues(const Matrix& m) {
  require_square_under_cap(m, "eigenvalues");
  const int dim = static_cast<int>(m.rows());

  Eigen::EigenSolver<Matrix> solver(m, /*computeEigenvectors=*/false);
  if (solver.info() != Eigen::Success)
    throw numeric_error("eigensolver failed to converge");

  SpectrumReport report;
  report.eigenvalues.resize(dim);
  for (int i = 0; i < dim; ++i) report.eigenvalues[i] = solver.eigenvalues()(i);
  std::sort(report.eigenvalues.begin(), report.eigenvalues.end(),
            [](const Complex& a, const Complex& b) {
              const double ma = std::abs(a), mb = std::abs(b);
              if (ma != mb) return ma > mb;
              if (a.real() != b.real()) return a.real() > b.real();
              return a.imag() > b.imag();
            });
  report.moduli.resize(dim);
  for (int i = 0; i < dim; ++i) report.moduli[i] = std::abs(report.eigenvalues[i]);
  report.second_modulus = dim > 1 ? report.moduli[1] : 0.0;

  int near_one = 0;
  for (const Complex& ev : report.eigenvalues)
    if (std::abs(ev - Complex(1.0, 0.0)) < 1e-8) ++near_one;
  if (near_one == 1) {
    const Matrix shifted = m - Matrix::Identity(dim, dim);
    report.unit_eigenvalue_simple = numerical_rank(shifted, 1e-10) == dim - 1;
  }
  return report;
}

double modulus_excluding_unit(const SpectrumReport& r) {
  if (r.eigenvalues.empty()) return 0.0;
  size_t unit_idx = 0;
  double best = std::abs(r.eigenvalues[0] - Complex(1.0, 0.0));
  for (size_t i = 1; i < r.eigenvalues.size(); ++i) {
    const double d = std::abs(r.eigenvalues[i] - Complex(1.0, 0.0));
    if (d < best) {
      best = d;
      unit_idx = i;
    }
  }
  double out = 0.0;
  for (size_t i = 0; i < r.moduli.size(); ++i)
    if (i != unit_idx) out = std::max(out, r.moduli[i]);
  return out;
}

int numerical_rank(const Matrix& m, double tol) {
  if (m.size() == 0) return 0;
  Eigen::BDCSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) == 0.0) return 0;
  const double cutoff = tol * sv(0);
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > cutoff) ++rank;
  return rank;
}

Matrix kronecker(const Matrix& a, const Matrix& b) {
  const Eigen::Index rows = a.rows() * b.rows();
  const Eigen::Index cols = a.cols() * b.cols();
  if (rows > kDimensionCap || cols > kDimensionCap)
    throw std::invalid_argument("kronecker: result dimension " + std::to_string(rows) +
                                "x" + std::to_string(cols) + " exceeds cap");
  Matrix out(rows, cols);
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      out.block(r * b.rows(), c * b.cols(), b.rows(), b.cols()) = a(r, c) * b;
  return out;
}

Vector matrix_power_apply(const Matrix& m, const Vector& v, long k) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix_power_apply: non-square matrix");
  if (m.cols() != v.size()) throw std::invalid_argument("matrix_power_apply: dimension mismatch");
  if (k < 0) throw std::invalid_argument("matrix_power_apply: negative power");
  Vector out = v;
  for (long i = 0; i < k; ++i) out = m * out;
  return out;
}

double spectral_radius(const Matrix& m) { return eigenvalues(m).moduli.front(); }

std::string format_matrix(const Matrix& m) {
  std::string out;
  char buf[32];
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof(buf), "%.12e", m(r, c));
      out += buf;
      out += (c + 1 == m.cols()) ? '\n' : ' ';
    }
  }
  return out;
}

}  // namespace surplus
