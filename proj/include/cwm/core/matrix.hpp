#pragma once

// Small dense complex linear algebra used throughout the library.
// Matrices are Eigen column-major, so vectorize() is a plain copy of storage.

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include <Eigen/Dense>

#include "cwm/error.hpp"

namespace cwm {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Hermitian observable evolving in the Heisenberg picture.
using MeasurementOperator = ComplexMatrix;

inline constexpr Complex kI{0.0, 1.0};

inline ComplexMatrix identity(Eigen::Index d) { return ComplexMatrix::Identity(d, d); }

inline ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

inline ComplexMatrix dagger(const ComplexMatrix& m) { return m.adjoint(); }

inline ComplexMatrix hermitize(const ComplexMatrix& m) { return 0.5 * (m + m.adjoint()); }

inline bool is_finite(const ComplexMatrix& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (!std::isfinite(m(i, j).real()) || !std::isfinite(m(i, j).imag())) return false;
  return true;
}

inline double hermiticity_defect(const ComplexMatrix& m) { return (m - m.adjoint()).norm(); }

inline bool is_hermitian(const ComplexMatrix& m, double tol = 1e-10) {
  return m.rows() == m.cols() && hermiticity_defect(m) <= tol;
}

inline void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() < 1)
    throw ConfigError(std::string(what) + ": matrix must be square and non-empty, got " +
                      std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
}

inline void require_same_dim(const ComplexMatrix& a, const ComplexMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError(std::string(what) + ": dimension mismatch (" + std::to_string(a.rows()) +
                      "x" + std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()) + ")");
}

/// Column-major stacking: [[a,b],[c,d]] -> (a, c, b, d).
inline ComplexVector vectorize(const ComplexMatrix& m) {
  require_square(m, "vectorize");
  return Eigen::Map<const ComplexVector>(m.data(), m.size());
}

/// Inverse of vectorize. The vector length must be a perfect square.
inline ComplexMatrix devectorize(const ComplexVector& v) {
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(v.size()))));
  if (d * d != v.size() || d < 1)
    throw ConfigError("devectorize: length " + std::to_string(v.size()) + " is not a perfect square");
  return Eigen::Map<const ComplexMatrix>(v.data(), d, d);
}

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
struct HermitianEigen {
  RealVector values;
  ComplexMatrix vectors;
};

/// Only the Hermitian part of `m` is used.
inline HermitianEigen eigh(const ComplexMatrix& m) {
  require_square(m, "eigh");
  if (!is_finite(m)) throw NumericalError("eigh: matrix has non-finite entries");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitize(m));
  if (solver.info() != Eigen::Success) throw NumericalError("eigh: eigendecomposition did not converge");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

/// V diag(values) V^dagger.
inline ComplexMatrix reassemble(const ComplexMatrix& vectors, const RealVector& values) {
  return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
}

}  // namespace cwm
