#pragma once

// Density matrices and the quantum-specific primitives built on them:
// expectation values, fidelity, Bloch coordinates, PSD square root and the
// Frobenius-nearest projection onto the set of physical states.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "cwm/core/matrix.hpp"

namespace cwm {

struct StateTolerance {
  double hermitian = 1e-10;
  double trace = 1e-10;
  double min_eigenvalue = -1e-9;
};

/// Hermitian, positive-semidefinite, unit-trace matrix. Every instance has
/// been validated on construction.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix mat, StateTolerance tol = {}) : mat_(std::move(mat)) {
    require_square(mat_, "DensityMatrix");
    if (mat_.rows() < 2) throw ConfigError("DensityMatrix: dimension must be >= 2");
    if (!is_finite(mat_)) throw NumericalError("DensityMatrix: non-finite entries");
    const double herm = hermiticity_defect(mat_);
    if (herm > tol.hermitian)
      throw NumericalError("DensityMatrix: not Hermitian (defect " + std::to_string(herm) + ")");
    const Complex tr = mat_.trace();
    if (std::abs(tr - 1.0) > tol.trace)
      throw NumericalError("DensityMatrix: trace " + std::to_string(tr.real()) + " is not 1");
    const double lo = eigh(mat_).values.minCoeff();
    if (lo < tol.min_eigenvalue)
      throw NumericalError("DensityMatrix: negative eigenvalue " + std::to_string(lo));
  }

  static DensityMatrix maximally_mixed(Eigen::Index d) {
    return DensityMatrix(identity(d) / static_cast<double>(d));
  }

  const ComplexMatrix& matrix() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

 private:
  ComplexMatrix mat_;
};

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
};

/// Tr(M rho) for Hermitian M. The imaginary part must vanish to 1e-10
/// relative to the operator scale.
inline double expectation(const ComplexMatrix& m, const DensityMatrix& rho) {
  require_same_dim(m, rho.matrix(), "expectation");
  const double scale = std::max(1.0, m.norm());
  if (hermiticity_defect(m) > 1e-10 * scale)
    throw ConfigError("expectation: operator is not Hermitian");
  const Complex value = (m * rho.matrix()).trace();
  if (std::abs(value.imag()) > 1e-10 * scale)
    throw NumericalError("expectation: trace has imaginary part " + std::to_string(value.imag()));
  return value.real();
}

/// Unique PSD square root. Eigenvalues in [-1e-9, 0) and those below the
/// rounding floor of the decomposition are clipped to zero.
inline ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  require_square(m, "psd_sqrt");
  const double scale = std::max(1.0, m.norm());
  if (hermiticity_defect(m) > 1e-10 * scale) throw ConfigError("psd_sqrt: matrix is not Hermitian");
  auto eig = eigh(m);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * eig.values.cwiseAbs().maxCoeff();
  for (auto& v : eig.values) {
    if (v < -1e-9) throw NumericalError("psd_sqrt: negative eigenvalue " + std::to_string(v));
    v = v <= floor ? 0.0 : std::sqrt(v);
  }
  return reassemble(eig.vectors, eig.values);
}

/// f = Tr sqrt( sqrt(a) b sqrt(a) ), clamped to [0, 1].
/// Evaluated as the nuclear norm of sqrt(a) sqrt(b), which equals the trace
/// above and is symmetric in (a, b) by construction.
inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a.matrix(), b.matrix(), "fidelity");
  const ComplexMatrix product = psd_sqrt(a.matrix()) * psd_sqrt(b.matrix());
  const double f = Eigen::JacobiSVD<ComplexMatrix>(product).singularValues().sum();
  return std::clamp(f, 0.0, 1.0);
}

/// Euclidean projection of `v` onto the probability simplex
/// {p : p_i >= 0, sum p_i = 1}, by sort-and-threshold.
inline RealVector project_to_simplex(const RealVector& v) {
  if (v.size() == 0) throw ConfigError("project_to_simplex: empty vector");
  std::vector<double> sorted(v.data(), v.data() + v.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double theta = 0.0;
  for (std::size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  return (v.array() - theta).max(0.0).matrix();
}

/// Frobenius-nearest density matrix to the Hermitian part of `x`.
inline DensityMatrix project_to_density(const ComplexMatrix& x) {
  require_square(x, "project_to_density");
  if (x.rows() < 2) throw ConfigError("project_to_density: dimension must be >= 2");
  const auto eig = eigh(hermitize(x));
  ComplexMatrix rho = hermitize(reassemble(eig.vectors, project_to_simplex(eig.values)));
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho));
}

inline BlochVector bloch_from_density(const DensityMatrix& rho) {
  if (rho.dim() != 2)
    throw ConfigError("bloch_from_density: unsupported dimension " + std::to_string(rho.dim()) +
                      " (only d = 2)");
  const ComplexMatrix& m = rho.matrix();
  // Tr(sigma_x rho) = 2 Re rho_10, Tr(sigma_y rho) = 2 Im rho_10, Tr(sigma_z rho) = rho_00 - rho_11.
  return {2.0 * m(1, 0).real(), 2.0 * m(1, 0).imag(), (m(0, 0) - m(1, 1)).real()};
}

inline DensityMatrix density_from_bloch(const BlochVector& r) {
  ComplexMatrix m = 0.5 * (identity(2) + r.x * pauli_x() + r.y * pauli_y() + r.z * pauli_z());
  return DensityMatrix(std::move(m));
}

}  // namespace cwm
