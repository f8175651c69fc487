#pragma once

#include <cmath>
#include <vector>

#include "cwm/core/matrix.hpp"

namespace cwm {

/// Orthonormal (Tr(B_i B_j) = delta_ij) Hermitian basis of d x d matrices.
/// Element 0 is I/sqrt(d); the remaining d^2 - 1 elements are the
/// normalized generalized Gell-Mann matrices, all traceless.
inline std::vector<ComplexMatrix> hermitian_basis(Eigen::Index d) {
  if (d < 1) throw ConfigError("hermitian_basis: dimension must be >= 1");
  std::vector<ComplexMatrix> basis;
  basis.reserve(static_cast<std::size_t>(d * d));
  basis.push_back(identity(d) / std::sqrt(static_cast<double>(d)));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index k = j + 1; k < d; ++k) {
      ComplexMatrix sym = ComplexMatrix::Zero(d, d);
      sym(j, k) = inv_sqrt2;
      sym(k, j) = inv_sqrt2;
      basis.push_back(std::move(sym));
      ComplexMatrix anti = ComplexMatrix::Zero(d, d);
      anti(j, k) = -kI * inv_sqrt2;
      anti(k, j) = kI * inv_sqrt2;
      basis.push_back(std::move(anti));
    }
  }
  for (Eigen::Index l = 1; l < d; ++l) {
    ComplexMatrix diag = ComplexMatrix::Zero(d, d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(l * (l + 1)));
    for (Eigen::Index j = 0; j < l; ++j) diag(j, j) = norm;
    diag(l, l) = -static_cast<double>(l) * norm;
    basis.push_back(std::move(diag));
  }
  return basis;
}

/// Tensor product sigma_{i_1} (x) ... (x) sigma_{i_n} with indices 0..3
/// meaning I, X, Y, Z. `index` is read in base 4, most significant first.
inline ComplexMatrix pauli_product(unsigned qubits, unsigned index) {
  const ComplexMatrix single[4] = {identity(2), pauli_x(), pauli_y(), pauli_z()};
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (unsigned q = 0; q < qubits; ++q) {
    const unsigned digit = (index >> (2 * (qubits - 1 - q))) & 3u;
    ComplexMatrix next(out.rows() * 2, out.cols() * 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
      for (Eigen::Index j = 0; j < out.cols(); ++j)
        next.block(2 * i, 2 * j, 2, 2) = out(i, j) * single[digit];
    out = std::move(next);
  }
  return out;
}

}  // namespace cwm
