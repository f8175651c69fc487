#pragma once

// Online window of measurement records and the constrained least-squares
// state estimate
//
//   rho_hat = argmin || A vec(rho) - y ||_2   s.t.  rho >= 0, Tr rho = 1,
//
// where row l of A is vec(M_l^T)^T so that A vec(rho) = (Tr(M_l rho))_l.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cwm/core/basis.hpp"
#include "cwm/core/density.hpp"
#include "cwm/core/matrix.hpp"
#include "cwm/dynamics.hpp"

namespace cwm {

struct MeasurementRecord {
  int step = 0;
  double t = 0.0;
  MeasurementOperator op;
  double value = 0.0;
};

/// FIFO buffer of at most `capacity` records, strictly increasing in step.
class MeasurementWindow {
 public:
  explicit MeasurementWindow(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ < 1) throw ConfigError("MeasurementWindow: capacity must be >= 1");
  }

  void push(MeasurementRecord r) {
    require_square(r.op, "MeasurementWindow::push");
    if (!entries_.empty()) {
      if (r.step <= entries_.back().step)
        throw ConfigError("MeasurementWindow::push: step " + std::to_string(r.step) +
                          " does not follow step " + std::to_string(entries_.back().step));
      require_same_dim(r.op, entries_.back().op, "MeasurementWindow::push");
    }
    entries_.push_back(std::move(r));
    if (entries_.size() > capacity_) entries_.pop_front();
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::deque<MeasurementRecord>& entries() const { return entries_; }
  Eigen::Index dim() const { return entries_.empty() ? 0 : entries_.front().op.rows(); }

 private:
  std::size_t capacity_;
  std::deque<MeasurementRecord> entries_;
};

inline MeasurementWindow push_record(MeasurementWindow w, MeasurementRecord r) {
  w.push(std::move(r));
  return w;
}

struct SamplingSystem {
  ComplexMatrix a;  // |entries| x d^2
  RealVector y;
};

inline SamplingSystem assemble_system(const MeasurementWindow& w) {
  if (w.empty()) throw ConfigError("assemble_system: window is empty");
  const auto d = w.dim();
  const auto m = static_cast<Eigen::Index>(w.size());
  SamplingSystem sys{ComplexMatrix(m, d * d), RealVector(m)};
  Eigen::Index row = 0;
  for (const auto& r : w.entries()) {
    sys.a.row(row) = vectorize(r.op.transpose()).transpose();
    sys.y(row) = r.value;
    ++row;
  }
  return sys;
}

/// Minimum-norm minimizer of || A x - y ||_2 (complete orthogonal decomposition).
inline ComplexVector ls_solve(const ComplexMatrix& a, const ComplexVector& y) {
  if (a.rows() == 0 || a.cols() == 0) throw ConfigError("ls_solve: empty system");
  if (a.rows() != y.size()) throw ConfigError("ls_solve: row count does not match y");
  Eigen::CompleteOrthogonalDecomposition<ComplexMatrix> cod(a);
  return cod.solve(y);
}

inline ComplexVector ls_solve(const ComplexMatrix& a, const RealVector& y) {
  return ls_solve(a, ComplexVector(y.cast<Complex>()));
}

namespace detail {

/// The sampling system written in real coordinates over an orthonormal
/// Hermitian basis: rho = sum_j c_j B_j, with c_0 = 1/sqrt(d) fixing the
/// trace. Real and imaginary parts of each row are stacked so that
/// non-Hermitian operators are also handled.
struct RealSystem {
  std::vector<ComplexMatrix> basis;
  RealMatrix g;  // 2m x d^2
  RealVector b;  // 2m
  int dropped_rows = 0;
};

inline RealSystem to_real_system(const SamplingSystem& sys, Eigen::Index d) {
  if (sys.a.cols() != d * d) throw ConfigError("estimate: sampling matrix width is not d^2");
  RealSystem out{hermitian_basis(d), {}, {}, 0};

  double max_row = 0.0;
  for (Eigen::Index l = 0; l < sys.a.rows(); ++l) max_row = std::max(max_row, sys.a.row(l).norm());
  std::vector<Eigen::Index> kept;
  for (Eigen::Index l = 0; l < sys.a.rows(); ++l) {
    if (sys.a.row(l).norm() <= 1e-14 * max_row || max_row == 0.0)
      ++out.dropped_rows;
    else
      kept.push_back(l);
  }

  const auto m = static_cast<Eigen::Index>(kept.size());
  const auto n = d * d;
  ComplexMatrix basis_columns(n, n);
  for (Eigen::Index j = 0; j < n; ++j) basis_columns.col(j) = vectorize(out.basis[static_cast<std::size_t>(j)]);
  out.g.resize(2 * m, n);
  out.b = RealVector::Zero(2 * m);
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index l = kept[static_cast<std::size_t>(k)];
    const Eigen::RowVectorXcd coeff = sys.a.row(l) * basis_columns;
    out.g.row(k) = coeff.real();
    out.g.row(m + k) = coeff.imag();
    out.b(k) = sys.y(l);
  }
  return out;
}

inline ComplexMatrix from_coordinates(const std::vector<ComplexMatrix>& basis, const RealVector& c) {
  ComplexMatrix rho = ComplexMatrix::Zero(basis.front().rows(), basis.front().cols());
  for (Eigen::Index j = 0; j < c.size(); ++j) rho += c(j) * basis[static_cast<std::size_t>(j)];
  return rho;
}

inline RealVector to_coordinates(const std::vector<ComplexMatrix>& basis, const ComplexMatrix& rho) {
  RealVector c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j)
    c(static_cast<Eigen::Index>(j)) = (basis[j] * rho).trace().real();
  return c;
}

}  // namespace detail

namespace detail {

inline ComplexMatrix affine_fit(const RealSystem& rs, Eigen::Index d) {
  const auto n = d * d;
  RealVector c = RealVector::Zero(n);
  c(0) = 1.0 / std::sqrt(static_cast<double>(d));
  if (rs.g.rows() > 0 && n > 1) {
    const RealMatrix free = rs.g.rightCols(n - 1);
    const RealVector rhs = rs.b - rs.g.col(0) * c(0);
    Eigen::CompleteOrthogonalDecomposition<RealMatrix> cod(free);
    c.tail(n - 1) = cod.solve(rhs);
  }
  return hermitize(from_coordinates(rs.basis, c));
}

}  // namespace detail

/// Minimum-norm least-squares solution over Hermitian, unit-trace matrices
/// (no positivity constraint). Returns the matrix and the number of all-zero
/// rows that were dropped.
inline std::pair<ComplexMatrix, int> fit_hermitian_unit_trace(const SamplingSystem& sys, Eigen::Index d) {
  const auto rs = detail::to_real_system(sys, d);
  return {detail::affine_fit(rs, d), rs.dropped_rows};
}

struct EstimatorOptions {
  /// Solve the positivity-constrained problem exactly. When false, the
  /// estimate is the affine least-squares point projected onto the state set.
  bool refine = true;
  int max_iterations = 20000;
  double tolerance = 1e-13;
};

struct EstimateResult {
  DensityMatrix rho;
  double residual = 0.0;  // || A vec(rho) - y ||_2 over the kept rows
  int dropped_rows = 0;
  int iterations = 0;
};

/// Constrained least-squares fit to the window. Starts from the minimum-norm
/// Hermitian unit-trace solution; if that point is already PSD it is the
/// answer, otherwise an accelerated projected gradient (with adaptive
/// restart) runs from its projection.
inline EstimateResult estimate_detailed(const MeasurementWindow& w, const EstimatorOptions& opts = {}) {
  const SamplingSystem sys = assemble_system(w);
  const auto d = w.dim();
  const auto rs = detail::to_real_system(sys, d);
  const ComplexMatrix affine = detail::affine_fit(rs, d);
  const int dropped = rs.dropped_rows;

  auto residual_of = [&](const RealVector& c) { return rs.g.rows() == 0 ? 0.0 : (rs.g * c - rs.b).norm(); };

  const double lowest = eigh(affine).values.minCoeff();
  if (lowest >= -1e-12 || rs.g.rows() == 0) {
    DensityMatrix rho = project_to_density(affine);
    const RealVector c = detail::to_coordinates(rs.basis, rho.matrix());
    return {std::move(rho), residual_of(c), dropped, 0};
  }

  DensityMatrix start = project_to_density(affine);
  RealVector x = detail::to_coordinates(rs.basis, start.matrix());
  if (!opts.refine) return {std::move(start), residual_of(x), dropped, 0};

  const double lipschitz = std::pow(Eigen::JacobiSVD<RealMatrix>(rs.g).singularValues()(0), 2);
  if (!(lipschitz > 0.0)) return {std::move(start), residual_of(x), dropped, 0};

  RealVector z = x;
  double momentum = 1.0;
  int it = 0;
  for (; it < opts.max_iterations; ++it) {
    const RealVector grad = rs.g.transpose() * (rs.g * z - rs.b);
    const RealVector next = detail::to_coordinates(
        rs.basis, project_to_density(detail::from_coordinates(rs.basis, z - grad / lipschitz)).matrix());
    const RealVector delta = next - x;
    if (delta.norm() <= opts.tolerance) {
      x = next;
      break;
    }
    // gradient-based restart: drop momentum once it points uphill
    if ((z - next).dot(delta) > 0.0) momentum = 1.0;
    const double momentum_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    z = next + ((momentum - 1.0) / momentum_next) * delta;
    x = next;
    momentum = momentum_next;
  }
  DensityMatrix rho = project_to_density(detail::from_coordinates(rs.basis, x));
  return {std::move(rho), residual_of(x), dropped, it};
}

inline DensityMatrix estimate(const MeasurementWindow& w, const EstimatorOptions& opts = {}) {
  return estimate_detailed(w, opts).rho;
}

/// Online loop: push a record, refit, report the state at the record's
/// instant. With a propagator, window estimates are reference-frame states
/// (records satisfy y = Tr(op * rho_ref)) and are carried forward to the
/// record's step by the noise-free channel; without one, the window estimate
/// is reported as is.
class OnlineEstimator {
 public:
  explicit OnlineEstimator(std::size_t capacity, EstimatorOptions opts = {})
      : window_(capacity), opts_(opts) {}

  OnlineEstimator(std::size_t capacity, const KrausPair& propagator, EstimatorOptions opts = {})
      : window_(capacity), opts_(opts), transfer_(channel_superoperator(propagator)) {
    power_ = ComplexMatrix::Identity(transfer_->rows(), transfer_->cols());
  }

  DensityMatrix observe(MeasurementRecord r) {
    const int step = r.step;
    window_.push(std::move(r));
    auto result = estimate_detailed(window_, opts_);
    dropped_rows_ = result.dropped_rows;
    last_iterations_ = result.iterations;
    if (!transfer_) return std::move(result.rho);

    while (power_step_ < step) {
      power_ = (*transfer_) * power_;
      power_ /= power_.cwiseAbs().maxCoeff();
      ++power_step_;
    }
    const ComplexMatrix moved = devectorize(power_ * vectorize(result.rho.matrix()));
    const double tr = moved.trace().real();
    if (!(tr > 0.0)) throw NumericalError("OnlineEstimator: propagated estimate lost its trace");
    return project_to_density(moved / tr);
  }

  const MeasurementWindow& window() const { return window_; }
  int dropped_rows() const { return dropped_rows_; }
  int last_iterations() const { return last_iterations_; }

 private:
  MeasurementWindow window_;
  EstimatorOptions opts_;
  std::optional<ComplexMatrix> transfer_;
  ComplexMatrix power_;
  int power_step_ = 0;
  int dropped_rows_ = 0;
  int last_iterations_ = 0;
};

}  // namespace cwm
