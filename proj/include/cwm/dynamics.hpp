#pragma once

// Weak-measurement Kraus operators, their noisy perturbation, and the
// discrete-time evolution of the monitored state and of the measurement
// operator.

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "cwm/core/density.hpp"
#include "cwm/core/matrix.hpp"
#include "cwm/rng.hpp"

namespace cwm {

enum class PauliAxis { x, y, z };

inline ComplexMatrix pauli(PauliAxis axis) {
  switch (axis) {
    case PauliAxis::x: return pauli_x();
    case PauliAxis::y: return pauli_y();
    case PauliAxis::z: return pauli_z();
  }
  throw ConfigError("pauli: unknown axis");
}

/// L = strength * base, where base is a Pauli axis or an explicit matrix.
struct LindbladSpec {
  std::variant<PauliAxis, ComplexMatrix> base = PauliAxis::z;
  double strength = 0.3;

  ComplexMatrix matrix() const {
    ComplexMatrix b = std::holds_alternative<PauliAxis>(base) ? pauli(std::get<PauliAxis>(base))
                                                               : std::get<ComplexMatrix>(base);
    require_square(b, "LindbladSpec");
    ComplexMatrix l = strength * b;
    if (!is_finite(l)) throw ConfigError("LindbladSpec: non-finite Lindblad operator");
    return l;
  }
};

/// H = -(omega0 / 2) sigma_z - u_x sigma_x  (hbar = 1).
struct HamiltonianSpec {
  double omega0 = 1.0;
  double ux = 0.0;
};

inline ComplexMatrix build_hamiltonian(const HamiltonianSpec& spec) {
  return -0.5 * spec.omega0 * pauli_z() - spec.ux * pauli_x();
}

struct KrausPair {
  ComplexMatrix m0;
  ComplexMatrix m1;
};

struct NoisyPair {
  ComplexMatrix a0;
  ComplexMatrix a1;
};

/// The generator K = L^dagger L / 2 + i H, so that M0 = I - K dt.
inline ComplexMatrix weak_generator(const ComplexMatrix& h, const ComplexMatrix& l) {
  return 0.5 * l.adjoint() * l + kI * h;
}

/// M0 = I - (L^dagger L / 2 + i H) dt,  M1 = L sqrt(dt).
inline KrausPair build_weak_ops(const ComplexMatrix& h, const ComplexMatrix& l, double dt) {
  require_square(h, "build_weak_ops");
  require_same_dim(h, l, "build_weak_ops");
  if (!(dt > 0.0) || !std::isfinite(dt))
    throw ConfigError("build_weak_ops: dt must be > 0, got " + std::to_string(dt));
  const double scale = std::max(1.0, h.norm());
  if (hermiticity_defect(h) > 1e-10 * scale) throw ConfigError("build_weak_ops: H is not Hermitian");
  const ComplexMatrix k = weak_generator(h, l);
  const double step_norm = Eigen::JacobiSVD<ComplexMatrix>(k * dt).singularValues()(0);
  if (!(step_norm < 1.0))
    throw ConfigError("build_weak_ops: spectral norm ||(L^dagger L/2 + iH) dt|| = " +
                      std::to_string(step_norm) + " must be < 1; reduce dt");
  const auto d = h.rows();
  return {identity(d) - k * dt, l * std::sqrt(dt)};
}

/// || M0^dagger M0 + M1^dagger M1 - I ||_F.
inline double completeness_defect(const KrausPair& kp) {
  const auto d = kp.m0.rows();
  return (kp.m0.adjoint() * kp.m0 + kp.m1.adjoint() * kp.m1 - identity(d)).norm();
}

enum class NoiseMode { scalar_wiener, matrix_randn };

struct NoiseModel {
  NoiseMode mode = NoiseMode::matrix_randn;
  double sigma = 0.02;  // matrix mode only
  double eta = 0.5;
};

/// A scalar Wiener increment or a real d x d noise matrix.
using NoiseDraw = std::variant<double, RealMatrix>;

/// Scalar mode: one Normal(0, dt) draw. Matrix mode: d x d independent
/// Normal(0, sigma^2) draws, filled column-major.
inline NoiseDraw sample_noise(GaussianSource& rng, const NoiseModel& model, double dt, Eigen::Index d) {
  if (model.mode == NoiseMode::scalar_wiener) return rng.normal(0.0, std::sqrt(dt));
  RealMatrix dw(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) dw(i, j) = model.sigma * rng.standard_normal();
  return dw;
}

/// A_i = M_i + sqrt(eta) L dW, one draw shared by both elements. Matrix
/// noise enters through the matrix product L * dW.
inline NoisyPair noisy_ops(const KrausPair& kp, const ComplexMatrix& l, double eta, const NoiseDraw& dw) {
  if (!(eta > 0.0 && eta <= 1.0))
    throw ConfigError("noisy_ops: eta must lie in (0, 1], got " + std::to_string(eta));
  ComplexMatrix kick;
  if (const auto* w = std::get_if<double>(&dw)) {
    kick = std::sqrt(eta) * (*w) * l;
  } else {
    const auto& m = std::get<RealMatrix>(dw);
    if (m.rows() != l.rows() || m.cols() != l.cols())
      throw ConfigError("noisy_ops: noise matrix dimension does not match L");
    kick = std::sqrt(eta) * (l * m.cast<Complex>());
  }
  return {kp.m0 + kick, kp.m1 + kick};
}

/// rho' = A0 rho A0^dagger + A1 rho A1^dagger, renormalized to unit trace.
inline DensityMatrix step_state(const DensityMatrix& rho, const NoisyPair& np) {
  require_same_dim(np.a0, rho.matrix(), "step_state");
  require_same_dim(np.a1, rho.matrix(), "step_state");
  const ComplexMatrix& r = rho.matrix();
  ComplexMatrix next = np.a0 * r * np.a0.adjoint() + np.a1 * r * np.a1.adjoint();
  const double tr = next.trace().real();
  if (!(tr > 1e-12)) throw NumericalError("step_state: degenerate step, trace " + std::to_string(tr));
  next /= tr;
  return DensityMatrix(std::move(next));
}

/// Heisenberg update M' = M0^dagger M M0 + M1^dagger M M1 with the noise-free pair.
inline MeasurementOperator step_measurement_op(const MeasurementOperator& m, const KrausPair& kp) {
  require_same_dim(m, kp.m0, "step_measurement_op");
  return hermitize(kp.m0.adjoint() * m * kp.m0 + kp.m1.adjoint() * m * kp.m1);
}

/// Matrix S with vec(M0 X M0^dagger + M1 X M1^dagger) = S vec(X).
inline ComplexMatrix channel_superoperator(const KrausPair& kp) {
  const auto d = kp.m0.rows();
  ComplexMatrix s = ComplexMatrix::Zero(d * d, d * d);
  for (const ComplexMatrix* op : {&kp.m0, &kp.m1}) {
    const ComplexMatrix c = op->conjugate();
    for (Eigen::Index i = 0; i < d; ++i)
      for (Eigen::Index j = 0; j < d; ++j) s.block(i * d, j * d, d, d) += c(i, j) * (*op);
  }
  return s;
}

/// How each record's value is paired with its operator.
enum class RecordPairing {
  /// Readout y(t_l) = Tr(M_k(0) rho(t_l)); the record operator is the
  /// Heisenberg-evolved M_k(t_l), trace-normalized, so that noise-free
  /// records satisfy y = Tr(operator * rho(0)) and the window determines
  /// one reference-frame state.
  heisenberg,
  /// y(t_l) = Tr(M_k(t_l) rho(t_l)) with the raw Heisenberg operator.
  same_instant,
};

struct DynamicsSpec {
  ComplexMatrix hamiltonian;
  ComplexMatrix lindblad;
  double dt = 0.1;
  int steps = 200;
  NoiseModel noise;
  DensityMatrix rho0 = DensityMatrix::maximally_mixed(2);
  MeasurementOperator initial_operator = pauli_z();
  std::uint64_t seed = 1;
  RecordPairing pairing = RecordPairing::heisenberg;
  double readout_sigma = 0.0;
};

struct TrajectoryPoint {
  int step = 0;
  double t = 0.0;
  DensityMatrix rho;
  MeasurementOperator op;         // M_k(t) exactly as the Heisenberg recursion gives it
  MeasurementOperator record_op;  // the operator paired with y in the estimator window
  double y = 0.0;
};

using Trajectory = std::vector<TrajectoryPoint>;

/// Runs `spec.steps` steps. Each instant is recorded before it is advanced,
/// so point l holds rho(t_l), M_k(t_l) and the record taken at t_l.
inline Trajectory simulate(const DynamicsSpec& spec) {
  if (spec.steps < 0) throw ConfigError("simulate: steps must be >= 0");
  const auto d = spec.rho0.dim();
  require_same_dim(spec.hamiltonian, spec.rho0.matrix(), "simulate (hamiltonian)");
  require_same_dim(spec.lindblad, spec.rho0.matrix(), "simulate (lindblad)");
  require_same_dim(spec.initial_operator, spec.rho0.matrix(), "simulate (initial operator)");
  if (!is_hermitian(spec.initial_operator)) throw ConfigError("simulate: initial operator is not Hermitian");
  if (spec.readout_sigma < 0.0) throw ConfigError("simulate: readout_sigma must be >= 0");

  const KrausPair kp = build_weak_ops(spec.hamiltonian, spec.lindblad, spec.dt);
  GaussianSource rng(spec.seed);
  GaussianSource readout_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);

  Trajectory out;
  out.reserve(static_cast<std::size_t>(spec.steps) + 1);
  DensityMatrix rho = spec.rho0;
  MeasurementOperator op = spec.initial_operator;
  // Heisenberg image of the identity; Tr(effect)/d normalizes record operators.
  ComplexMatrix effect = identity(d);

  for (int step = 0; step <= spec.steps; ++step) {
    try {
      TrajectoryPoint point{step, step * spec.dt, rho, op, op, 0.0};
      if (spec.pairing == RecordPairing::heisenberg) {
        point.record_op = op / (effect.trace().real() / static_cast<double>(d));
        point.y = expectation(spec.initial_operator, rho);
      } else {
        point.y = expectation(op, rho);
      }
      if (spec.readout_sigma > 0.0) point.y += readout_rng.normal(0.0, spec.readout_sigma);
      out.push_back(std::move(point));
      if (step == spec.steps) break;

      op = step_measurement_op(op, kp);
      effect = step_measurement_op(effect, kp);
      const NoiseDraw dw = sample_noise(rng, spec.noise, spec.dt, d);
      rho = step_state(rho, noisy_ops(kp, spec.lindblad, spec.noise.eta, dw));
    } catch (const NumericalError& e) {
      throw NumericalError("simulate: step " + std::to_string(step) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace cwm
