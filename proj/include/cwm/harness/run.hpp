#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <numeric>
#include <vector>

#include "cwm/core/density.hpp"
#include "cwm/dynamics.hpp"
#include "cwm/estimator.hpp"
#include "cwm/harness/config.hpp"

namespace cwm {

struct RunRow {
  int step = 0;
  double t = 0.0;
  double y = 0.0;
  double fidelity = 0.0;
  BlochVector truth;
  BlochVector estimate;
};

struct RunSummary {
  int k0 = 3;                 // first step included in the summary statistics
  double mean_fidelity = 0.0; // over steps >= k0
  double min_fidelity = 0.0;  // over steps >= k0
  double transient_mean_fidelity = 0.0;  // over steps < k0
  int dropped_rows = 0;       // max all-zero sampling rows dropped in any estimate
  std::uint64_t seed = 0;
};

struct RunResult {
  SimulationConfig config;
  std::vector<RunRow> rows;
  RunSummary summary;
};

/// Mean fidelity over rows with step >= first_step.
inline double mean_fidelity_from(const std::vector<RunRow>& rows, int first_step) {
  double sum = 0.0;
  int n = 0;
  for (const auto& r : rows)
    if (r.step >= first_step) {
      sum += r.fidelity;
      ++n;
    }
  return n == 0 ? std::numeric_limits<double>::quiet_NaN() : sum / n;
}

/// Summary statistics for `rows` with the transient cutoff k0.
inline RunSummary summarize(const std::vector<RunRow>& rows, std::uint64_t seed, int k0 = 3) {
  RunSummary s;
  s.k0 = k0;
  s.seed = seed;
  s.mean_fidelity = mean_fidelity_from(rows, k0);
  double lo = std::numeric_limits<double>::quiet_NaN();
  double transient = 0.0;
  int nt = 0;
  for (const auto& r : rows) {
    if (r.step >= k0)
      lo = std::isnan(lo) ? r.fidelity : std::min(lo, r.fidelity);
    else {
      transient += r.fidelity;
      ++nt;
    }
  }
  s.min_fidelity = lo;
  s.transient_mean_fidelity = nt == 0 ? std::numeric_limits<double>::quiet_NaN() : transient / nt;
  return s;
}

/// Simulates the configured system and estimates its state online at every step.
inline RunResult run_case(const SimulationConfig& cfg) {
  const DynamicsSpec spec = to_dynamics(cfg);
  const Trajectory traj = simulate(spec);

  EstimatorOptions opts;
  opts.refine = cfg.refine;
  OnlineEstimator tracker = cfg.pairing == RecordPairing::heisenberg
                                ? OnlineEstimator(cfg.window, build_weak_ops(spec.hamiltonian, spec.lindblad, spec.dt), opts)
                                : OnlineEstimator(cfg.window, opts);

  RunResult result{cfg, {}, {}};
  result.rows.reserve(traj.size());
  int dropped = 0;
  for (const auto& p : traj) {
    DensityMatrix rho_hat = [&] {
      try {
        return tracker.observe({p.step, p.t, p.record_op, p.y});
      } catch (const NumericalError& e) {
        throw NumericalError("run_case: estimate at step " + std::to_string(p.step) + ": " + e.what());
      }
    }();
    dropped = std::max(dropped, tracker.dropped_rows());
    result.rows.push_back(
        {p.step, p.t, p.y, fidelity(rho_hat, p.rho), bloch_from_density(p.rho), bloch_from_density(rho_hat)});
  }
  result.summary = summarize(result.rows, cfg.seed);
  result.summary.dropped_rows = dropped;
  return result;
}

/// Runs one case per seed, concurrently. Results are in seed order.
inline std::vector<RunResult> run_seeds(const SimulationConfig& base, const std::vector<std::uint64_t>& seeds) {
  std::vector<std::future<RunResult>> jobs;
  jobs.reserve(seeds.size());
  for (const auto seed : seeds) {
    SimulationConfig cfg = base;
    cfg.seed = seed;
    jobs.push_back(std::async(std::launch::async, [cfg] { return run_case(cfg); }));
  }
  std::vector<RunResult> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

struct SweepRow {
  double sigma = 0.0;
  double mean_fidelity = 0.0;  // mean over seeds of each run's summary mean
  double std_fidelity = 0.0;   // sample standard deviation over seeds
  int runs = 0;
};

inline SweepRow aggregate(double sigma, const std::vector<RunResult>& runs) {
  SweepRow row{sigma, 0.0, 0.0, static_cast<int>(runs.size())};
  for (const auto& r : runs) row.mean_fidelity += r.summary.mean_fidelity;
  row.mean_fidelity /= static_cast<double>(runs.size());
  if (runs.size() > 1) {
    double ss = 0.0;
    for (const auto& r : runs) ss += std::pow(r.summary.mean_fidelity - row.mean_fidelity, 2);
    row.std_fidelity = std::sqrt(ss / static_cast<double>(runs.size() - 1));
  }
  return row;
}

inline std::vector<SweepRow> noise_sweep(const SimulationConfig& base, const std::vector<double>& sigmas,
                                         const std::vector<std::uint64_t>& seeds) {
  if (sigmas.empty() || seeds.empty()) throw ConfigError("noise_sweep: sigma and seed lists must be nonempty");
  std::vector<SweepRow> table;
  for (const double sigma : sigmas) {
    if (!(sigma >= 0.0)) throw ConfigError("noise_sweep: sigma must be >= 0");
    SimulationConfig cfg = base;
    cfg.sigma = sigma;
    table.push_back(aggregate(sigma, run_seeds(cfg, seeds)));
  }
  return table;
}

}  // namespace cwm
