#pragma once

// Experiment configuration: defaults, the two spin-1/2 case presets, and
// parsing from a flat key-value file and/or command-line settings.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <cstdio>

#include "cwm/core/density.hpp"
#include "cwm/dynamics.hpp"
#include "cwm/estimator.hpp"

namespace cwm {

/// The spin-1/2 initial state with Bloch vector (-sqrt(3)/2, 0, 1/2).
inline DensityMatrix default_initial_state() {
  const double s = std::sqrt(3.0) / 4.0;
  ComplexMatrix m(2, 2);
  m << 0.75, -s, -s, 0.25;
  return DensityMatrix(m);
}

struct SimulationConfig {
  int case_id = 2;
  double dt = 0.1;
  int steps = 200;
  double xi = 0.3;
  double eta = 0.5;
  NoiseMode noise_mode = NoiseMode::matrix_randn;
  double sigma = 0.02;
  double ux = 2.0;
  double omega0 = 1.0;
  PauliAxis lindblad = PauliAxis::z;
  PauliAxis initial_operator = PauliAxis::z;
  std::size_t window = 200;
  std::uint64_t seed = 1;
  RecordPairing pairing = RecordPairing::heisenberg;
  double readout_sigma = 0.0;
  bool refine = true;
  DensityMatrix rho0 = default_initial_state();

  static constexpr Eigen::Index dim = 2;
};

/// Case 1: no control, L along sigma_x. Case 2: u_x = 2, L along sigma_z.
inline void apply_case(SimulationConfig& cfg, int case_id) {
  if (case_id == 1) {
    cfg.ux = 0.0;
    cfg.lindblad = PauliAxis::x;
  } else if (case_id == 2) {
    cfg.ux = 2.0;
    cfg.lindblad = PauliAxis::z;
  } else {
    throw ConfigError("case: must be 1 or 2, got " + std::to_string(case_id));
  }
  cfg.case_id = case_id;
  cfg.xi = 0.3;
  cfg.initial_operator = PauliAxis::z;
}

inline SimulationConfig case_config(int case_id) {
  SimulationConfig cfg;
  apply_case(cfg, case_id);
  return cfg;
}

namespace detail {

inline double parse_double(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(key + ": '" + text + "' is not a number");
  }
  if (used != text.size() || !std::isfinite(v)) throw ConfigError(key + ": '" + text + "' is not a finite number");
  return v;
}

inline long long parse_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": '" + text + "' is not an integer");
  return v;
}

inline std::uint64_t parse_seed(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) throw ConfigError(key + ": '" + text + "' is not a non-negative integer");
  return v;
}

inline PauliAxis parse_axis(const std::string& key, const std::string& text) {
  if (text == "x") return PauliAxis::x;
  if (text == "y") return PauliAxis::y;
  if (text == "z") return PauliAxis::z;
  throw ConfigError(key + ": expected one of x|y|z, got '" + text + "'");
}

inline const char* axis_name(PauliAxis a) {
  switch (a) {
    case PauliAxis::x: return "x";
    case PauliAxis::y: return "y";
    case PauliAxis::z: return "z";
  }
  return "?";
}

inline void require(bool ok, const std::string& key, const std::string& bound, double got) {
  if (!ok) {
    std::ostringstream os;
    os << key << ": value " << got << " out of range (must be " << bound << ")";
    throw ConfigError(os.str());
  }
}

}  // namespace detail

/// Keys accepted in config files and as CLI flags (without the leading --).
inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {
      "case",  "seed",   "steps",   "sigma", "eta",    "ux",      "xi",
      "lindblad", "window", "dt",   "omega0", "noise", "pairing", "readout-sigma",
      "solver", "m0"};
  return keys;
}

/// Applies one textual setting, validating its range.
inline void apply_setting(SimulationConfig& cfg, const std::string& key, const std::string& value) {
  using namespace detail;
  if (key == "case") {
    apply_case(cfg, static_cast<int>(parse_integer(key, value)));
  } else if (key == "seed") {
    cfg.seed = parse_seed(key, value);
  } else if (key == "steps") {
    const auto v = parse_integer(key, value);
    require(v >= 0 && v <= 10'000'000, key, "in [0, 1e7]", static_cast<double>(v));
    cfg.steps = static_cast<int>(v);
  } else if (key == "sigma") {
    cfg.sigma = parse_double(key, value);
    require(cfg.sigma >= 0.0, key, ">= 0", cfg.sigma);
  } else if (key == "eta") {
    cfg.eta = parse_double(key, value);
    require(cfg.eta > 0.0 && cfg.eta <= 1.0, key, "in (0, 1]", cfg.eta);
  } else if (key == "ux") {
    cfg.ux = parse_double(key, value);
    require(cfg.ux >= 0.0, key, ">= 0", cfg.ux);
  } else if (key == "xi") {
    cfg.xi = parse_double(key, value);
    require(cfg.xi >= 0.0, key, ">= 0", cfg.xi);
  } else if (key == "lindblad") {
    cfg.lindblad = parse_axis(key, value);
  } else if (key == "m0") {
    cfg.initial_operator = parse_axis(key, value);
  } else if (key == "window") {
    const auto v = parse_integer(key, value);
    require(v >= 1, key, ">= 1", static_cast<double>(v));
    cfg.window = static_cast<std::size_t>(v);
  } else if (key == "dt") {
    cfg.dt = parse_double(key, value);
    require(cfg.dt > 0.0, key, "> 0", cfg.dt);
  } else if (key == "omega0") {
    cfg.omega0 = parse_double(key, value);
  } else if (key == "noise") {
    if (value == "matrix")
      cfg.noise_mode = NoiseMode::matrix_randn;
    else if (value == "scalar")
      cfg.noise_mode = NoiseMode::scalar_wiener;
    else
      throw ConfigError("noise: expected matrix|scalar, got '" + value + "'");
  } else if (key == "pairing") {
    if (value == "heisenberg")
      cfg.pairing = RecordPairing::heisenberg;
    else if (value == "same-instant")
      cfg.pairing = RecordPairing::same_instant;
    else
      throw ConfigError("pairing: expected heisenberg|same-instant, got '" + value + "'");
  } else if (key == "readout-sigma") {
    cfg.readout_sigma = parse_double(key, value);
    require(cfg.readout_sigma >= 0.0, key, ">= 0", cfg.readout_sigma);
  } else if (key == "solver") {
    if (value == "constrained")
      cfg.refine = true;
    else if (value == "two-step")
      cfg.refine = false;
    else
      throw ConfigError("solver: expected constrained|two-step, got '" + value + "'");
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
}

using Settings = std::map<std::string, std::string>;

/// Reads `key = value` (or `key value`) lines; '#' starts a comment.
inline Settings read_settings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Settings out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    for (char& ch : line)
      if (ch == '=') ch = ' ';
    std::istringstream fields(line);
    std::string key, value, extra;
    if (!(fields >> key)) continue;
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    if (!(fields >> value) || (fields >> extra))
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
    out[key] = value;
  }
  return out;
}

/// Builds a config from merged settings. `case` is applied first so that
/// explicit settings override the preset regardless of order.
inline SimulationConfig parse_config(const Settings& settings) {
  SimulationConfig cfg;
  if (const auto it = settings.find("case"); it != settings.end()) apply_setting(cfg, "case", it->second);
  for (const auto& [key, value] : settings)
    if (key != "case") apply_setting(cfg, key, value);
  return cfg;
}

/// File settings first, then `overrides` (e.g. CLI flags) on top.
inline SimulationConfig parse_config(const std::string& path, const Settings& overrides = {}) {
  Settings merged = path.empty() ? Settings{} : read_settings_file(path);
  for (const auto& [k, v] : overrides) merged[k] = v;
  return parse_config(merged);
}

/// Every field that influences results, in settings form.
inline Settings config_settings(const SimulationConfig& cfg) {
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  return {
      {"case", std::to_string(cfg.case_id)},
      {"seed", std::to_string(cfg.seed)},
      {"steps", std::to_string(cfg.steps)},
      {"sigma", num(cfg.sigma)},
      {"eta", num(cfg.eta)},
      {"ux", num(cfg.ux)},
      {"xi", num(cfg.xi)},
      {"lindblad", detail::axis_name(cfg.lindblad)},
      {"m0", detail::axis_name(cfg.initial_operator)},
      {"window", std::to_string(cfg.window)},
      {"dt", num(cfg.dt)},
      {"omega0", num(cfg.omega0)},
      {"noise", cfg.noise_mode == NoiseMode::matrix_randn ? "matrix" : "scalar"},
      {"pairing", cfg.pairing == RecordPairing::heisenberg ? "heisenberg" : "same-instant"},
      {"readout-sigma", num(cfg.readout_sigma)},
      {"solver", cfg.refine ? "constrained" : "two-step"},
  };
}

inline DynamicsSpec to_dynamics(const SimulationConfig& cfg) {
  DynamicsSpec spec;
  spec.hamiltonian = build_hamiltonian({cfg.omega0, cfg.ux});
  spec.lindblad = LindbladSpec{cfg.lindblad, cfg.xi}.matrix();
  spec.dt = cfg.dt;
  spec.steps = cfg.steps;
  spec.noise = {cfg.noise_mode, cfg.sigma, cfg.eta};
  spec.rho0 = cfg.rho0;
  spec.initial_operator = pauli(cfg.initial_operator);
  spec.seed = cfg.seed;
  spec.pairing = cfg.pairing;
  spec.readout_sigma = cfg.readout_sigma;
  return spec;
}

}  // namespace cwm
