#pragma once

// CSV / JSON output for runs and sweeps. Floats carry 12 significant digits.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cwm/harness/config.hpp"
#include "cwm/harness/run.hpp"

namespace cwm {

enum class OutputFormat { csv, json };

inline OutputFormat parse_format(const std::string& s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "json") return OutputFormat::json;
  throw ConfigError("format: expected csv|json, got '" + s + "'");
}

inline std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline double round_significant(double v) {
  return std::isfinite(v) ? std::strtod(format_float(v).c_str(), nullptr) : v;
}

inline const char* csv_header() { return "step,t,y,fidelity,tx,ty,tz,ex,ey,ez"; }

inline std::string to_csv(const RunResult& result) {
  std::ostringstream os;
  os << csv_header() << '\n';
  for (const auto& r : result.rows) {
    os << r.step;
    for (const double v : {r.t, r.y, r.fidelity, r.truth.x, r.truth.y, r.truth.z, r.estimate.x, r.estimate.y,
                           r.estimate.z})
      os << ',' << format_float(v);
    os << '\n';
  }
  return os.str();
}

namespace detail {

inline nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(round_significant(v)) : nlohmann::json(nullptr);
}

inline double number_from(const nlohmann::json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

inline bool is_textual_key(const std::string& key) {
  return key == "lindblad" || key == "m0" || key == "noise" || key == "pairing" || key == "solver";
}

}  // namespace detail

inline nlohmann::json to_json(const RunResult& result) {
  using nlohmann::json;
  json config = json::object();
  for (const auto& [key, value] : config_settings(result.config)) {
    if (detail::is_textual_key(key))
      config[key] = value;
    else if (key == "seed")
      config[key] = result.config.seed;
    else if (key == "case" || key == "steps" || key == "window")
      config[key] = std::stoll(value);
    else
      config[key] = round_significant(std::stod(value));
  }
  json rows = json::array();
  for (const auto& r : result.rows) {
    rows.push_back({{"step", r.step},
                    {"t", detail::number_or_null(r.t)},
                    {"y", detail::number_or_null(r.y)},
                    {"fidelity", detail::number_or_null(r.fidelity)},
                    {"tx", detail::number_or_null(r.truth.x)},
                    {"ty", detail::number_or_null(r.truth.y)},
                    {"tz", detail::number_or_null(r.truth.z)},
                    {"ex", detail::number_or_null(r.estimate.x)},
                    {"ey", detail::number_or_null(r.estimate.y)},
                    {"ez", detail::number_or_null(r.estimate.z)}});
  }
  const auto& s = result.summary;
  json summary = {{"k0", s.k0},
                  {"mean_fidelity", detail::number_or_null(s.mean_fidelity)},
                  {"min_fidelity", detail::number_or_null(s.min_fidelity)},
                  {"transient_mean_fidelity", detail::number_or_null(s.transient_mean_fidelity)},
                  {"dropped_rows", s.dropped_rows},
                  {"seed", s.seed}};
  return {{"config", config}, {"rows", rows}, {"summary", summary}};
}

inline RunResult run_result_from_json(const nlohmann::json& j) {
  RunResult out{SimulationConfig{}, {}, {}};
  try {
    Settings settings;
    for (const auto& [key, value] : j.at("config").items()) {
      if (value.is_string())
        settings[key] = value.get<std::string>();
      else if (value.is_number_unsigned() || value.is_number_integer())
        settings[key] = std::to_string(value.get<long long>());
      else
        settings[key] = format_float(value.get<double>());
    }
    if (const auto it = settings.find("seed"); it != settings.end())
      settings["seed"] = std::to_string(j.at("config").at("seed").get<std::uint64_t>());
    out.config = parse_config(settings);
    for (const auto& r : j.at("rows")) {
      RunRow row;
      row.step = r.at("step").get<int>();
      row.t = detail::number_from(r.at("t"));
      row.y = detail::number_from(r.at("y"));
      row.fidelity = detail::number_from(r.at("fidelity"));
      row.truth = {detail::number_from(r.at("tx")), detail::number_from(r.at("ty")), detail::number_from(r.at("tz"))};
      row.estimate = {detail::number_from(r.at("ex")), detail::number_from(r.at("ey")),
                      detail::number_from(r.at("ez"))};
      out.rows.push_back(row);
    }
    const auto& s = j.at("summary");
    out.summary.k0 = s.at("k0").get<int>();
    out.summary.mean_fidelity = detail::number_from(s.at("mean_fidelity"));
    out.summary.min_fidelity = detail::number_from(s.at("min_fidelity"));
    out.summary.transient_mean_fidelity = detail::number_from(s.at("transient_mean_fidelity"));
    out.summary.dropped_rows = s.at("dropped_rows").get<int>();
    out.summary.seed = s.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("run result JSON: ") + e.what());
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error("write to '" + path + "' failed");
}

inline void emit(const RunResult& result, OutputFormat format, const std::string& path) {
  write_text(path, format == OutputFormat::csv ? to_csv(result) : to_json(result).dump(2) + "\n");
}

inline std::string sweep_to_csv(const std::vector<SweepRow>& table) {
  std::ostringstream os;
  os << "sigma,mean_fidelity,std_fidelity,runs\n";
  for (const auto& r : table)
    os << format_float(r.sigma) << ',' << format_float(r.mean_fidelity) << ',' << format_float(r.std_fidelity)
       << ',' << r.runs << '\n';
  return os.str();
}

}  // namespace cwm
