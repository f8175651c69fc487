// Command-line front end: single runs, noise sweeps and the figure presets.
//
//   cwm run --case 2 --seed 7 --out run.csv
//   cwm sweep --sigmas 0,0.02,0.04 --seeds 1..20 --out sweep.csv
//   cwm figure3 --out-dir out/
//   cwm figure4 --out-dir out/

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cwm/cwm.hpp"

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;

/// Registers every config key as a string-valued flag.
void add_config_flags(CLI::App& cmd, std::map<std::string, std::string>& values, std::string& config_file) {
  for (const auto& key : cwm::config_keys()) cmd.add_option("--" + key, values[key]);
  cmd.add_option("--config", config_file, "flat key = value file; flags override it");
}

cwm::SimulationConfig collect(CLI::App& cmd, const std::map<std::string, std::string>& values,
                              const std::string& config_file) {
  cwm::Settings given;
  for (const auto& key : cwm::config_keys())
    if (cmd.count("--" + key) > 0) given[key] = values.at(key);
  return cwm::parse_config(config_file, given);
}

std::vector<double> parse_sigmas(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    cwm::SimulationConfig probe;
    cwm::apply_setting(probe, "sigma", item);
    out.push_back(probe.sigma);
  }
  if (out.empty()) throw cwm::ConfigError("sigmas: empty list");
  return out;
}

/// "1..20" or "1,2,5".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = cwm::detail::parse_seed("seeds", text.substr(0, dots));
    const auto hi = cwm::detail::parse_seed("seeds", text.substr(dots + 2));
    if (hi < lo) throw cwm::ConfigError("seeds: empty range '" + text + "'");
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(cwm::detail::parse_seed("seeds", item));
  }
  if (out.empty()) throw cwm::ConfigError("seeds: empty list");
  return out;
}

void print_summary(const cwm::RunResult& r) {
  const auto& s = r.summary;
  std::cout << "config:";
  for (const auto& [k, v] : cwm::config_settings(r.config)) std::cout << ' ' << k << '=' << v;
  std::cout << "\nmean_fidelity(step>=" << s.k0 << ")=" << cwm::format_float(s.mean_fidelity)
            << " min_fidelity=" << cwm::format_float(s.min_fidelity)
            << " transient_mean=" << cwm::format_float(s.transient_mean_fidelity)
            << " dropped_rows=" << s.dropped_rows << '\n';
}

std::string join(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online state estimation from continuous weak measurement records"};
  app.require_subcommand(1);

  std::map<std::string, std::string> run_values, sweep_values, fig_values;
  std::string run_config, sweep_config, fig_config;

  auto* run = app.add_subcommand("run", "simulate one case and estimate online");
  add_config_flags(*run, run_values, run_config);
  std::string run_out, run_format = "csv";
  run->add_option("--out", run_out, "output path (omit to print the summary only)");
  run->add_option("--format", run_format, "csv|json")->check(CLI::IsMember({"csv", "json"}));

  auto* sweep = app.add_subcommand("sweep", "mean +- std of run fidelity across noise levels and seeds");
  add_config_flags(*sweep, sweep_values, sweep_config);
  std::string sigmas_text = "0,0.02,0.04", seeds_text = "1..20", sweep_out;
  sweep->add_option("--sigmas", sigmas_text);
  sweep->add_option("--seeds", seeds_text);
  sweep->add_option("--out", sweep_out);

  auto* fig3 = app.add_subcommand("figure3", "Bloch trajectories of both cases (figure3a.csv, figure3b.csv)");
  auto* fig4 = app.add_subcommand("figure4", "fidelity curves (figure4a.csv, figure4b.csv, figure4b_summary.csv)");
  std::string out_dir = ".";
  std::string fig_seeds_text = "1..20";
  std::uint64_t fig_seed = 1;
  for (auto* cmd : {fig3, fig4}) {
    cmd->add_option("--out-dir", out_dir);
    cmd->add_option("--seed", fig_seed, "seed for single-run curves");
  }
  fig4->add_option("--seeds", fig_seeds_text, "seeds for the noise-level ensemble");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (run->parsed()) {
      const auto cfg = collect(*run, run_values, run_config);
      const auto result = cwm::run_case(cfg);
      print_summary(result);
      if (!run_out.empty()) cwm::emit(result, cwm::parse_format(run_format), run_out);
    } else if (sweep->parsed()) {
      const auto cfg = collect(*sweep, sweep_values, sweep_config);
      const auto table = cwm::noise_sweep(cfg, parse_sigmas(sigmas_text), parse_seeds(seeds_text));
      const std::string csv = cwm::sweep_to_csv(table);
      std::cout << csv;
      if (!sweep_out.empty()) cwm::write_text(sweep_out, csv);
    } else if (fig3->parsed()) {
      std::filesystem::create_directories(out_dir);
      for (const int c : {1, 2}) {
        auto cfg = cwm::case_config(c);
        cfg.seed = fig_seed;
        const auto result = cwm::run_case(cfg);
        print_summary(result);
        cwm::emit(result, cwm::OutputFormat::csv, join(out_dir, c == 1 ? "figure3a.csv" : "figure3b.csv"));
      }
    } else if (fig4->parsed()) {
      std::filesystem::create_directories(out_dir);
      auto cfg = cwm::case_config(2);
      cfg.seed = fig_seed;
      const auto single = cwm::run_case(cfg);
      print_summary(single);
      cwm::emit(single, cwm::OutputFormat::csv, join(out_dir, "figure4a.csv"));

      const std::vector<double> levels = {0.0, 0.02, 0.04};
      const auto seeds = parse_seeds(fig_seeds_text);
      std::vector<std::vector<cwm::RunResult>> runs;
      std::vector<cwm::SweepRow> table;
      for (const double sigma : levels) {
        auto level_cfg = cwm::case_config(2);
        level_cfg.sigma = sigma;
        runs.push_back(cwm::run_seeds(level_cfg, seeds));
        table.push_back(cwm::aggregate(sigma, runs.back()));
      }
      std::ostringstream curve;
      curve << "step,t";
      for (const double sigma : levels) curve << ",fidelity_sigma_" << cwm::format_float(sigma);
      curve << '\n';
      const auto& ref = runs.front().front().rows;
      for (std::size_t i = 0; i < ref.size(); ++i) {
        curve << ref[i].step << ',' << cwm::format_float(ref[i].t);
        for (const auto& level : runs) {
          double sum = 0.0;
          for (const auto& r : level) sum += r.rows[i].fidelity;
          curve << ',' << cwm::format_float(sum / static_cast<double>(level.size()));
        }
        curve << '\n';
      }
      cwm::write_text(join(out_dir, "figure4b.csv"), curve.str());
      cwm::write_text(join(out_dir, "figure4b_summary.csv"), cwm::sweep_to_csv(table));
      std::cout << cwm::sweep_to_csv(table);
    }
  } catch (const cwm::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const cwm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
