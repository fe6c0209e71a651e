// SPDX-License-Identifier: Apache-2.0
//
// sgdice: solve climate-policy portfolios and write CSV tables.
//
//   sgdice run --manifest FILE            batch run from a manifest
//   sgdice run --default --output-dir DIR the published experiment set
//   sgdice optimize --name NAME [flags]   one scenario, flags mirror the config
//   sgdice sweep-sg --scenario NAME       scale the SG path of a solved scenario
//   sgdice validate-params [--params F]   load, convert and report a calibration
//
// Exit codes: 0 success, 2 validation, 3 convergence, 4 I/O.
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "sgdice/sgdice.hpp"

namespace {

using namespace sgdice;

const std::string kDefaultParams = SGDICE_DATA_DIR "/dice2016r2.json";

ParamBundle load_bundle(const std::string& path) { return load_params(path).bundle; }

int exit_code(ExitCode c) { return static_cast<int>(c); }

void print_report(const RunReport& r, const fs::path& out) {
  for (const auto& s : r.scenarios) {
    if (s.status == ExitCode::Success) {
      const auto& sol = *s.solution;
      std::printf("%-22s %s  converged  |pg| %.2e  %s\n", s.name.c_str(), to_string(sol.config.mode),
                  sol.diagnostics.gradient_norm, sol.feasible ? "feasible" : "INFEASIBLE");
    } else {
      std::printf("%-22s FAILED (%d): %s\n", s.name.c_str(), exit_code(s.status), s.message.c_str());
    }
  }
  std::printf("outputs in %s\n", out.string().c_str());
}

struct ScenarioFlags {
  ScenarioConfig cfg;
  std::string mode = "cba";
  std::string sensitivity;
  std::optional<double> time_preference;
  std::optional<double> damage_multiplier;
  std::optional<int> sg_damage_exponent;
  std::optional<double> sg_damage_multiplier;

  void add(CLI::App* app) {
    app->add_option("--name", cfg.name, "Scenario name (output subdirectory)")->required();
    app->add_flag("--allow-cdr", cfg.allow_cdr, "Allow mu above 1 (net removal)");
    app->add_flag("--allow-sg", cfg.allow_sg, "Allow solar geoengineering");
    app->add_option("--mode", mode, "cba or cea")->check(CLI::IsMember({"cba", "cea"}));
    app->add_option("--t-cap", cfg.t_cap, "Temperature cap for cea (degrees C)");
    app->add_flag("--baseline-mode", cfg.baseline_mode, "Pin mu at the baseline level");
    app->add_option("--terminal-years", cfg.terminal_years, "Post-horizon years valued at final utility");
    app->add_option("--fixed-savings-years", cfg.fixed_savings_years, "Trailing years at steady-state savings");
    app->add_option("--sensitivity", sensitivity, "Named override set: default, S1..S6");
    app->add_option("--time-preference", time_preference, "Pure rate of time preference per year");
    app->add_option("--damage-multiplier", damage_multiplier, "Climate damage coefficient multiplier");
    app->add_option("--sg-damage-exponent", sg_damage_exponent, "SG side-effect exponent (1 or 2)");
    app->add_option("--sg-damage-multiplier", sg_damage_multiplier, "SG side-effect coefficient multiplier");
  }

  ScenarioConfig resolve() const {
    ScenarioConfig c = cfg;
    c.mode = mode == "cea" ? Mode::Cea : Mode::Cba;
    if (!sensitivity.empty()) {
      const auto o = sensitivity_overrides(sensitivity);
      if (!o) throw ValidationError("--sensitivity", "unknown set '" + sensitivity + "'");
      c.overrides = *o;
    }
    if (time_preference) c.overrides.time_preference = *time_preference;
    if (damage_multiplier) c.overrides.damage_multiplier = *damage_multiplier;
    if (sg_damage_exponent) c.overrides.sg_damage_exponent = *sg_damage_exponent;
    if (sg_damage_multiplier) c.overrides.sg_damage_multiplier = *sg_damage_multiplier;
    validate(c);
    return c;
  }
};

std::vector<double> parse_scales(const std::string& list, double from, double to, double step) {
  std::vector<double> out;
  if (!list.empty()) {
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        out.push_back(std::stod(item, &used));
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::exception&) {
        throw ValidationError("--scales", "'" + item + "' is not a number");
      }
    }
    return out;
  }
  if (!(step > 0.0) || to < from) throw ValidationError("--step", "need step > 0 and to >= from");
  const auto n = static_cast<long>(std::floor((to - from) / step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(from + static_cast<double>(k) * step);
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Climate-economy portfolio optimiser with carbon removal and solar geoengineering"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Solve every scenario of a manifest");
  std::string manifest_path, output_dir, params_path = kDefaultParams;
  bool use_default = false;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  run->add_option("--manifest", manifest_path, "Manifest file (JSON)");
  run->add_flag("--default", use_default, "Use the built-in experiment set");
  run->add_option("--output-dir", output_dir, "Override the manifest's output directory");
  run->add_option("--params", params_path, "Parameter file (overrides the manifest's)");
  run->add_option("--jobs", jobs, "Scenarios solved concurrently");
  run->add_option("--seed", seed, "Multi-start seed");

  // optimize
  auto* opt = app.add_subcommand("optimize", "Solve one scenario given by flags");
  ScenarioFlags flags;
  flags.add(opt);
  std::string opt_out = "out", opt_params = kDefaultParams;
  std::uint64_t opt_seed = SolverOptions{}.seed;
  int opt_starts = SolverOptions{}.random_starts;
  opt->add_option("--output-dir", opt_out, "Output directory");
  opt->add_option("--params", opt_params, "Parameter file");
  opt->add_option("--seed", opt_seed, "Multi-start seed");
  opt->add_option("--random-starts", opt_starts, "Random starts besides the deterministic one");

  // sweep-sg
  auto* sweep = app.add_subcommand("sweep-sg", "Scale the SG path of a solved scenario");
  std::string sweep_scenario = "mitigation_sg", sweep_manifest, sweep_out = "sweep_sg.csv",
              sweep_params = kDefaultParams, scales;
  double from = 0.0, to = 2.0, step = 0.05;
  int year = 2050;
  sweep->add_option("--scenario", sweep_scenario, "Scenario name in the manifest");
  sweep->add_option("--manifest", sweep_manifest, "Manifest file; built-in set if omitted");
  sweep->add_option("--scales", scales, "Comma-separated scales (overrides --from/--to/--step)");
  sweep->add_option("--from", from, "First scale");
  sweep->add_option("--to", to, "Last scale");
  sweep->add_option("--step", step, "Scale increment");
  sweep->add_option("--year", year, "Year for the side-effect / avoided-damage decomposition");
  sweep->add_option("--output", sweep_out, "CSV file to write");
  sweep->add_option("--params", sweep_params, "Parameter file");

  // validate-params
  auto* vp = app.add_subcommand("validate-params", "Load a parameter file and report the conversion");
  std::string vp_params = kDefaultParams;
  vp->add_option("--params", vp_params, "Parameter file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ExitCode::Validation);
  }

  try {
    if (*run) {
      if (use_default == !manifest_path.empty())
        throw ValidationError("run", "give exactly one of --manifest or --default");
      RunManifest m = use_default ? default_manifest() : load_manifest(manifest_path);
      if (use_default && output_dir.empty()) output_dir = "out";
      if (!output_dir.empty()) m.output_dir = output_dir;
      if (jobs) m.jobs = *jobs;
      if (seed) m.seed = *seed;
      if (run->count("--params") || !m.params_path) m.params_path = params_path;
      validate(m);
      const RunReport r = run_manifest(m, load_bundle(m.params_path->string()));
      print_report(r, m.output_dir);
      return exit_code(r.status);
    }
    if (*opt) {
      RunManifest m;
      m.scenarios.push_back(flags.resolve());
      m.output_dir = opt_out;
      m.seed = opt_seed;
      m.random_starts = opt_starts;
      const RunReport r = run_manifest(m, load_bundle(opt_params));
      print_report(r, m.output_dir);
      return exit_code(r.status);
    }
    if (*sweep) {
      const RunManifest m = sweep_manifest.empty() ? default_manifest() : load_manifest(sweep_manifest);
      const auto it = std::find_if(m.scenarios.begin(), m.scenarios.end(),
                                   [&](const ScenarioConfig& c) { return c.name == sweep_scenario; });
      if (it == m.scenarios.end()) throw ValidationError("--scenario", "unknown scenario '" + sweep_scenario + "'");
      if (!it->allow_sg) throw ValidationError("--scenario", "'" + sweep_scenario + "' does not use SG");
      const auto values = parse_scales(scales, from, to, step);
      const ParamBundle params = load_bundle(sweep_params);
      const SolverOptions so = solver_options(m);
      const Solution sol = optimize(params, *it, so);
      ScenarioConfig bc = make_config(Portfolio::Baseline, "baseline");
      bc.overrides = it->overrides;
      const Solution base = optimize(params, bc, so);
      write_atomic(sweep_out, sweep_csv(sweep_sg_scale(sol, base, values, year), year, m.seed));
      std::printf("wrote %zu rows to %s\n", values.size(), sweep_out.c_str());
      return 0;
    }
    if (*vp) {
      const LoadedParams lp = load_params(vp_params);
      const auto& r = lp.report;
      std::printf("%s: horizon %zu years from %d\n", lp.bundle.name.c_str(), lp.bundle.horizon(),
                  lp.bundle.paths.start_year);
      std::printf("source step %d years\n", r.source_step_years);
      std::printf("carbon cycle: %s, residual %.3e\n",
                  r.carbon_method == CarbonFitMethod::PrincipalRoot ? "principal root" : "least-squares fit",
                  r.carbon_residual);
      std::printf("temperature: baseline node deviation %.4f C (before refit %.4f C)%s\n",
                  r.temperature.max_deviation_after, r.temperature.max_deviation_before,
                  r.temperature.refit ? ", refit" : "");
      std::printf("depreciation %.6f per year\n", lp.bundle.econ.depreciation);
      return 0;
    }
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(e.exit_code());
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(ExitCode::Io);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code(ExitCode::Validation);
  }
  return 0;
}
