// SPDX-License-Identifier: Apache-2.0
//
// Batch scenario runner: manifest parsing, CSV tables, run log.
//
// Manifest (JSON):
//
//   {
//     "output_dir":  "out",                 relative to the manifest file
//     "params":      "dice2016r2.json",     optional; default calibration otherwise
//     "seed":        20190601,              multi-start seed (optional)
//     "jobs":        1,                     scenarios solved concurrently (optional)
//     "tolerance":   {"kkt": 1e-6, "cap": 0.01, "random_starts": 3},   optional
//     "scenarios": [
//       {"name": "full", "allow_cdr": true, "allow_sg": true,
//        "mode": "cba", "t_cap": 2.0, "baseline_mode": false,
//        "sensitivity": "S1",                        optional, S1..S6
//        "overrides": {"time_preference": 0.03, "damage_multiplier": 1,
//                      "sg_damage_exponent": 2, "sg_damage_multiplier": 1},
//        "terminal_years": 100, "fixed_savings_years": 20}
//     ]
//   }
//
// Output layout under output_dir:
//
//   <scenario>/trajectory.csv   one row per year
//   <scenario>/summary.csv      one row
//   summary.csv                 all scenarios, manifest order
//   baselines/<name>/...        baselines solved for BGE and "% base"
//   run.log                     one JSON object per line with solver diagnostics
#pragma once

#include <atomic>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "sgdice/optimizer.hpp"
#include "sgdice/params_io.hpp"

namespace sgdice {

namespace fs = std::filesystem;

struct RunManifest {
  std::vector<ScenarioConfig> scenarios;
  fs::path output_dir = "out";
  std::optional<fs::path> params_path;
  std::uint64_t seed = SolverOptions{}.seed;
  int jobs = 1;
  std::optional<double> kkt_tolerance;
  std::optional<double> cap_tolerance;
  std::optional<int> random_starts;
};

inline SolverOptions solver_options(const RunManifest& m) {
  SolverOptions o;
  o.seed = m.seed;
  if (m.kkt_tolerance) o.kkt_tolerance = *m.kkt_tolerance;
  if (m.cap_tolerance) o.cap_tolerance = *m.cap_tolerance;
  if (m.random_starts) o.random_starts = *m.random_starts;
  return o;
}

inline void validate(const RunManifest& m) {
  using detail::require;
  require(!m.scenarios.empty(), "scenarios", "must not be empty");
  require(m.jobs >= 1, "jobs", "must be >= 1");
  if (m.kkt_tolerance) require(*m.kkt_tolerance > 0.0, "tolerance.kkt", "must be > 0");
  if (m.cap_tolerance) require(*m.cap_tolerance > 0.0, "tolerance.cap", "must be > 0");
  if (m.random_starts) require(*m.random_starts >= 0, "tolerance.random_starts", "must be >= 0");
  std::set<std::string> names;
  for (const auto& s : m.scenarios) {
    require(!s.name.empty(), "scenarios.name", "must not be empty");
    require(s.name.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-.") ==
                    std::string::npos && s.name != "." && s.name != ".." && s.name != "baselines",
            "scenarios.name", "'" + s.name + "' is not a valid file name");
    require(names.insert(s.name).second, "scenarios.name", "duplicate '" + s.name + "'");
    validate(s);
  }
}

namespace detail {

inline bool boolean_or(const nlohmann::json& j, const std::string& key, const std::string& path,
                       const JsonReader& rd, bool fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_boolean()) throw SchemaError("'" + path + key + "' must be true or false", rd.line_of_key(key));
  return j.at(key).get<bool>();
}

inline std::string string_or(const nlohmann::json& j, const std::string& key, const std::string& path,
                             const JsonReader& rd, std::string fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw SchemaError("'" + path + key + "' must be a string", rd.line_of_key(key));
  return j.at(key).get<std::string>();
}

inline ScenarioConfig parse_scenario(const nlohmann::json& j, const JsonReader& rd, std::size_t index) {
  const std::string path = "scenarios[" + std::to_string(index) + "].";
  if (!j.is_object()) throw SchemaError("'" + path.substr(0, path.size() - 1) + "' must be an object");
  ScenarioConfig c;
  c.name = string_or(j, "name", path, rd, "");
  c.allow_cdr = boolean_or(j, "allow_cdr", path, rd, false);
  c.allow_sg = boolean_or(j, "allow_sg", path, rd, false);
  c.baseline_mode = boolean_or(j, "baseline_mode", path, rd, false);
  const std::string mode = string_or(j, "mode", path, rd, "cba");
  if (mode == "cba") c.mode = Mode::Cba;
  else if (mode == "cea") c.mode = Mode::Cea;
  else throw SchemaError("'" + path + "mode' must be \"cba\" or \"cea\"", rd.line_of_key("mode"));
  c.t_cap = rd.number_or(j, "t_cap", path, c.t_cap);
  if (j.contains("terminal_years")) c.terminal_years = rd.integer(j, "terminal_years", path);
  if (j.contains("fixed_savings_years")) c.fixed_savings_years = rd.integer(j, "fixed_savings_years", path);
  if (j.contains("sensitivity")) {
    const std::string s = string_or(j, "sensitivity", path, rd, "");
    const auto o = sensitivity_overrides(s);
    if (!o) throw SchemaError("'" + path + "sensitivity' must be one of default, S1..S6", rd.line_of_key("sensitivity"));
    c.overrides = *o;
  }
  if (j.contains("overrides")) {
    const auto& o = rd.object(j, "overrides", path);
    const std::string op = path + "overrides.";
    if (o.contains("time_preference")) c.overrides.time_preference = rd.number(o, "time_preference", op);
    c.overrides.damage_multiplier = rd.number_or(o, "damage_multiplier", op, c.overrides.damage_multiplier);
    if (o.contains("sg_damage_exponent")) c.overrides.sg_damage_exponent = rd.integer(o, "sg_damage_exponent", op);
    c.overrides.sg_damage_multiplier =
        rd.number_or(o, "sg_damage_multiplier", op, c.overrides.sg_damage_multiplier);
  }
  return c;
}

}  // namespace detail

/// Parses a manifest. Relative paths resolve against `base_dir`.
inline RunManifest parse_manifest(const std::string& text, const fs::path& base_dir = {}) {
  const nlohmann::json root = detail::parse_json(text);
  if (!root.is_object()) throw SchemaError("top level must be an object", 1);
  const detail::JsonReader rd(text);
  RunManifest m;
  m.output_dir = base_dir / detail::string_or(root, "output_dir", "", rd, "out");
  if (root.contains("params")) m.params_path = base_dir / detail::string_or(root, "params", "", rd, "");
  if (root.contains("seed")) {
    const auto& s = root.at("seed");
    if (!s.is_number_unsigned()) throw SchemaError("'seed' must be a non-negative integer", rd.line_of_key("seed"));
    m.seed = s.get<std::uint64_t>();
  }
  if (root.contains("jobs")) m.jobs = rd.integer(root, "jobs", "");
  if (root.contains("tolerance")) {
    const auto& t = rd.object(root, "tolerance", "");
    if (t.contains("kkt")) m.kkt_tolerance = rd.number(t, "kkt", "tolerance.");
    if (t.contains("cap")) m.cap_tolerance = rd.number(t, "cap", "tolerance.");
    if (t.contains("random_starts")) m.random_starts = rd.integer(t, "random_starts", "tolerance.");
  }
  if (!root.contains("scenarios") || !root.at("scenarios").is_array())
    throw SchemaError("'scenarios' must be an array", rd.line_of_key("scenarios"));
  std::size_t i = 0;
  for (const auto& s : root.at("scenarios")) m.scenarios.push_back(detail::parse_scenario(s, rd, i++));
  validate(m);
  return m;
}

inline RunManifest load_manifest(const fs::path& path) {
  return parse_manifest(read_text_file(path.string()), path.parent_path());
}

/// The published experiment set: four portfolios, the full portfolio under
/// S1..S6, and three 2 degree cost-effectiveness runs.
inline RunManifest default_manifest() {
  RunManifest m;
  m.scenarios.push_back(make_config(Portfolio::MitigationOnly, "mitigation"));
  m.scenarios.push_back(make_config(Portfolio::MitigationCdr, "mitigation_cdr"));
  m.scenarios.push_back(make_config(Portfolio::MitigationSg, "mitigation_sg"));
  m.scenarios.push_back(make_config(Portfolio::Full, "full"));
  for (const char* s : {"S1", "S2", "S3", "S4", "S5", "S6"}) {
    auto c = make_config(Portfolio::Full, std::string("full_") + s);
    c.overrides = *sensitivity_overrides(s);
    m.scenarios.push_back(c);
  }
  for (auto [p, name] : {std::pair{Portfolio::MitigationOnly, "cea_mitigation"},
                         std::pair{Portfolio::MitigationCdr, "cea_mitigation_cdr"},
                         std::pair{Portfolio::MitigationSg, "cea_mitigation_sg"}}) {
    auto c = make_config(p, name);
    c.mode = Mode::Cea;
    m.scenarios.push_back(c);
  }
  return m;
}

// ---------------------------------------------------------------------------
// CSV

namespace csv {

/// Shortest round-trip representation; locale independent.
inline std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline std::string num(std::optional<int> v) { return v ? std::to_string(*v) : std::string(); }
inline std::string num(std::optional<double> v) { return v ? num(*v) : std::string(); }

inline std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  out += '\n';
  return out;
}

}  // namespace csv

/// Trajectory table columns. Fractions are of gross output; money in
/// trillion 2010 USD; forcing_srm is the SG term as it enters forcing (<= 0).
inline const std::vector<std::string>& trajectory_columns() {
  static const std::vector<std::string> cols{
      "year", "mu", "savings", "f_srm", "industrial_emissions_gtco2", "total_emissions_gtco2",
      "m_at_gtc", "m_up_gtc", "m_lo_gtc", "forcing_co2", "forcing_exogenous", "forcing_srm",
      "forcing_total", "t_atm", "t_ocean", "capital", "gross_output", "climate_damage_frac",
      "sg_damage_frac", "abatement_cost_frac", "climate_damage", "sg_damage", "abatement_cost",
      "net_output", "consumption", "per_capita_consumption_kusd", "carbon_tax_usd_per_tco2",
      "scc_usd_per_tco2", "seed"};
  return cols;
}

inline std::string trajectory_csv(const Trajectory& tr, const std::vector<double>& tax,
                                  const std::vector<double>& scc, std::uint64_t seed) {
  std::string out = csv::join(trajectory_columns());
  const auto cell = [](const std::vector<double>& v, std::size_t t) {
    return t < v.size() ? csv::num(v[t]) : std::string();
  };
  for (std::size_t t = 0; t < tr.size(); ++t) {
    const auto& r = tr[t];
    const auto& f = r.flows;
    out += csv::join({std::to_string(r.year), csv::num(r.controls.mu), csv::num(r.controls.savings),
                      csv::num(r.controls.f_srm), csv::num(f.industrial_emissions), csv::num(f.emissions),
                      csv::num(r.climate.carbon[0]), csv::num(r.climate.carbon[1]),
                      csv::num(r.climate.carbon[2]), csv::num(r.forcing_co2), csv::num(r.forcing_exogenous),
                      csv::num(0.0 - r.controls.f_srm), csv::num(r.forcing), csv::num(r.climate.t_atm),
                      csv::num(r.climate.t_ocean), csv::num(r.econ.capital), csv::num(f.gross_output),
                      csv::num(f.climate_damage), csv::num(f.sg_damage), csv::num(f.abatement_cost),
                      csv::num(f.climate_damage * f.gross_output), csv::num(f.sg_damage * f.gross_output),
                      csv::num(f.abatement_cost * f.gross_output), csv::num(f.net_output),
                      csv::num(f.consumption), csv::num(f.per_capita_consumption), cell(tax, t),
                      cell(scc, t), std::to_string(seed)});
  }
  return out;
}

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols{
      "scenario", "mode", "allow_cdr", "allow_sg", "feasible", "converged",
      "peak_emissions_year", "peak_emissions_gtco2", "peak_emissions_pct_base", "net_zero_year",
      "net_positive_again_year", "peak_cdr_year", "peak_cdr_gtco2", "cumulative_emissions_ttco2",
      "peak_sg_year", "peak_sg_wm2", "peak_temperature_year", "peak_temperature_c",
      "peak_policy_cost_year", "peak_policy_cost_pct", "bge_pct", "carbon_tax_2030", "scc_2030",
      "max_cap_violation_c", "seed"};
  return cols;
}

inline std::string summary_row(const Solution& s, const ScenarioSummary& m, std::uint64_t seed) {
  const int y0 = s.trajectory[0].year;
  const auto at_2030 = [&](const std::vector<double>& v) {
    const auto i = static_cast<std::size_t>(2030 - y0);
    return 2030 >= y0 && i < v.size() ? csv::num(v[i]) : std::string();
  };
  return csv::join(
      {s.config.name, to_string(s.config.mode), s.config.allow_cdr ? "1" : "0", s.config.allow_sg ? "1" : "0",
       s.feasible ? "1" : "0", s.diagnostics.converged ? "1" : "0", std::to_string(m.peak_emissions.year),
       csv::num(m.peak_emissions.value), csv::num(m.peak_emissions_pct_base), csv::num(m.net_zero_year),
       csv::num(m.net_positive_again_year),
       m.peak_cdr ? std::to_string(m.peak_cdr->year) : std::string(),
       m.peak_cdr ? csv::num(m.peak_cdr->value) : std::string(), csv::num(m.cumulative_emissions),
       std::to_string(m.peak_sg.year), csv::num(m.peak_sg.value), std::to_string(m.peak_temperature.year),
       csv::num(m.peak_temperature.value), std::to_string(m.peak_policy_cost.year),
       csv::num(m.peak_policy_cost.value), csv::num(m.bge_vs_baseline), at_2030(m.carbon_tax),
       at_2030(m.scc),
       s.config.mode == Mode::Cea ? csv::num(s.diagnostics.max_cap_violation) : std::string(),
       std::to_string(seed)});
}

// ---------------------------------------------------------------------------
// Files

/// Writes through a sibling temporary and renames, so readers never see a
/// partial file.
inline void write_atomic(const fs::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create '" + path.parent_path().string() + "': " + ec.message());
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

/// Serialises log lines from concurrent scenario workers.
class RunLog {
 public:
  explicit RunLog(const fs::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw IoError("cannot write '" + path.string() + "'");
  }
  void write(const nlohmann::json& entry) {
    const std::lock_guard lock(mutex_);
    out_ << entry.dump() << '\n';
    out_.flush();
  }

 private:
  std::mutex mutex_;
  std::ofstream out_;
};

inline nlohmann::json diagnostics_json(const Solution& s) {
  const auto& d = s.diagnostics;
  return {{"scenario", s.config.name},
          {"mode", to_string(s.config.mode)},
          {"feasible", s.feasible},
          {"converged", d.converged},
          {"gradient_norm", d.gradient_norm},
          {"iterations", d.iterations},
          {"newton_iterations", d.newton_iterations},
          {"evaluations", d.evaluations},
          {"active_lower", d.active_lower},
          {"active_upper", d.active_upper},
          {"starts", d.starts},
          {"best_start", d.best_start},
          {"outer_iterations", d.outer_iterations},
          {"max_cap_violation", d.max_cap_violation},
          {"objective", s.objective},
          {"seconds", d.seconds}};
}

// ---------------------------------------------------------------------------
// Running

struct ScenarioOutcome {
  std::string name;
  ExitCode status = ExitCode::Success;
  std::string message;
  std::optional<Solution> solution;
  std::optional<ScenarioSummary> summary;
};

struct RunReport {
  std::vector<ScenarioOutcome> scenarios;  // manifest order
  std::map<std::string, Solution> baselines;
  ExitCode status = ExitCode::Success;  // worst across scenarios
};

namespace detail {

inline int severity(ExitCode c) {
  switch (c) {
    case ExitCode::Success: return 0;
    case ExitCode::Convergence: return 1;
    case ExitCode::Validation: return 2;
    case ExitCode::Io: return 3;
  }
  return 3;
}

inline void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, jobs));
  if (workers == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < std::min(workers, count); ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  for (auto& t : pool) t.join();
}

inline std::string baseline_name(const Overrides& o, const std::string& first_user) {
  return o == Overrides{} ? std::string("baseline") : "baseline_for_" + first_user;
}

}  // namespace detail

/// Solves every scenario plus one baseline per distinct override set, writes
/// the tables and the log, and reports per-scenario status. Output-directory
/// failures throw IoError; scenario failures are recorded and reflected in
/// `status`.
inline RunReport run_manifest(const RunManifest& manifest, const ParamBundle& params) {
  validate(manifest);
  const SolverOptions opt = solver_options(manifest);
  std::error_code ec;
  fs::create_directories(manifest.output_dir, ec);
  if (ec) throw IoError("cannot create '" + manifest.output_dir.string() + "': " + ec.message());
  RunLog log(manifest.output_dir / "run.log");
  log.write({{"event", "start"}, {"seed", manifest.seed}, {"scenarios", manifest.scenarios.size()},
             {"params", params.name}});

  // One baseline per override set; an explicit baseline scenario is reused.
  std::vector<std::pair<Overrides, ScenarioConfig>> baseline_configs;
  std::vector<std::size_t> baseline_of(manifest.scenarios.size());
  for (std::size_t i = 0; i < manifest.scenarios.size(); ++i) {
    const auto& s = manifest.scenarios[i];
    auto it = std::find_if(baseline_configs.begin(), baseline_configs.end(),
                           [&](const auto& b) { return b.first == s.overrides; });
    if (it == baseline_configs.end()) {
      ScenarioConfig b = make_config(Portfolio::Baseline, detail::baseline_name(s.overrides, s.name));
      b.overrides = s.overrides;
      b.terminal_years = s.terminal_years;
      b.fixed_savings_years = s.fixed_savings_years;
      baseline_configs.emplace_back(s.overrides, b);
      it = baseline_configs.end() - 1;
    }
    baseline_of[i] = static_cast<std::size_t>(it - baseline_configs.begin());
  }

  RunReport report;
  std::vector<std::optional<Solution>> baselines(baseline_configs.size());
  std::vector<std::string> baseline_errors(baseline_configs.size());
  detail::parallel_for(baseline_configs.size(), manifest.jobs, [&](std::size_t k) {
    const auto& cfg = baseline_configs[k].second;
    try {
      baselines[k] = optimize(params, cfg, opt);
      auto entry = diagnostics_json(*baselines[k]);
      entry["event"] = "baseline";
      log.write(entry);
    } catch (const Error& e) {
      baseline_errors[k] = e.what();
      log.write({{"event", "baseline_failed"}, {"scenario", cfg.name}, {"error", e.what()}});
    }
  });
  for (std::size_t k = 0; k < baselines.size(); ++k) {
    if (!baselines[k]) continue;
    const auto& b = *baselines[k];
    const auto dir = manifest.output_dir / "baselines" / b.config.name;
    const ScenarioSummary sm = summarize(b, b);
    write_atomic(dir / "trajectory.csv", trajectory_csv(b.trajectory, sm.carbon_tax, sm.scc, manifest.seed));
    write_atomic(dir / "summary.csv", csv::join(summary_columns()) + summary_row(b, sm, manifest.seed));
    report.baselines.emplace(b.config.name, b);
  }

  report.scenarios.resize(manifest.scenarios.size());
  detail::parallel_for(manifest.scenarios.size(), manifest.jobs, [&](std::size_t i) {
    const auto& cfg = manifest.scenarios[i];
    ScenarioOutcome& out = report.scenarios[i];
    out.name = cfg.name;
    const auto& base = baselines[baseline_of[i]];
    try {
      if (!base)
        throw ConvergenceError("baseline for '" + cfg.name + "' failed: " + baseline_errors[baseline_of[i]],
                               Solution{});
      out.solution = cfg.baseline_mode ? *base : optimize(params, cfg, opt);
      if (cfg.baseline_mode) out.solution->config.name = cfg.name;
      out.summary = summarize(*out.solution, *base);
      auto entry = diagnostics_json(*out.solution);
      entry["event"] = "scenario";
      log.write(entry);
    } catch (const ConvergenceError& e) {
      out.status = ExitCode::Convergence;
      out.message = e.what();
      if (!e.best().controls.mu.empty()) {
        out.solution = e.best();
        out.summary = summarize(e.best().trajectory, base->trajectory);
        out.summary->name = cfg.name;
      }
      auto entry = out.solution ? diagnostics_json(*out.solution) : nlohmann::json::object();
      entry["event"] = "scenario_failed";
      entry["scenario"] = cfg.name;
      entry["error"] = e.what();
      log.write(entry);
    } catch (const Error& e) {
      out.status = e.exit_code();
      out.message = e.what();
      log.write({{"event", "scenario_failed"}, {"scenario", cfg.name}, {"error", e.what()}});
    }
  });

  std::string all = csv::join(summary_columns());
  for (const auto& o : report.scenarios) {
    if (detail::severity(o.status) > detail::severity(report.status)) report.status = o.status;
    if (!o.solution || !o.summary) continue;
    const auto dir = manifest.output_dir / o.name;
    write_atomic(dir / "trajectory.csv",
                 trajectory_csv(o.solution->trajectory, o.summary->carbon_tax, o.summary->scc, manifest.seed));
    const std::string row = summary_row(*o.solution, *o.summary, manifest.seed);
    write_atomic(dir / "summary.csv", csv::join(summary_columns()) + row);
    all += row;
  }
  write_atomic(manifest.output_dir / "summary.csv", all);
  log.write({{"event", "finish"}, {"status", static_cast<int>(report.status)}});
  return report;
}

// ---------------------------------------------------------------------------
// SG scale sweep

struct SweepRow {
  double scale = 0.0;
  double bge_pct = 0.0;
  double side_effects_pct = 0.0;     // SG damage, % of gross output, at the report year
  double avoided_damages_pct = 0.0;  // climate damage at scale 0 minus at this scale, % of gross output
};

/// Perturbs the SG path of `opt` by each scale with mitigation and savings
/// held fixed.
inline std::vector<SweepRow> sweep_sg_scale(const Solution& opt, const Solution& baseline,
                                            const std::vector<double>& scales, int report_year = 2050) {
  const int y0 = opt.trajectory[0].year;
  const auto t = static_cast<std::size_t>(report_year - y0);
  if (report_year < y0 || t >= opt.trajectory.size())
    throw ValidationError("report_year", "outside the horizon");
  const SgPerturbation zero = perturb_sg(opt, 0.0, baseline);
  const double damage0 = zero.trajectory[t].flows.climate_damage;
  std::vector<SweepRow> rows;
  for (double s : scales) {
    const SgPerturbation p = perturb_sg(opt, s, baseline);
    const auto& f = p.trajectory[t].flows;
    rows.push_back({s, p.bge_percent, 100.0 * f.sg_damage, 100.0 * (damage0 - f.climate_damage)});
  }
  return rows;
}

inline std::string sweep_csv(const std::vector<SweepRow>& rows, int report_year, std::uint64_t seed) {
  std::string out = csv::join({"scale", "bge_pct", "report_year", "side_effects_pct_gwp",
                               "avoided_damages_pct_gwp", "seed"});
  for (const auto& r : rows)
    out += csv::join({csv::num(r.scale), csv::num(r.bge_pct), std::to_string(report_year),
                      csv::num(r.side_effects_pct), csv::num(r.avoided_damages_pct), std::to_string(seed)});
  return out;
}

}  // namespace sgdice
