// SPDX-License-Identifier: Apache-2.0
//
// Manifests, CSV tables, batch runs and the command-line exit codes.
#include <cstdlib>
#include <fstream>
#include <map>
#include <sys/wait.h>

#include <gtest/gtest.h>

#include "sgdice/sgdice.hpp"

using namespace sgdice;

namespace {

const ParamBundle& params() {
  static const ParamBundle b = load_params(SGDICE_DATA_DIR "/dice2016r2.json").bundle;
  return b;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("sgdice_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) { return read_text_file(p.string()); }

using Table = std::vector<std::map<std::string, std::string>>;

Table read_csv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!s.empty() && s.back() == ',') out.emplace_back();
    return out;
  };
  const auto header = split(line);
  Table rows;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = i < cells.size() ? cells[i] : "";
    rows.push_back(std::move(row));
  }
  return rows;
}

double d(const std::string& s) { return std::stod(s); }

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SGDICE_CLI) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

RunManifest small_manifest(const fs::path& out) {
  RunManifest m;
  m.scenarios.push_back(make_config(Portfolio::MitigationOnly, "mitigation"));
  m.scenarios.push_back(make_config(Portfolio::Full, "full"));
  m.output_dir = out;
  m.random_starts = 1;
  m.jobs = 2;
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifests

TEST(Manifest, ParsesScenarioFields) {
  const auto m = parse_manifest(R"({
    "output_dir": "results", "seed": 42, "jobs": 3,
    "tolerance": {"kkt": 1e-7, "cap": 0.02, "random_starts": 1},
    "scenarios": [
      {"name": "a", "allow_cdr": true, "allow_sg": true, "sensitivity": "S1"},
      {"name": "b", "mode": "cea", "t_cap": 1.5, "overrides": {"damage_multiplier": 2}},
      {"name": "c", "baseline_mode": true, "terminal_years": 0, "fixed_savings_years": 10}
    ]})",
                                "/base");
  EXPECT_EQ(m.output_dir, fs::path("/base/results"));
  EXPECT_EQ(m.seed, 42u);
  EXPECT_EQ(m.jobs, 3);
  ASSERT_EQ(m.scenarios.size(), 3u);
  EXPECT_TRUE(m.scenarios[0].allow_cdr && m.scenarios[0].allow_sg);
  EXPECT_EQ(m.scenarios[0].overrides.time_preference, 0.03);
  EXPECT_EQ(m.scenarios[1].mode, Mode::Cea);
  EXPECT_EQ(m.scenarios[1].t_cap, 1.5);
  EXPECT_EQ(m.scenarios[1].overrides.damage_multiplier, 2.0);
  EXPECT_TRUE(m.scenarios[2].baseline_mode);
  EXPECT_EQ(m.scenarios[2].terminal_years, 0);
  const auto o = solver_options(m);
  EXPECT_EQ(o.kkt_tolerance, 1e-7);
  EXPECT_EQ(o.cap_tolerance, 0.02);
  EXPECT_EQ(o.random_starts, 1);
  EXPECT_EQ(o.seed, 42u);
}

TEST(Manifest, RejectsInvalidInput) {
  EXPECT_THROW(parse_manifest(R"({"scenarios": [{"name": "a"}, {"name": "a"}]})"), ValidationError);
  EXPECT_THROW(parse_manifest(R"({"scenarios": [{"name": "../x"}]})"), ValidationError);
  EXPECT_THROW(parse_manifest(R"({"scenarios": [{"name": "baselines"}]})"), ValidationError);
  EXPECT_THROW(parse_manifest(R"({"scenarios": []})"), ValidationError);
  EXPECT_THROW(parse_manifest(R"({"scenarios": [{"name": "a", "mode": "xyz"}]})"), SchemaError);
  EXPECT_THROW(parse_manifest(R"({"scenarios": [{"name": "a", "sensitivity": "S9"}]})"), SchemaError);
  EXPECT_THROW(parse_manifest(R"({"scenarios": [{"name": "a", "allow_sg": 1}]})"), SchemaError);
  EXPECT_THROW(parse_manifest(R"({"scenarios": [{"name": "a", "baseline_mode": true, "allow_sg": true}]})"),
               ValidationError);
  EXPECT_THROW(parse_manifest(R"({"seed": -1, "scenarios": [{"name": "a"}]})"), SchemaError);
  try {
    parse_manifest("{\n\"scenarios\": [\n{\"name\": }\n]}");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(load_manifest("/nonexistent/manifest.json"), IoError);
}

TEST(Manifest, DefaultSetHasThirteenScenarios) {
  const auto m = default_manifest();
  ASSERT_EQ(m.scenarios.size(), 13u);
  EXPECT_NO_THROW(validate(m));
  int cea = 0, sens = 0;
  for (const auto& s : m.scenarios) {
    cea += s.mode == Mode::Cea;
    sens += !(s.overrides == Overrides{});
  }
  EXPECT_EQ(cea, 3);
  EXPECT_EQ(sens, 6);
  // The shipped manifest file is the same set.
  const auto f = load_manifest(SGDICE_DATA_DIR "/manifests/default.json");
  ASSERT_EQ(f.scenarios.size(), m.scenarios.size());
  for (std::size_t i = 0; i < m.scenarios.size(); ++i) {
    EXPECT_EQ(f.scenarios[i].name, m.scenarios[i].name);
    EXPECT_EQ(f.scenarios[i].allow_cdr, m.scenarios[i].allow_cdr);
    EXPECT_EQ(f.scenarios[i].allow_sg, m.scenarios[i].allow_sg);
    EXPECT_EQ(f.scenarios[i].mode, m.scenarios[i].mode);
    EXPECT_TRUE(f.scenarios[i].overrides == m.scenarios[i].overrides);
  }
}

// ---------------------------------------------------------------------------
// CSV

TEST(Csv, NumbersRoundTrip) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-17, 123456789.123, 0.0})
    EXPECT_EQ(std::stod(csv::num(v)), v);
  EXPECT_EQ(csv::num(std::optional<int>{}), "");
  EXPECT_EQ(csv::num(std::optional<int>{2110}), "2110");
  EXPECT_EQ(csv::num(0.0 - 0.0), "0");
  EXPECT_EQ(csv::join({"a", "b"}), "a,b\n");
}

TEST(Csv, TrajectoryTableSchema) {
  const Model m(params(), make_config(Portfolio::Baseline, "b"));
  const auto tr = m.run(ControlPath(params().horizon(), 0.03, 0.25, 0.0));
  const std::string text = trajectory_csv(tr, {}, {}, 5);
  const auto lines = std::count(text.begin(), text.end(), '\n');
  EXPECT_EQ(lines, 501);
  const std::string header = text.substr(0, text.find('\n'));
  EXPECT_EQ(header.rfind("year,mu,savings,f_srm,", 0), 0u);
  EXPECT_EQ(std::count(header.begin(), header.end(), ',') + 1,
            static_cast<long>(trajectory_columns().size()));
  const std::string second = text.substr(text.find('\n') + 1, text.find('\n', text.find('\n') + 1) - text.find('\n') - 1);
  EXPECT_EQ(std::count(second.begin(), second.end(), ','), std::count(header.begin(), header.end(), ','));
  EXPECT_EQ(second.rfind("2015,", 0), 0u);
}

TEST(Files, UnwritableTargetIsIoError) {
  const fs::path dir = scratch("io");
  fs::create_directories(dir);
  write_atomic(dir / "blocker", "x");
  try {
    write_atomic(dir / "blocker" / "child.csv", "y");
    FAIL() << "expected IoError";
  } catch (const IoError& e) {
    EXPECT_EQ(e.exit_code(), ExitCode::Io);
  }
  EXPECT_EQ(slurp(dir / "blocker"), "x");
  EXPECT_FALSE(fs::exists(dir / "blocker.tmp"));
  RunManifest m = small_manifest(dir / "blocker" / "out");
  EXPECT_THROW(run_manifest(m, params()), IoError);
}

// ---------------------------------------------------------------------------
// Batch runs

class BatchRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    first_ = new fs::path(scratch("run1"));
    second_ = new fs::path(scratch("run2"));
    report_ = new RunReport(run_manifest(small_manifest(*first_), params()));
    RunManifest again = small_manifest(*second_);
    again.jobs = 1;
    run_manifest(again, params());
  }
  static void TearDownTestSuite() {
    delete report_;
    delete first_;
    delete second_;
  }
  static inline fs::path* first_ = nullptr;
  static inline fs::path* second_ = nullptr;
  static inline RunReport* report_ = nullptr;
};

TEST_F(BatchRun, WritesEveryTable) {
  EXPECT_EQ(report_->status, ExitCode::Success);
  for (const char* name : {"mitigation", "full", "baselines/baseline"}) {
    EXPECT_TRUE(fs::exists(*first_ / name / "trajectory.csv")) << name;
    EXPECT_TRUE(fs::exists(*first_ / name / "summary.csv")) << name;
  }
  EXPECT_TRUE(fs::exists(*first_ / "run.log"));
  const auto all = read_csv(*first_ / "summary.csv");
  ASSERT_EQ(all.size(), 2u);
  EXPECT_EQ(all[0].at("scenario"), "mitigation");
  EXPECT_EQ(all[1].at("scenario"), "full");
  EXPECT_EQ(all[1].at("seed"), std::to_string(SolverOptions{}.seed));
  for (auto& entry : fs::recursive_directory_iterator(*first_))
    EXPECT_NE(entry.path().extension(), ".tmp") << entry.path();
}

TEST_F(BatchRun, LogHasOneJsonObjectPerLine) {
  std::ifstream in(*first_ / "run.log");
  std::string line;
  int scenarios = 0, baselines = 0;
  while (std::getline(in, line)) {
    const auto j = nlohmann::json::parse(line);
    const std::string ev = j.at("event");
    scenarios += ev == "scenario";
    baselines += ev == "baseline";
  }
  EXPECT_EQ(scenarios, 2);
  EXPECT_EQ(baselines, 1);
}

TEST_F(BatchRun, CsvOutputsAreByteIdenticalAcrossRuns) {
  for (const char* f : {"summary.csv", "mitigation/trajectory.csv", "mitigation/summary.csv",
                        "full/trajectory.csv", "full/summary.csv", "baselines/baseline/trajectory.csv"})
    EXPECT_EQ(slurp(*first_ / f), slurp(*second_ / f)) << f;
}

TEST_F(BatchRun, SummaryIsDerivableFromTrajectory) {
  const auto traj = read_csv(*first_ / "full" / "trajectory.csv");
  const auto base = read_csv(*first_ / "baselines" / "baseline" / "trajectory.csv");
  const auto sum = read_csv(*first_ / "full" / "summary.csv").at(0);
  ASSERT_EQ(traj.size(), 500u);

  auto argmax = [&](const std::string& col) {
    std::size_t best = 0;
    for (std::size_t t = 1; t < traj.size(); ++t)
      if (d(traj[t].at(col)) > d(traj[best].at(col))) best = t;
    return best;
  };
  const std::size_t pe = argmax("industrial_emissions_gtco2");
  EXPECT_EQ(sum.at("peak_emissions_year"), traj[pe].at("year"));
  EXPECT_EQ(d(sum.at("peak_emissions_gtco2")), d(traj[pe].at("industrial_emissions_gtco2")));
  EXPECT_DOUBLE_EQ(d(sum.at("peak_emissions_pct_base")),
                   100.0 * d(traj[pe].at("industrial_emissions_gtco2")) / d(base[pe].at("industrial_emissions_gtco2")));

  std::string net_zero;
  double cumulative = 0.0, removal = 0.0;
  std::string removal_year;
  for (const auto& r : traj) {
    const double e = d(r.at("industrial_emissions_gtco2"));
    if (net_zero.empty() && e <= 0.0) net_zero = r.at("year");
    if (e > 0.0) cumulative += e / 1000.0;
    if (-e > removal) removal = -e, removal_year = r.at("year");
  }
  EXPECT_EQ(sum.at("net_zero_year"), net_zero);
  EXPECT_DOUBLE_EQ(d(sum.at("cumulative_emissions_ttco2")), cumulative);
  EXPECT_EQ(sum.at("peak_cdr_year"), removal_year);
  EXPECT_EQ(d(sum.at("peak_cdr_gtco2")), removal);

  const std::size_t sg = argmax("f_srm"), temp = argmax("t_atm");
  EXPECT_EQ(sum.at("peak_sg_year"), traj[sg].at("year"));
  EXPECT_EQ(d(sum.at("peak_sg_wm2")), d(traj[sg].at("f_srm")));
  EXPECT_EQ(sum.at("peak_temperature_year"), traj[temp].at("year"));
  EXPECT_EQ(d(sum.at("peak_temperature_c")), d(traj[temp].at("t_atm")));

  std::size_t pc = 0;
  auto cost = [&](std::size_t t) {
    return 100.0 * (d(traj[t].at("abatement_cost_frac")) + d(traj[t].at("sg_damage_frac")));
  };
  for (std::size_t t = 1; t < traj.size(); ++t)
    if (cost(t) > cost(pc)) pc = t;
  EXPECT_EQ(sum.at("peak_policy_cost_year"), traj[pc].at("year"));
  EXPECT_DOUBLE_EQ(d(sum.at("peak_policy_cost_pct")), cost(pc));

  const std::size_t y2030 = 2030 - 2015;
  EXPECT_EQ(sum.at("carbon_tax_2030"), traj[y2030].at("carbon_tax_usd_per_tco2"));
  EXPECT_EQ(sum.at("scc_2030"), traj[y2030].at("scc_usd_per_tco2"));

  // Forcing columns add up.
  for (std::size_t t : {0u, 100u, 300u}) {
    const auto& r = traj[t];
    EXPECT_NEAR(d(r.at("forcing_co2")) + d(r.at("forcing_exogenous")) + d(r.at("forcing_srm")),
                d(r.at("forcing_total")), 1e-12);
    EXPECT_LE(d(r.at("forcing_srm")), 0.0);
  }
}

TEST_F(BatchRun, FailedScenarioSetsConvergenceStatus) {
  RunManifest m;
  m.scenarios.push_back(make_config(Portfolio::MitigationOnly, "strict"));
  m.output_dir = scratch("strict");
  m.random_starts = 0;
  m.kkt_tolerance = 1e-300;
  const auto r = run_manifest(m, params());
  EXPECT_EQ(r.status, ExitCode::Convergence);
  EXPECT_EQ(r.scenarios[0].status, ExitCode::Convergence);
  // The baseline shares the impossible tolerance, so nothing is summarised
  // but the table header is still written.
  EXPECT_EQ(read_csv(m.output_dir / "summary.csv").size(), 0u);
  EXPECT_NE(r.scenarios[0].message.find("converge"), std::string::npos);
}

// ---------------------------------------------------------------------------
// Command line

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run_cli("validate-params"), 0);
  EXPECT_EQ(run_cli("validate-params --params /nonexistent.json"), 4);
  EXPECT_EQ(run_cli("frobnicate"), 2);
  EXPECT_EQ(run_cli(""), 2);
  EXPECT_EQ(run_cli("optimize --allow-cdr"), 2);  // --name missing
  EXPECT_EQ(run_cli("optimize --name x --sensitivity S9"), 2);
  EXPECT_EQ(run_cli("run"), 2);  // neither --manifest nor --default

  const fs::path dir = scratch("cli");
  fs::create_directories(dir);
  {
    std::ofstream(dir / "dup.json") << R"({"scenarios": [{"name": "a"}, {"name": "a"}]})";
    std::ofstream(dir / "bad.json") << "{ not json";
    std::ofstream(dir / "file") << "x";
  }
  EXPECT_EQ(run_cli("run --manifest " + (dir / "dup.json").string()), 2);
  EXPECT_EQ(run_cli("run --manifest " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(run_cli("run --manifest " + (dir / "missing.json").string()), 4);
  EXPECT_EQ(run_cli("sweep-sg --scenario mitigation"), 2);  // no SG in that scenario
  EXPECT_EQ(run_cli("sweep-sg --scenario nope"), 2);
  EXPECT_EQ(run_cli("optimize --name x --output-dir " + (dir / "file" / "out").string()), 4);
}

TEST(Cli, OptimizeWritesTables) {
  const fs::path dir = scratch("cli_opt");
  ASSERT_EQ(run_cli("optimize --name mit --random-starts 0 --output-dir " + dir.string()), 0);
  const auto rows = read_csv(dir / "mit" / "trajectory.csv");
  EXPECT_EQ(rows.size(), 500u);
  EXPECT_EQ(read_csv(dir / "summary.csv").at(0).at("scenario"), "mit");
  EXPECT_EQ(run_cli("optimize --name strict --random-starts 0 --output-dir " + dir.string() +
                    " --time-preference -1"),
            2);
}
