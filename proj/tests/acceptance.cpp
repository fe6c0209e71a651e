// SPDX-License-Identifier: Apache-2.0
//
// End-to-end acceptance run. Solves the portfolios under the default
// calibration and every sensitivity case, the 2 degree cost-effectiveness
// runs and the SG scale sweep, then prints one PASS/FAIL line per
// criterion. Exit status is non-zero if any criterion fails.
#include <cstdio>
#include <map>
#include <sstream>

#include "sgdice/sgdice.hpp"

using namespace sgdice;

namespace {

struct Portfolios {
  Solution baseline, mitigation, cdr, sg, full;
};

const char* kSets[] = {"default", "S1", "S2", "S3", "S4", "S5", "S6"};

std::size_t index_of(int year) { return static_cast<std::size_t>(year - 2015); }

double t_at(const Solution& s, int year) { return s.trajectory[index_of(year)].climate.t_atm; }

Solution solve(const ParamBundle& p, Portfolio which, const std::string& set, const char* label) {
  ScenarioConfig c = make_config(which, std::string(label) + "_" + set);
  c.overrides = *sensitivity_overrides(set);
  const Solution s = optimize(p, c);
  std::fprintf(stderr, "  solved %-22s %6.1f s  |pg| %.1e\n", c.name.c_str(), s.diagnostics.seconds,
               s.diagnostics.gradient_norm);
  return s;
}

Solution solve_cea(const ParamBundle& p, Portfolio which, const char* label) {
  ScenarioConfig c = make_config(which, label);
  c.mode = Mode::Cea;
  const Solution s = optimize(p, c);
  std::fprintf(stderr, "  solved %-22s %6.1f s  %s\n", label, s.diagnostics.seconds,
               s.feasible ? "feasible" : "infeasible");
  return s;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

bool within(double v, double target, double tol) { return std::abs(v - target) <= tol; }

double pct_change(double v, double ref) { return 100.0 * (v / ref - 1.0); }

}  // namespace

int main() {
  const LoadedParams lp = load_params(SGDICE_DATA_DIR "/dice2016r2.json");
  const ParamBundle& p = lp.bundle;

  std::map<std::string, Portfolios> runs;
  for (const char* set : kSets) {
    Portfolios r;
    r.baseline = solve(p, Portfolio::Baseline, set, "baseline");
    r.mitigation = solve(p, Portfolio::MitigationOnly, set, "mitigation");
    r.cdr = solve(p, Portfolio::MitigationCdr, set, "mitigation_cdr");
    r.sg = solve(p, Portfolio::MitigationSg, set, "mitigation_sg");
    r.full = solve(p, Portfolio::Full, set, "full");
    runs.emplace(set, std::move(r));
  }
  const Portfolios& d = runs.at("default");
  std::map<std::string, std::map<std::string, ScenarioSummary>> sums;
  for (const auto& [set, r] : runs) {
    sums[set]["mitigation"] = summarize(r.mitigation, r.baseline);
    sums[set]["cdr"] = summarize(r.cdr, r.baseline);
    sums[set]["sg"] = summarize(r.sg, r.baseline);
    sums[set]["full"] = summarize(r.full, r.baseline);
  }
  const auto& ds = sums.at("default");
  const std::size_t y2030 = index_of(2030);

  // 1. Mitigation only: plateau near 4 degrees, net zero near 2120.
  {
    const auto& s = ds.at("mitigation");
    const double peak = s.peak_temperature.value, t2300 = t_at(d.mitigation, 2300);
    const int nz = s.net_zero_year.value_or(0);
    report(1, within(peak, 4.0, 0.4) && within(t2300, 4.0, 0.4) && within(nz, 2120, 15),
           fmt("peak T %.3f C (%d), T2300 %.3f C, net zero %d", peak, s.peak_temperature.year, t2300, nz));
  }

  // 2. Mitigation + SG: plateau near 3 degrees, 2030 tax and SCC about 30% lower.
  {
    const auto& s = ds.at("sg");
    const auto& m = ds.at("mitigation");
    const double peak = s.peak_temperature.value, t2300 = t_at(d.sg, 2300);
    const double dtax = -pct_change(s.carbon_tax[y2030], m.carbon_tax[y2030]);
    const double dscc = -pct_change(s.scc[y2030], m.scc[y2030]);
    report(2,
           within(peak, 3.0, 0.4) && within(t2300, 3.0, 0.4) && within(dtax, 30.0, 10.0) &&
               within(dscc, 30.0, 10.0),
           fmt("peak T %.3f C, T2300 %.3f C, 2030 tax %.2f vs %.2f (-%.1f%%), 2030 SCC %.2f vs %.2f (-%.1f%%)",
               peak, t2300, s.carbon_tax[y2030], m.carbon_tax[y2030], dtax, s.scc[y2030], m.scc[y2030], dscc));
  }

  // 3. Mitigation + CDR: 2030 tax about 3% lower; temperature heads back to pre-industrial.
  {
    const auto& s = ds.at("cdr");
    const auto& m = ds.at("mitigation");
    const double dtax = -pct_change(s.carbon_tax[y2030], m.carbon_tax[y2030]);
    const double t2300 = t_at(d.cdr, 2300), t_end = d.cdr.trajectory.years.back().climate.t_atm;
    // The trailing fixed-savings window is a horizon artefact (removal after the horizon is
    // worthless), so the decline is checked up to its start and the end value reported separately.
    const auto& tr = d.cdr.trajectory;
    const std::size_t window_end = tr.size() - static_cast<std::size_t>(ScenarioConfig{}.fixed_savings_years);
    bool declining = true;
    double t_window_end = tr[window_end - 1].climate.t_atm;
    for (std::size_t t = index_of(s.peak_temperature.year); t + 1 < window_end; ++t)
      declining = declining && tr[t + 1].climate.t_atm <= tr[t].climate.t_atm;
    report(3, within(dtax, 3.0, 3.0) && declining && t_window_end < 0.05 && t_end < 0.5 && t_end < t2300,
           fmt("2030 tax %.2f vs %.2f (-%.2f%%), peak T %.3f C (%d), T2300 %.3f C, T%d %.3f C, "
               "monotone decline %d-%d: %s, T%d %.3f C",
               s.carbon_tax[y2030], m.carbon_tax[y2030], dtax, s.peak_temperature.value,
               s.peak_temperature.year, t2300, tr.years[window_end - 1].year, t_window_end, s.peak_temperature.year,
               tr.years[window_end - 1].year, declining ? "yes" : "no", tr.years.back().year, t_end));
  }

  // 4. Full portfolio headline numbers.
  {
    const auto& s = ds.at("full");
    const int nz = s.net_zero_year.value_or(0);
    const bool ok = within(nz, 2142, 15) && within(s.peak_sg.value, 1.98, 0.5) &&
                    within(s.peak_sg.year, 2143, 20) && within(s.peak_temperature.value, 3.1, 0.3) &&
                    within(s.peak_emissions.year, 2057, 10) && within(s.cumulative_emissions, 4.0, 1.0);
    report(4, ok,
           fmt("net zero %d, peak SG %.3f W/m2 (%d), peak T %.3f C (%d), peak emissions %.2f Gt (%d), "
               "cumulative %.3f TtCO2",
               nz, s.peak_sg.value, s.peak_sg.year, s.peak_temperature.value, s.peak_temperature.year,
               s.peak_emissions.value, s.peak_emissions.year, s.cumulative_emissions));
  }

  // 5. Sensitivity directions.
  {
    const auto& s1 = sums.at("S1").at("full");
    const auto& s2 = sums.at("S2").at("full");
    const auto& s6 = sums.at("S6").at("full");
    const double cdr1 = s1.peak_cdr ? s1.peak_cdr->value : 0.0, cdr2 = s2.peak_cdr ? s2.peak_cdr->value : 0.0;
    const int cy1 = s1.peak_cdr ? s1.peak_cdr->year : 0, cy2 = s2.peak_cdr ? s2.peak_cdr->year : 0;
    const double dcdr = cdr2 > 0.0 ? pct_change(cdr1, cdr2) : 0.0;
    const double dsg = pct_change(s1.peak_sg.value, s2.peak_sg.value);
    const bool later = s1.peak_emissions.year > s2.peak_emissions.year && cy1 > cy2 &&
                       s1.peak_sg.year > s2.peak_sg.year &&
                       s1.peak_temperature.year > s2.peak_temperature.year;
    const bool ok = later && cdr2 > 0.0 && within(dcdr, 44.0, 15.0) && within(dsg, 10.0, 10.0) &&
                    s6.peak_sg.value >= 5.0 && s6.peak_temperature.value <= 1.5;
    report(5, ok,
           fmt("S1 vs S2 peak years: emissions %d/%d, CDR %d/%d, SG %d/%d, T %d/%d; peak CDR %.2f vs %.2f Gt "
               "(%+.1f%%); peak SG %.3f vs %.3f (%+.1f%%); S6 peak SG %.3f W/m2, peak T %.3f C",
               s1.peak_emissions.year, s2.peak_emissions.year, cy1, cy2, s1.peak_sg.year, s2.peak_sg.year,
               s1.peak_temperature.year, s2.peak_temperature.year, cdr1, cdr2, dcdr, s1.peak_sg.value,
               s2.peak_sg.value, dsg, s6.peak_sg.value, s6.peak_temperature.value));
  }

  // 6. Two-degree cost-effectiveness runs.
  std::vector<Solution> cea;
  {
    bool ok = true;
    std::string detail;
    try {
      cea.push_back(solve_cea(p, Portfolio::MitigationOnly, "cea_mitigation"));
      cea.push_back(solve_cea(p, Portfolio::MitigationCdr, "cea_mitigation_cdr"));
      cea.push_back(solve_cea(p, Portfolio::MitigationSg, "cea_mitigation_sg"));
      cea.push_back(solve_cea(p, Portfolio::Full, "cea_full"));
      const auto cdr = summarize(cea[1], d.baseline);
      const auto full = summarize(cea[3], d.baseline);
      const int nz = cdr.net_zero_year.value_or(0);
      ok = !cea[0].feasible && cea[1].feasible && cea[2].feasible && cea[3].feasible &&
           within(nz, 2050, 10) && within(cdr.peak_policy_cost.value, 6.0, 2.0) &&
           full.peak_policy_cost.value < cdr.peak_policy_cost.value;
      detail = fmt("M-only %s (min violation %.3f C); M+CDR %s, net zero %d, peak cost %.2f%% GWP (%d); "
                   "M+SG %s; full %s, peak cost %.2f%% GWP (%d)",
                   cea[0].feasible ? "feasible" : "infeasible", cea[0].diagnostics.max_cap_violation,
                   cea[1].feasible ? "feasible" : "infeasible", nz, cdr.peak_policy_cost.value,
                   cdr.peak_policy_cost.year, cea[2].feasible ? "feasible" : "infeasible",
                   cea[3].feasible ? "feasible" : "infeasible", full.peak_policy_cost.value,
                   full.peak_policy_cost.year);
    } catch (const Error& e) {
      ok = false;
      detail = e.what();
    }
    report(6, ok, detail);
  }

  // 7. Carbon conservation along every reported CBA trajectory.
  {
    double worst = 0.0;
    for (const auto& [set, r] : runs)
      for (const Solution* s : {&r.baseline, &r.mitigation, &r.cdr, &r.sg, &r.full})
        for (std::size_t t = 0; t + 1 < s->trajectory.size(); ++t) {
          const auto& a = s->trajectory[t];
          const double expected = a.climate.total_carbon() + a.flows.emissions / kCo2PerCarbon;
          worst = std::max(worst, std::abs(s->trajectory[t + 1].climate.total_carbon() - expected) / expected);
        }
    double cols = 0.0;
    for (int j = 0; j < 3; ++j) cols = std::max(cols, std::abs(p.climate.carbon_transfer.col(j).sum() - 1.0));
    report(7, worst <= 1e-9 && cols <= 1e-12,
           fmt("max relative carbon imbalance %.2e, max column-sum error %.2e", worst, cols));
  }

  // 8. Annual conversion.
  {
    const auto& r = lp.report;
    const bool root = r.carbon_method == CarbonFitMethod::PrincipalRoot;
    const bool carbon_ok = root ? r.carbon_residual <= 1e-6 : r.carbon_residual <= 1e-3;
    const double dev = r.temperature.max_deviation_after;
    report(8, carbon_ok && dev < 0.05,
           fmt("carbon matrix: %s, max |annual^5 - source| %.2e; baseline T node deviation %.4f C%s",
               root ? "principal fifth root" : "stochastic least-squares refit (principal root not stochastic)",
               r.carbon_residual, dev, r.temperature.refit ? " after speed refit" : ""));
  }

  // 9. SCC: adjoint vs 1 GtCO2 pulse.
  {
    const Model m = d.full.model();
    const auto adj = scc(d.full);
    bool ok = true;
    std::string detail;
    for (int year : {2030, 2050, 2100}) {
      const auto t = index_of(year);
      const double pulse = scc_pulse(m, d.full.controls, t);
      const double rel = std::abs(pulse / adj[t] - 1.0);
      ok = ok && rel < 0.01;
      detail += fmt("%d adjoint %.3f pulse %.3f (%.3f%%); ", year, adj[t], pulse, 100.0 * rel);
    }
    report(9, ok, "full portfolio: " + detail);
  }

  // 10. Welfare nesting, every calibration.
  {
    bool ok = true;
    std::string detail;
    for (const char* set : kSets) {
      const auto& s = sums.at(set);
      const double m = *s.at("mitigation").bge_vs_baseline, c = *s.at("cdr").bge_vs_baseline,
                   g = *s.at("sg").bge_vs_baseline, f = *s.at("full").bge_vs_baseline;
      const bool here = f > c && c > 0.0 && f > g && g > 0.0 && m > 0.0;
      ok = ok && here;
      detail += fmt("%s M %.3f CDR %.3f SG %.3f full %.3f%s; ", set, m, c, g, f, here ? "" : " (violated)");
    }
    report(10, ok, "BGE %: " + detail);
  }

  // 11. SG starts well before net zero, peaks around it and is phased down.
  {
    bool ok = true;
    std::string detail;
    for (const char* set : {"default", "S1", "S2", "S3", "S4", "S5"}) {
      const auto& s = sums.at(set).at("full");
      const auto& tr = runs.at(set).full.trajectory;
      int onset = 0;
      for (std::size_t t = 0; t < tr.size() && !onset; ++t)
        if (tr[t].controls.f_srm > 0.05) onset = tr[t].year;
      const int nz = s.net_zero_year.value_or(0);
      const double late = tr[tr.size() - 1 - 50].controls.f_srm;
      const bool here = onset && nz && onset <= nz - 30 && std::abs(s.peak_sg.year - nz) <= 20 &&
                        late < s.peak_sg.value;
      ok = ok && here;
      detail += fmt("%s onset %d, net zero %d, peak %d (%.2f), %d: %.2f%s; ", set, onset, nz, s.peak_sg.year,
                    s.peak_sg.value, tr[tr.size() - 1 - 50].year, late, here ? "" : " (violated)");
    }
    report(11, ok, detail);
  }

  // 12. SG scale sweep on the mitigation + SG optimum.
  {
    std::vector<double> scales;
    for (int k = 0; k <= 200; ++k) scales.push_back(0.01 * k);
    const auto rows = sweep_sg_scale(d.sg, d.baseline, scales, 2050);
    std::size_t best = 0;
    for (std::size_t k = 1; k < rows.size(); ++k)
      if (rows[k].bge_pct > rows[best].bge_pct) best = k;
    bool unimodal = true;
    for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
      const bool rising = rows[k + 1].bge_pct > rows[k].bge_pct;
      unimodal = unimodal && (k < best ? rising : !rising);
    }
    double concavity = -1.0;  // largest second difference of avoided damages
    for (std::size_t k = 1; k + 1 < rows.size(); ++k)
      concavity = std::max(concavity, rows[k + 1].avoided_damages_pct - 2 * rows[k].avoided_damages_pct +
                                          rows[k - 1].avoided_damages_pct);
    const std::size_t one = 100;
    double quad = 0.0;
    for (const auto& r : rows)
      quad = std::max(quad, std::abs(r.side_effects_pct - r.scale * r.scale * rows[one].side_effects_pct));
    const double q_rel = quad / rows[one].side_effects_pct;
    report(12, unimodal && rows[best].scale >= 0.9 && rows[best].scale <= 1.1 && concavity <= 1e-12 && q_rel < 1e-12,
           fmt("BGE max %.4f%% at scale %.2f, unimodal: %s; max second difference of avoided damages %.2e; "
               "side effects vs scale^2 max relative error %.1e",
               rows[best].bge_pct, rows[best].scale, unimodal ? "yes" : "no", concavity, q_rel));
  }

  // 13. Determinism: same manifest and seed, byte-identical CSVs.
  {
    const fs::path root = fs::temp_directory_path() / ("sgdice_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    RunManifest m;
    m.scenarios.push_back(make_config(Portfolio::MitigationSg, "mitigation_sg"));
    m.scenarios.push_back(make_config(Portfolio::Full, "full"));
    auto s6 = make_config(Portfolio::Full, "full_S6");
    s6.overrides = *sensitivity_overrides("S6");
    m.scenarios.push_back(s6);
    m.output_dir = root / "a";
    run_manifest(m, p);
    m.output_dir = root / "b";
    run_manifest(m, p);
    int files = 0, differ = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
      if (e.path().extension() != ".csv") continue;
      ++files;
      const auto other = root / "b" / fs::relative(e.path(), root / "a");
      if (!fs::exists(other) || read_text_file(e.path().string()) != read_text_file(other.string())) ++differ;
    }
    report(13, files > 0 && differ == 0, fmt("%d CSV files compared, %d differ", files, differ));
    fs::remove_all(root);
  }

  // 14. The numerical caps on mu and F_SRM never bind.
  {
    double mu = 0.0, f = 0.0;
    auto scan = [&](const Solution& s) {
      for (std::size_t t = 0; t < s.controls.size(); ++t) {
        mu = std::max(mu, s.controls.mu[t]);
        f = std::max(f, s.controls.f_srm[t]);
      }
    };
    for (const auto& [set, r] : runs)
      for (const Solution* s : {&r.baseline, &r.mitigation, &r.cdr, &r.sg, &r.full}) scan(*s);
    for (const auto& s : cea) scan(s);
    const double mu_cap = p.limits.mu_max, f_cap = p.limits.f_srm_max;
    report(14, mu < mu_cap - 1e-6 && f < f_cap - 1e-6,
           fmt("max mu %.4f (cap %.1f), max F_SRM %.4f W/m2 (cap %.1f)", mu, mu_cap, f, f_cap));
  }

  std::printf("%d of 14 criteria failed\n", failures);
  return failures ? 1 : 0;
}
