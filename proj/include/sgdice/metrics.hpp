// SPDX-License-Identifier: Apache-2.0
//
// Reported quantities: carbon tax, social cost of carbon, balanced growth
// equivalent and per-scenario summary statistics. Money is 2010 USD.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "sgdice/solution.hpp"

namespace sgdice {

/// Marginal abatement (or removal) cost in USD/tCO2:
/// d(theta1 mu^theta2 Y) / d(sigma mu Y) = theta1 theta2 mu^(theta2-1) / sigma.
inline double carbon_tax(double mu, double backstop_fraction, double intensity, const EconParams& p) {
  if (mu < 0.0) throw ValidationError("mu", "must be >= 0");
  if (mu == 0.0) return 0.0;
  return 1000.0 * marginal_abatement_cost_fraction(mu, backstop_fraction, p) / intensity;
}

inline std::vector<double> carbon_tax_series(const Model& m, const Trajectory& tr) {
  const auto& paths = m.params().paths;
  std::vector<double> out(tr.size());
  for (std::size_t t = 0; t < tr.size(); ++t)
    out[t] = carbon_tax(tr[t].controls.mu, paths.backstop_cost_fraction[t],
                        paths.emissions_intensity[t], m.params().econ);
  return out;
}

/// SCC_t = -(dJ/dE_t) / (dJ/dC_t), USD/tCO2, from the adjoint pass.
inline std::vector<double> scc_adjoint(const Model& m, const ControlPath& u,
                                       const TemperaturePenalty* penalty = nullptr) {
  ControlPath grad;
  ShadowPrices sp;
  m.objective_and_gradient(u, grad, penalty, &sp);
  std::vector<double> out(u.size());
  for (std::size_t t = 0; t < u.size(); ++t) out[t] = -1000.0 * sp.emissions[t] / sp.consumption[t];
  return out;
}

/// SCC at one year from an emission pulse with the controls held fixed: the
/// welfare loss converted to consumption at that year.
inline double scc_pulse(const Model& m, const ControlPath& u, std::size_t year_index,
                        const TemperaturePenalty* penalty = nullptr, double gtco2 = 1.0) {
  ControlPath grad;
  ShadowPrices sp;
  const double j0 = m.objective_and_gradient(u, grad, penalty, &sp);
  const double j1 = m.objective(u, penalty, EmissionPulse{year_index, gtco2});
  const double d_welfare = (j1 - j0) * m.objective_scale();
  return -1000.0 * d_welfare / gtco2 / sp.consumption[year_index];
}

namespace detail {

inline void require_converged(const Solution& s, const char* what) {
  if (!s.diagnostics.converged)
    throw ConvergenceError(std::string(what) + ": solution for '" + s.config.name +
                               "' did not converge (gradient norm " +
                               std::to_string(s.diagnostics.gradient_norm) + ")",
                           s);
}

}  // namespace detail

inline std::vector<double> scc(const Solution& s) {
  detail::require_converged(s, "scc");
  const Model m = s.model();
  return scc_adjoint(m, s.controls, s.penalty ? &*s.penalty : nullptr);
}

/// Welfare of scaling a consumption path by (1 + delta) everywhere.
inline double scaled_welfare(const std::vector<double>& weights, const Trajectory& tr,
                             const Utility& util, double delta) {
  double w = 0.0;
  for (std::size_t t = 0; t < tr.size(); ++t)
    w += weights[t] * util.value((1.0 + delta) * tr[t].flows.per_capita_consumption);
  return w;
}

/// Closed-form BGE (fraction, not percent) for CRRA utility. Empty when a
/// consumption level sits on the low-consumption extension of the utility.
inline std::optional<double> bge_closed_form(const std::vector<double>& weights,
                                             const Trajectory& baseline, const Utility& util,
                                             double target_welfare) {
  const double eta = util.elasticity;
  double a = 0.0, b = 0.0, wsum = 0.0;
  for (std::size_t t = 0; t < baseline.size(); ++t) {
    const double c = baseline[t].flows.per_capita_consumption;
    if (!(c >= util.floor)) return std::nullopt;
    wsum += weights[t];
    if (std::abs(eta - 1.0) < 1e-12) {
      a += weights[t] * (std::log(c) - 1.0);
    } else {
      a += weights[t] * std::pow(c, 1.0 - eta) / (1.0 - eta);
      b += weights[t] * (-1.0 / (1.0 - eta) - 1.0);
    }
  }
  double delta;
  if (std::abs(eta - 1.0) < 1e-12) {
    delta = std::exp((target_welfare - a) / wsum) - 1.0;
  } else {
    const double ratio = (target_welfare - b) / a;
    if (!(ratio > 0.0)) return std::nullopt;
    delta = std::pow(ratio, 1.0 / (1.0 - eta)) - 1.0;
  }
  for (std::size_t t = 0; t < baseline.size(); ++t)
    if ((1.0 + delta) * baseline[t].flows.per_capita_consumption < util.floor) return std::nullopt;
  return delta;
}

/// BGE by bisection on delta until |W(delta) - target| < rel_tol * |target|.
inline double bge_bisection(const std::vector<double>& weights, const Trajectory& baseline,
                            const Utility& util, double target_welfare, double rel_tol = 1e-9) {
  auto f = [&](double d) { return scaled_welfare(weights, baseline, util, d) - target_welfare; };
  double lo = -0.5, hi = 0.5;
  while (f(lo) > 0.0 && lo > -1.0 + 1e-12) lo = -1.0 + (lo + 1.0) / 2.0;
  while (f(hi) < 0.0 && hi < 1e6) hi *= 2.0;
  const double tol = rel_tol * std::abs(target_welfare);
  double mid = 0.5 * (lo + hi);
  for (int k = 0; k < 200; ++k) {
    mid = 0.5 * (lo + hi);
    const double v = f(mid);
    if (std::abs(v) < tol) break;
    (v < 0.0 ? lo : hi) = mid;
  }
  return mid;
}

/// Percent change of baseline consumption, in every year, that matches the
/// scenario's welfare under the baseline model's weights.
inline double bge_percent(const Model& baseline_model, const Trajectory& baseline,
                          double scenario_welfare) {
  const Utility util{baseline_model.params().econ.elasticity_marginal_utility};
  const auto& w = baseline_model.weights();
  if (auto d = bge_closed_form(w, baseline, util, scenario_welfare)) return 100.0 * *d;
  return 100.0 * bge_bisection(w, baseline, util, scenario_welfare);
}

/// Welfare of a solved policy with climate damages counted. Cost-effectiveness
/// solutions ignore damages while solving, so they are re-simulated here.
inline double damage_inclusive_welfare(const Solution& s) {
  if (s.config.mode == Mode::Cba) return s.welfare;
  ScenarioConfig c = s.config;
  c.mode = Mode::Cba;
  const Model m(s.params, c);
  return m.welfare(m.run(s.controls));
}

/// BGE of `scenario` relative to `baseline`, in percent.
inline double bge(const Solution& scenario, const Solution& baseline) {
  if (!(scenario.config.overrides == baseline.config.overrides))
    throw ValidationError("bge", "scenario and baseline must share parameter overrides");
  return bge_percent(baseline.model(), baseline.trajectory, damage_inclusive_welfare(scenario));
}

struct YearValue {
  int year = 0;
  double value = 0.0;
};

struct ScenarioSummary {
  std::string name;
  YearValue peak_emissions;              // industrial, GtCO2/yr
  double peak_emissions_pct_base = 0.0;  // vs baseline in the same year
  std::optional<int> net_zero_year;
  std::optional<int> net_positive_again_year;
  std::optional<YearValue> peak_cdr;     // GtCO2/yr removed, positive
  double cumulative_emissions = 0.0;     // TtCO2, years with positive industrial emissions
  YearValue peak_sg;                     // W/m^2
  YearValue peak_temperature;            // degrees C
  YearValue peak_policy_cost;            // abatement + SG side effects, % of gross output
  std::optional<double> bge_vs_baseline; // percent
  std::vector<double> carbon_tax;        // USD/tCO2 per year
  std::vector<double> scc;               // USD/tCO2 per year
};

namespace detail {

// Earliest year wins ties.
template <class F>
YearValue argmax_year(const Trajectory& tr, F&& value) {
  YearValue best{tr[0].year, value(tr[0])};
  for (std::size_t t = 1; t < tr.size(); ++t) {
    const double v = value(tr[t]);
    if (v > best.value) best = {tr[t].year, v};
  }
  return best;
}

}  // namespace detail

/// Trajectory-only statistics; the tax, SCC and BGE fields are left empty.
inline ScenarioSummary summarize(const Trajectory& tr, const Trajectory& baseline) {
  if (tr.size() == 0 || tr.size() != baseline.size())
    throw ValidationError("summarize", "trajectories must be non-empty and of equal length");
  ScenarioSummary s;
  auto e_ind = [](const YearRecord& r) { return r.flows.industrial_emissions; };
  s.peak_emissions = detail::argmax_year(tr, e_ind);
  const std::size_t peak_idx = static_cast<std::size_t>(s.peak_emissions.year - tr[0].year);
  s.peak_emissions_pct_base = 100.0 * s.peak_emissions.value / e_ind(baseline[peak_idx]);
  for (std::size_t t = 0; t < tr.size(); ++t) {
    const double e = e_ind(tr[t]);
    if (!s.net_zero_year && e <= 0.0) s.net_zero_year = tr[t].year;
    else if (s.net_zero_year && !s.net_positive_again_year && e > 0.0) s.net_positive_again_year = tr[t].year;
    if (e > 0.0) s.cumulative_emissions += e / 1000.0;
  }
  const YearValue cdr = detail::argmax_year(tr, [&](const YearRecord& r) { return -e_ind(r); });
  if (cdr.value > 0.0) s.peak_cdr = cdr;
  s.peak_sg = detail::argmax_year(tr, [](const YearRecord& r) { return r.controls.f_srm; });
  s.peak_temperature = detail::argmax_year(tr, [](const YearRecord& r) { return r.climate.t_atm; });
  s.peak_policy_cost = detail::argmax_year(
      tr, [](const YearRecord& r) { return 100.0 * (r.flows.abatement_cost + r.flows.sg_damage); });
  return s;
}

/// Full summary of a solved scenario against the baseline solved with the same overrides.
inline ScenarioSummary summarize(const Solution& s, const Solution& baseline) {
  ScenarioSummary out = summarize(s.trajectory, baseline.trajectory);
  out.name = s.config.name;
  if (!s.feasible) return out;
  const Model m = s.model();
  out.carbon_tax = carbon_tax_series(m, s.trajectory);
  out.scc = scc(s);
  out.bge_vs_baseline = bge(s, baseline);
  return out;
}

}  // namespace sgdice
