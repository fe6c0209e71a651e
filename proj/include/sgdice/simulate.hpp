// SPDX-License-Identifier: Apache-2.0
//
// Full-horizon simulation of the coupled model and the reverse-mode
// (adjoint) derivative of the welfare objective with respect to every
// control in every year.
#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sgdice/climate.hpp"
#include "sgdice/economy.hpp"
#include "sgdice/params.hpp"
#include "sgdice/scenario.hpp"

namespace sgdice {

struct ControlPath {
  std::vector<double> mu;
  std::vector<double> savings;
  std::vector<double> f_srm;

  ControlPath() = default;
  explicit ControlPath(std::size_t n, double mu0 = 0.0, double s0 = 0.0, double f0 = 0.0)
      : mu(n, mu0), savings(n, s0), f_srm(n, f0) {}

  std::size_t size() const noexcept { return mu.size(); }
  Controls at(std::size_t t) const { return {mu[t], savings[t], f_srm[t]}; }
  bool operator==(const ControlPath&) const = default;
};

struct YearRecord {
  int year = 0;
  Controls controls;
  ClimateState climate;
  EconState econ;
  YearFlows flows;
  double forcing = 0.0;
  double forcing_co2 = 0.0;
  double forcing_exogenous = 0.0;
};

struct Trajectory {
  std::vector<YearRecord> years;
  bool damages_on = true;

  std::size_t size() const noexcept { return years.size(); }
  const YearRecord& operator[](std::size_t t) const { return years[t]; }
  bool feasible() const {
    return std::all_of(years.begin(), years.end(), [](const auto& y) { return y.flows.feasible; });
  }
};

/// Emissions added on top of the model's own in one year (GtCO2).
struct EmissionPulse {
  std::size_t year_index = 0;
  double gtco2 = 1.0;
};

/// Augmented-Lagrangian treatment of T_atm <= cap.
struct TemperaturePenalty {
  double cap = 2.0;
  double weight = 10.0;
  std::vector<double> multipliers;  // one per year, >= 0
  bool include_welfare = true;      // false: pure feasibility objective
};

/// Per-year box on the controls implied by a scenario.
struct ControlBounds {
  ControlPath lower;
  ControlPath upper;
};

/// Steady-state savings rate used over the trailing fixed-savings years.
inline double steady_state_savings(const EconParams& p) {
  return (p.depreciation + 0.004) /
         (p.depreciation + 0.004 * p.elasticity_marginal_utility + p.time_preference) *
         p.capital_share;
}

inline ControlBounds control_bounds(const ScenarioConfig& c, const ParamBundle& b) {
  const std::size_t n = b.horizon();
  ControlBounds out{ControlPath(n, 0.0, 0.0, 0.0),
                    ControlPath(n, c.allow_cdr ? b.limits.mu_max : 1.0, 1.0,
                                c.allow_sg ? b.limits.f_srm_max : 0.0)};
  out.lower.mu[0] = out.upper.mu[0] = b.limits.mu_initial;
  if (c.baseline_mode)
    for (std::size_t t = 0; t < n; ++t) out.lower.mu[t] = out.upper.mu[t] = b.limits.mu_baseline;
  const double s_ss = steady_state_savings(b.econ);
  const std::size_t fixed = std::min<std::size_t>(n, static_cast<std::size_t>(c.fixed_savings_years));
  for (std::size_t t = n - fixed; t < n; ++t) out.lower.savings[t] = out.upper.savings[t] = s_ss;
  return out;
}

/// Throws ValidationError when `u` leaves the scenario's box.
inline void validate_controls(const ControlPath& u, const ControlBounds& box, double tol = 1e-12) {
  const std::size_t n = box.lower.size();
  detail::require(u.mu.size() == n && u.savings.size() == n && u.f_srm.size() == n, "controls",
                  "path length must equal horizon " + std::to_string(n));
  auto check = [&](const std::vector<double>& v, const std::vector<double>& lo,
                   const std::vector<double>& hi, const char* field) {
    for (std::size_t t = 0; t < n; ++t)
      detail::require(std::isfinite(v[t]) && v[t] >= lo[t] - tol && v[t] <= hi[t] + tol, field,
                      "year index " + std::to_string(t) + " value " + std::to_string(v[t]) +
                          " outside [" + std::to_string(lo[t]) + ", " + std::to_string(hi[t]) + "]");
  };
  check(u.mu, box.lower.mu, box.upper.mu, "controls.mu");
  check(u.savings, box.lower.savings, box.upper.savings, "controls.savings");
  check(u.f_srm, box.lower.f_srm, box.upper.f_srm, "controls.f_srm");
}

/// Welfare weight of each year: population times discount factor. The last
/// year also carries `terminal_years` of continuation at its own utility.
inline std::vector<double> welfare_weights(const ParamBundle& b, int terminal_years) {
  const std::size_t n = b.horizon();
  std::vector<double> w(n);
  const double rho = b.econ.time_preference;
  for (std::size_t t = 0; t < n; ++t) w[t] = b.paths.population[t] * discount(rho, t);
  double tail = 0.0;
  for (int k = 1; k <= terminal_years; ++k) tail += discount(rho, n - 1 + static_cast<std::size_t>(k));
  w[n - 1] += b.paths.population[n - 1] * tail;
  return w;
}

/// Shadow prices along a path, in objective units per unit quantity.
struct ShadowPrices {
  std::vector<double> emissions;    // d objective / d emissions_t (GtCO2)
  std::vector<double> consumption;  // d objective / d consumption_t (trillion USD)
};

/// Simulator bound to one calibration and one scenario. Stateless after
/// construction; safe to share across threads.
class Model {
 public:
  Model(ParamBundle params, ScenarioConfig config)
      : params_(apply_overrides(std::move(params), config.overrides)),
        config_(std::move(config)),
        bounds_(control_bounds(config_, params_)),
        weights_(welfare_weights(params_, config_.terminal_years)) {
    validate(config_);
    validate(params_);
    for (double w : weights_) scale_ += w;
  }

  const ParamBundle& params() const noexcept { return params_; }
  const ScenarioConfig& config() const noexcept { return config_; }
  const ControlBounds& bounds() const noexcept { return bounds_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  std::size_t horizon() const noexcept { return params_.horizon(); }
  bool damages_on() const noexcept { return config_.mode == Mode::Cba; }

  /// Objective normalisation: sum of welfare weights.
  double objective_scale() const noexcept { return scale_; }

  /// Deterministic forward run. Validates the controls against the scenario box.
  Trajectory simulate(const ControlPath& u, std::optional<EmissionPulse> pulse = {}) const {
    validate_controls(u, bounds_);
    Tape tape;
    forward(u, pulse, tape);
    if (tape.carbon_clamped)
      throw DomainError("simulate: removal drives atmospheric carbon to zero");
    return record(u, tape);
  }

  /// Forward run without the bound check (perturbation studies).
  Trajectory run(const ControlPath& u, std::optional<EmissionPulse> pulse = {}) const {
    Tape tape;
    forward(u, pulse, tape);
    return record(u, tape);
  }

  /// Welfare of a trajectory under this model's weights (utils, unnormalised).
  double welfare(const Trajectory& tr) const {
    double w = 0.0;
    for (std::size_t t = 0; t < tr.size(); ++t) w += weights_[t] * tr[t].flows.per_capita_utility;
    return w;
  }

  /// Normalised objective: welfare / objective_scale() minus the temperature penalty.
  double objective(const ControlPath& u, const TemperaturePenalty* penalty = nullptr,
                   std::optional<EmissionPulse> pulse = {}) const {
    Tape tape;
    forward(u, pulse, tape);
    return objective_from_tape(tape, penalty);
  }

  /// Objective value and its gradient with respect to every control.
  double objective_and_gradient(const ControlPath& u, ControlPath& grad,
                                const TemperaturePenalty* penalty = nullptr,
                                ShadowPrices* shadow = nullptr) const {
    Tape tape;
    forward(u, {}, tape);
    const double j = objective_from_tape(tape, penalty);
    backward(u, tape, grad, penalty, shadow);
    return j;
  }

  /// Largest exceedance of the temperature cap over years 1..H-1 (degrees C).
  double max_cap_violation(const Trajectory& tr, double cap) const {
    double v = 0.0;
    for (std::size_t t = 1; t < tr.size(); ++t) v = std::max(v, tr[t].climate.t_atm - cap);
    return v;
  }

 private:
  struct Tape {
    std::vector<std::array<double, 3>> m;
    std::vector<double> t_atm, t_ocean, capital;
    std::vector<YearFlows> flows;
    bool carbon_clamped = false;
    void resize(std::size_t n) {
      m.resize(n);
      t_atm.resize(n);
      t_ocean.resize(n);
      capital.resize(n);
      flows.resize(n);
    }
  };

  Trajectory record(const ControlPath& u, const Tape& tape) const {
    Trajectory tr;
    tr.damages_on = damages_on();
    tr.years.resize(horizon());
    const auto& c = params_.climate;
    for (std::size_t t = 0; t < horizon(); ++t) {
      auto& r = tr.years[t];
      r.year = params_.paths.year(t);
      r.controls = u.at(t);
      r.climate.carbon = {tape.m[t][0], tape.m[t][1], tape.m[t][2]};
      r.climate.t_atm = tape.t_atm[t];
      r.climate.t_ocean = tape.t_ocean[t];
      r.econ.capital = tape.capital[t];
      r.flows = tape.flows[t];
      r.forcing_co2 = c.forcing_2xco2 * std::log2(tape.m[t][0] / c.m_preindustrial);
      r.forcing_exogenous = params_.paths.exogenous_forcing[t];
      r.forcing = r.forcing_co2 + r.forcing_exogenous - u.f_srm[t];
    }
    return tr;
  }

  void forward(const ControlPath& u, std::optional<EmissionPulse> pulse, Tape& tape) const {
    const std::size_t n = horizon();
    if (u.size() != n) throw ValidationError("controls", "path length must equal horizon");
    tape.resize(n);
    const auto& cp = params_.climate;
    const auto& ep = params_.econ;
    ClimateState cs{params_.initial.carbon, params_.initial.t_atm, params_.initial.t_ocean};
    EconState es{params_.initial.capital};
    for (std::size_t t = 0; t < n; ++t) {
      tape.m[t] = cs.carbon;
      tape.t_atm[t] = cs.t_atm;
      tape.t_ocean[t] = cs.t_ocean;
      tape.capital[t] = es.capital;
      const YearInputs in = inputs_at(params_.paths, t);
      auto [next_econ, flows] =
          economy_step(es, cs.t_atm, u.at(t), in, ep, cp.forcing_2xco2, damages_on());
      double e = flows.emissions;
      if (pulse && pulse->year_index == t) e += pulse->gtco2;
      tape.flows[t] = flows;
      if (t + 1 == n) break;
      // Forward runs never throw on carbon depletion; the optimiser must be
      // able to evaluate any point in the box. Trajectories are checked instead.
      ClimateState next = cs;
      const Eigen::Vector3d inj(cs.carbon[0] + e / kCo2PerCarbon, cs.carbon[1], cs.carbon[2]);
      const Eigen::Vector3d m = cp.carbon_transfer * inj;
      if (!(m[0] > 1e-6)) tape.carbon_clamped = true;
      next.carbon = {std::max(m[0], 1e-6), m[1], m[2]};
      const double f_next = forcing(next.carbon[0], params_.paths.exogenous_forcing[t + 1],
                                    u.f_srm[t + 1], cp);
      next = temperature_step(ClimateState{next.carbon, cs.t_atm, cs.t_ocean}, f_next, cp);
      cs = next;
      es = next_econ;
    }
  }

  double objective_from_tape(const Tape& tape, const TemperaturePenalty* penalty) const {
    double w = 0.0;
    for (std::size_t t = 0; t < horizon(); ++t) w += weights_[t] * tape.flows[t].per_capita_utility;
    double j = (penalty && !penalty->include_welfare) ? 0.0 : w / scale_;
    if (penalty) {
      for (std::size_t t = 1; t < horizon(); ++t) {
        const double lam = penalty->multipliers.empty() ? 0.0 : penalty->multipliers[t];
        const double g = tape.t_atm[t] - penalty->cap;
        const double a = std::max(0.0, g + lam / penalty->weight);
        j -= 0.5 * penalty->weight * (a * a - (lam / penalty->weight) * (lam / penalty->weight));
      }
    }
    return j;
  }

  void backward(const ControlPath& u, const Tape& tape, ControlPath& grad,
                const TemperaturePenalty* penalty,
                ShadowPrices* shadow) const {
    const std::size_t n = horizon();
    const auto& cp = params_.climate;
    const auto& ep = params_.econ;
    const auto& tr = cp.temp_response;
    const Eigen::Matrix3d phi_t = cp.carbon_transfer.transpose();
    const double lambda = cp.feedback();
    const Utility util{ep.elasticity_marginal_utility};
    grad = ControlPath(n);
    if (shadow) {
      shadow->emissions.assign(n, 0.0);
      shadow->consumption.assign(n, 0.0);
    }
    // Adjoints of the state at t+1.
    double k_next = 0.0, t_next = 0.0, to_next = 0.0;
    Eigen::Vector3d m_next = Eigen::Vector3d::Zero();
    for (std::size_t tt = n; tt-- > 0;) {
      const YearFlows& f = tape.flows[tt];
      const YearInputs in = inputs_at(params_.paths, tt);
      const double mu = u.mu[tt], s = u.savings[tt], fs = u.f_srm[tt];
      const double temp = tape.t_atm[tt];

      double t_bar = 0.0, to_bar = 0.0, e_bar = 0.0;
      Eigen::Vector3d m_bar = Eigen::Vector3d::Zero();
      if (tt + 1 < n) {
        const double f_bar = tr.atmosphere_speed * t_next;
        m_next[0] += f_bar * cp.forcing_2xco2 / (tape.m[tt + 1][0] * std::numbers::ln2);
        grad.f_srm[tt + 1] -= f_bar;
        t_bar += t_next * (1.0 - tr.atmosphere_speed * (lambda + tr.ocean_exchange)) +
                 to_next * tr.ocean_speed;
        to_bar += t_next * tr.atmosphere_speed * tr.ocean_exchange + to_next * (1.0 - tr.ocean_speed);
        m_bar = phi_t * m_next;
        e_bar = m_bar[0] / kCo2PerCarbon;
      }

      const double c_bar = (penalty && !penalty->include_welfare)
                               ? 0.0
                               : weights_[tt] * util.derivative(f.per_capita_consumption) * 1000.0 /
                                     in.population;
      if (shadow) {
        shadow->emissions[tt] = e_bar;
        shadow->consumption[tt] = c_bar;
      }
      const double net_bar = (1.0 - s) * c_bar + s * k_next;
      grad.savings[tt] = f.net_output * (k_next - c_bar);
      const double y = f.gross_output;
      const double damage = 1.0 - f.climate_damage - f.sg_damage;
      const double abate = 1.0 - f.abatement_cost;
      const double omega_bar = y * net_bar;
      const double y_bar = damage * abate * net_bar + in.emissions_intensity * (1.0 - mu) * e_bar;
      grad.mu[tt] = -in.emissions_intensity * y * e_bar -
                    damage * omega_bar * marginal_abatement_cost_fraction(mu, in.backstop_cost_fraction, ep);
      const double d_bar = -abate * omega_bar;
      if (damages_on()) t_bar += d_bar * 2.0 * ep.damage_coeff * temp;
      const double ratio = fs / cp.forcing_2xco2;
      const double dsg = ep.sg_damage_exponent == 1
                             ? ep.sg_damage_coeff / cp.forcing_2xco2
                             : 2.0 * ep.sg_damage_coeff * ratio / cp.forcing_2xco2;
      grad.f_srm[tt] += d_bar * dsg;
      const double k = tape.capital[tt];
      const double k_bar = (1.0 - ep.depreciation) * k_next + y_bar * ep.capital_share * y / k;

      // Objective terms are divided by scale_ at the end; the penalty is not,
      // so pre-multiply it here.
      if (penalty && tt >= 1) {
        const double lam = penalty->multipliers.empty() ? 0.0 : penalty->multipliers[tt];
        const double a = std::max(0.0, lam + penalty->weight * (temp - penalty->cap));
        t_bar -= a * scale_;
      }

      k_next = k_bar;
      t_next = t_bar;
      to_next = to_bar;
      m_next = m_bar;
    }
    for (std::size_t t = 0; t < n; ++t) {
      grad.mu[t] /= scale_;
      grad.savings[t] /= scale_;
      grad.f_srm[t] /= scale_;
    }
  }

  ParamBundle params_;
  ScenarioConfig config_;
  ControlBounds bounds_;
  std::vector<double> weights_;
  double scale_ = 0.0;
};

}  // namespace sgdice
