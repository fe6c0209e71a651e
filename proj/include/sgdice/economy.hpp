// SPDX-License-Identifier: Apache-2.0
//
// Ramsey-growth side of one model year: production, emissions, abatement
// and removal cost, damages, consumption and utility.
#pragma once

#include <cmath>
#include <span>

#include "sgdice/params.hpp"

namespace sgdice {

struct EconState {
  double capital = 0.0;
};

struct Controls {
  double mu = 0.0;       // fraction of baseline industrial emissions abated; > 1 is net removal
  double savings = 0.0;  // share of net output invested
  double f_srm = 0.0;    // W/m^2 of solar geoengineering
};

/// Exogenous inputs for one year.
struct YearInputs {
  double population = 0.0;
  double productivity = 0.0;
  double emissions_intensity = 0.0;
  double land_emissions = 0.0;
  double exogenous_forcing = 0.0;
  double backstop_cost_fraction = 0.0;
};

inline YearInputs inputs_at(const ExogenousPaths& p, std::size_t t) {
  return {p.population[t],     p.productivity[t],      p.emissions_intensity[t],
          p.land_emissions[t], p.exogenous_forcing[t], p.backstop_cost_fraction[t]};
}

struct YearFlows {
  double gross_output = 0.0;
  double industrial_emissions = 0.0;
  double emissions = 0.0;  // industrial + land use
  double abatement_cost = 0.0;  // fraction of gross output
  double climate_damage = 0.0;  // fraction of gross output
  double sg_damage = 0.0;       // fraction of gross output
  double net_output = 0.0;
  double investment = 0.0;
  double consumption = 0.0;
  double per_capita_consumption = 0.0;  // thousand USD per person
  double per_capita_utility = 0.0;
  bool feasible = true;  // consumption strictly positive
};

inline double gross_output(double productivity, double capital, double population,
                           const EconParams& p) {
  return productivity * std::pow(capital, p.capital_share) *
         std::pow(population / 1000.0, 1.0 - p.capital_share);
}

inline double industrial_emissions(double intensity, double gross, double mu) {
  return intensity * gross * (1.0 - mu);
}

inline double abatement_cost_fraction(double mu, double backstop_fraction, const EconParams& p) {
  return backstop_fraction * std::pow(mu, p.abatement_exponent);
}

/// d(abatement_cost_fraction)/d(mu).
inline double marginal_abatement_cost_fraction(double mu, double backstop_fraction,
                                               const EconParams& p) {
  return backstop_fraction * p.abatement_exponent * std::pow(mu, p.abatement_exponent - 1.0);
}

inline double climate_damage_fraction(double t_atm, const EconParams& p) {
  return p.damage_coeff * t_atm * t_atm;
}

inline double sg_damage_fraction(double f_srm, double forcing_2xco2, const EconParams& p) {
  const double ratio = f_srm / forcing_2xco2;
  return p.sg_damage_coeff * (p.sg_damage_exponent == 1 ? ratio : ratio * ratio);
}

// CRRA utility. Per-capita consumption below the floor continues as the
// second-order Taylor expansion at the floor, so the objective stays smooth
// and finite when an iterate drives consumption to zero or below.
struct Utility {
  double elasticity = 1.45;
  double floor = 0.01;  // thousand USD per person

  double crra(double c) const {
    if (std::abs(elasticity - 1.0) < 1e-12) return std::log(c) - 1.0;
    return (std::pow(c, 1.0 - elasticity) - 1.0) / (1.0 - elasticity) - 1.0;
  }
  double value(double c) const {
    if (c >= floor) return crra(c);
    const double d = c - floor;
    const double d1 = std::pow(floor, -elasticity);
    const double d2 = -elasticity * d1 / floor;
    return crra(floor) + d1 * d + 0.5 * d2 * d * d;
  }
  double derivative(double c) const {
    if (c >= floor) return std::pow(c, -elasticity);
    const double d1 = std::pow(floor, -elasticity);
    return d1 - elasticity * d1 / floor * (c - floor);
  }
};

/// One economic year. `damages_on` is false in cost-effectiveness mode, where
/// temperature damages leave the objective and a temperature cap replaces them.
inline YearFlows economy_flows(const EconState& econ, double t_atm, const Controls& u,
                               const YearInputs& in, const EconParams& p, double forcing_2xco2,
                               bool damages_on = true) {
  YearFlows f;
  f.gross_output = gross_output(in.productivity, econ.capital, in.population, p);
  f.industrial_emissions = industrial_emissions(in.emissions_intensity, f.gross_output, u.mu);
  f.emissions = f.industrial_emissions + in.land_emissions;
  f.abatement_cost = abatement_cost_fraction(u.mu, in.backstop_cost_fraction, p);
  f.climate_damage = damages_on ? climate_damage_fraction(t_atm, p) : 0.0;
  f.sg_damage = sg_damage_fraction(u.f_srm, forcing_2xco2, p);
  f.net_output =
      f.gross_output * (1.0 - f.climate_damage - f.sg_damage) * (1.0 - f.abatement_cost);
  f.investment = u.savings * f.net_output;
  f.consumption = f.net_output - f.investment;
  f.per_capita_consumption = 1000.0 * f.consumption / in.population;
  f.feasible = f.consumption > 0.0;
  f.per_capita_utility = Utility{p.elasticity_marginal_utility}.value(f.per_capita_consumption);
  return f;
}

inline EconState next_capital(const EconState& econ, const YearFlows& f, const EconParams& p) {
  return {(1.0 - p.depreciation) * econ.capital + f.investment};
}

/// Advances the economy one year and reports that year's flows.
inline std::pair<EconState, YearFlows> economy_step(const EconState& econ, double t_atm,
                                                    const Controls& u, const YearInputs& in,
                                                    const EconParams& p, double forcing_2xco2,
                                                    bool damages_on = true) {
  YearFlows f = economy_flows(econ, t_atm, u, in, p, forcing_2xco2, damages_on);
  return {next_capital(econ, f, p), f};
}

/// Discount factor for year offset t.
inline double discount(double rho, std::size_t t) {
  return std::pow(1.0 + rho, -static_cast<double>(t));
}

/// Sum_t L_t u(c_t) (1+rho)^-t for per-capita consumption `c` (thousand USD)
/// and population `population` (millions).
inline double welfare(std::span<const double> c, std::span<const double> population,
                      const EconParams& p) {
  const Utility u{p.elasticity_marginal_utility};
  double w = 0.0;
  for (std::size_t t = 0; t < c.size(); ++t)
    w += population[t] * u.value(c[t]) * discount(p.time_preference, t);
  return w;
}

}  // namespace sgdice
