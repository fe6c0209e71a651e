// SPDX-License-Identifier: Apache-2.0
//
// Calibration data for the annual climate-economy model.
//
// All quantities follow the DICE unit conventions: output and capital in
// trillions of 2010 USD, population in millions, carbon stocks in GtC,
// emissions in GtCO2 per year, forcing in W/m^2, temperatures in degrees C
// above 1900.
#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sgdice/errors.hpp"

namespace sgdice {

/// GtCO2 per GtC.
inline constexpr double kCo2PerCarbon = 3.666;

/// Per-year exogenous inputs. Entry t belongs to calendar year `start_year + t`
/// (or to `start_year + step * t` for coarser source series).
struct ExogenousPaths {
  int start_year = 2015;
  int step_years = 1;
  std::vector<double> population;             // millions
  std::vector<double> productivity;           // TFP, output-scale factor
  std::vector<double> emissions_intensity;    // GtCO2 per trillion USD of gross output
  std::vector<double> land_emissions;         // GtCO2/yr
  std::vector<double> exogenous_forcing;      // W/m^2
  std::vector<double> backstop_cost_fraction; // fraction of gross output at mu = 1

  std::size_t size() const noexcept { return population.size(); }
  int year(std::size_t t) const noexcept { return start_year + step_years * static_cast<int>(t); }
};

/// Two-box temperature model coefficients for one model step.
struct TemperatureResponse {
  double atmosphere_speed = 0.0;  // c1
  double ocean_exchange = 0.0;    // c3, W/m^2 per degree
  double ocean_speed = 0.0;       // c4
};

struct ClimateParams {
  double forcing_2xco2 = 3.6813;   // W/m^2
  double m_preindustrial = 588.0;  // GtC
  Eigen::Matrix3d carbon_transfer = Eigen::Matrix3d::Identity();
  TemperatureResponse temp_response;
  double equilibrium_sensitivity = 3.1;

  /// Climate feedback parameter (W/m^2 per degree).
  double feedback() const noexcept { return forcing_2xco2 / equilibrium_sensitivity; }
};

struct EconParams {
  double capital_share = 0.3;
  double depreciation = 0.1;  // per model step
  double damage_coeff = 0.00236;
  double abatement_exponent = 2.8;
  double sg_damage_coeff = 0.022;
  int sg_damage_exponent = 2;
  double elasticity_marginal_utility = 1.45;
  double time_preference = 0.015;  // per year
};

struct InitialState {
  double capital = 223.0;
  std::array<double, 3> carbon{851.0, 460.0, 1740.0};
  double t_atm = 0.85;
  double t_ocean = 0.0068;
};

/// Numerical bounds and fixed first-period policy.
struct ControlLimits {
  double mu_initial = 0.03;   // fixed control in the first year
  double mu_baseline = 0.03;  // baseline policy level
  double mu_max = 10.0;       // numerical cap when removal is allowed
  double f_srm_max = 20.0;    // W/m^2
};

struct ParamBundle {
  std::string name;
  ExogenousPaths paths;
  ClimateParams climate;
  EconParams econ;
  InitialState initial;
  ControlLimits limits;

  std::size_t horizon() const noexcept { return paths.size(); }
};

namespace detail {

inline void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ValidationError(field, what);
}

inline void require_series(const std::vector<double>& v, std::size_t n, const std::string& field,
                           bool positive) {
  require(v.size() == n, field, "length " + std::to_string(v.size()) + " != " + std::to_string(n));
  for (std::size_t i = 0; i < v.size(); ++i) {
    require(std::isfinite(v[i]), field, "non-finite entry at index " + std::to_string(i));
    if (positive) require(v[i] > 0.0, field, "entry " + std::to_string(i) + " must be > 0");
  }
}

inline void require_strictly_decreasing(const std::vector<double>& v, const std::string& field) {
  for (std::size_t i = 1; i < v.size(); ++i)
    require(v[i] < v[i - 1], field, "must be strictly decreasing (index " + std::to_string(i) + ")");
}

}  // namespace detail

/// Throws ValidationError naming the offending field. `min_horizon` applies to
/// annual paths; coarse source series pass 2.
inline void validate(const ExogenousPaths& p, std::size_t min_horizon = 400) {
  using detail::require;
  const std::size_t n = p.population.size();
  require(p.step_years >= 1, "step_years", "must be >= 1");
  require(n >= min_horizon, "population", "horizon " + std::to_string(n) + " shorter than " +
                                              std::to_string(min_horizon));
  detail::require_series(p.population, n, "population", true);
  detail::require_series(p.productivity, n, "productivity", true);
  detail::require_series(p.emissions_intensity, n, "emissions_intensity", true);
  detail::require_series(p.land_emissions, n, "land_emissions", false);
  detail::require_series(p.exogenous_forcing, n, "exogenous_forcing", false);
  detail::require_series(p.backstop_cost_fraction, n, "backstop_cost_fraction", true);
  detail::require_strictly_decreasing(p.emissions_intensity, "emissions_intensity");
  detail::require_strictly_decreasing(p.backstop_cost_fraction, "backstop_cost_fraction");
}

/// Column sums of a transfer matrix must be 1 within `tol`, entries in [0, 1].
inline void validate_carbon_transfer(const Eigen::Matrix3d& m, double tol = 1e-9) {
  for (int j = 0; j < 3; ++j) {
    const double sum = m.col(j).sum();
    detail::require(std::abs(sum - 1.0) <= tol, "carbon_transfer",
                    "column " + std::to_string(j) + " sums to " + std::to_string(sum));
    for (int i = 0; i < 3; ++i)
      detail::require(m(i, j) >= 0.0 && m(i, j) <= 1.0, "carbon_transfer",
                      "entry (" + std::to_string(i) + "," + std::to_string(j) + ") outside [0, 1]");
  }
}

inline void validate(const ClimateParams& c) {
  using detail::require;
  require(c.forcing_2xco2 > 0.0, "forcing_2xco2", "must be > 0");
  require(c.m_preindustrial > 0.0, "m_preindustrial", "must be > 0");
  require(c.equilibrium_sensitivity > 0.0, "equilibrium_sensitivity", "must be > 0");
  validate_carbon_transfer(c.carbon_transfer);
  require(c.temp_response.atmosphere_speed > 0.0, "temperature.atmosphere_speed", "must be > 0");
  require(c.temp_response.ocean_exchange >= 0.0, "temperature.ocean_exchange", "must be >= 0");
  require(c.temp_response.ocean_speed > 0.0, "temperature.ocean_speed", "must be > 0");
}

inline void validate(const EconParams& e) {
  using detail::require;
  require(e.capital_share > 0.0 && e.capital_share < 1.0, "capital_share", "must lie in (0, 1)");
  require(e.depreciation > 0.0 && e.depreciation < 1.0, "depreciation", "must lie in (0, 1)");
  require(e.damage_coeff > 0.0, "damage_coeff", "must be > 0");
  require(e.abatement_exponent > 1.0, "abatement_exponent", "must be > 1");
  require(e.sg_damage_coeff >= 0.0, "sg_damage_coeff", "must be >= 0");
  require(e.sg_damage_exponent == 1 || e.sg_damage_exponent == 2, "sg_damage_exponent",
          "must be 1 or 2");
  require(e.elasticity_marginal_utility > 0.0, "elasticity_marginal_utility", "must be > 0");
  require(e.time_preference >= 0.0, "time_preference", "must be >= 0");
}

inline void validate(const ParamBundle& b) {
  validate(b.paths);
  validate(b.climate);
  validate(b.econ);
  using detail::require;
  require(b.initial.capital > 0.0, "initial.capital", "must be > 0");
  for (double m : b.initial.carbon) require(m > 0.0, "initial.carbon", "reservoirs must be > 0");
  require(b.limits.mu_max >= 1.0, "limits.mu_max", "must be >= 1");
  require(b.limits.f_srm_max > 0.0, "limits.f_srm_max", "must be > 0");
}

}  // namespace sgdice
