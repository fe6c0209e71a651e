// SPDX-License-Identifier: Apache-2.0
//
// Carbon cycle, radiative forcing and two-box temperature dynamics.
// One call advances one model step.
#pragma once

#include <array>
#include <cmath>
#include <numbers>

#include "sgdice/errors.hpp"
#include "sgdice/params.hpp"

namespace sgdice {

struct ClimateState {
  std::array<double, 3> carbon{};  // atmosphere, upper ocean/biosphere, lower ocean (GtC)
  double t_atm = 0.0;
  double t_ocean = 0.0;

  double m_at() const noexcept { return carbon[0]; }
  double total_carbon() const noexcept { return carbon[0] + carbon[1] + carbon[2]; }
};

/// Injects `emissions` (GtCO2) into the atmosphere, then applies the transfer
/// matrix. Temperatures are carried through unchanged.
inline ClimateState carbon_step(const ClimateState& state, double emissions,
                                const ClimateParams& params) {
  const Eigen::Vector3d injected(state.carbon[0] + emissions / kCo2PerCarbon, state.carbon[1],
                                 state.carbon[2]);
  const Eigen::Vector3d next = params.carbon_transfer * injected;
  if (!(next[0] > 0.0))
    throw DomainError("carbon_step: atmospheric carbon non-positive after removal of " +
                      std::to_string(-emissions) + " GtCO2");
  ClimateState out = state;
  out.carbon = {next[0], next[1], next[2]};
  return out;
}

/// Total radiative forcing: CO2 term plus exogenous forcing minus solar geoengineering.
inline double forcing(double m_at, double f_exogenous, double f_srm, const ClimateParams& params) {
  return params.forcing_2xco2 * std::log2(m_at / params.m_preindustrial) + f_exogenous - f_srm;
}

/// Advances the two temperature boxes given the forcing at the new step.
inline ClimateState temperature_step(const ClimateState& state, double forcing_next,
                                     const ClimateParams& params) {
  const auto& r = params.temp_response;
  ClimateState out = state;
  out.t_atm = state.t_atm + r.atmosphere_speed * (forcing_next - params.feedback() * state.t_atm -
                                                  r.ocean_exchange * (state.t_atm - state.t_ocean));
  out.t_ocean = state.t_ocean + r.ocean_speed * (state.t_atm - state.t_ocean);
  return out;
}

}  // namespace sgdice
