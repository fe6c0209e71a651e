// SPDX-License-Identifier: Apache-2.0
//
// Parameter file loader.
//
// A parameter file is one JSON document holding a full calibration at its
// source time step (five years for DICE2016R2). Loading converts it to the
// annual model. Schema, version 1:
//
//   schema_version        1 (mandatory)
//   name                  free text
//   start_year            first model year
//   horizon_years         annual horizon (>= 400)
//   source_step_years     step of the source series and coefficients
//   exogenous             either {"generator": "dice2016r2", ...scalars}
//                         or {"series": {population, productivity,
//                             emissions_intensity, land_emissions,
//                             exogenous_forcing, backstop_cost_fraction}}
//                         Series at the source step. On annualization
//                         population, productivity, emissions_intensity and
//                         backstop_cost_fraction are interpolated
//                         geometrically; land_emissions and
//                         exogenous_forcing linearly.
//   climate               forcing_2xco2, m_preindustrial,
//                         equilibrium_sensitivity, carbon_transfer (3x3,
//                         row-major, per source step, columns sum to 1),
//                         temperature {atmosphere_speed, ocean_exchange,
//                         ocean_speed} per source step
//   economy               capital_share, depreciation (per year),
//                         damage_coeff, abatement_exponent, sg_damage_coeff,
//                         sg_damage_exponent, elasticity_marginal_utility,
//                         time_preference (per year)
//   initial_state         capital, carbon [at, up, lo], t_atm, t_ocean
//   limits                mu_initial, mu_baseline, mu_max, f_srm_max
//   calibration           baseline_savings, temperature_tolerance,
//                         carbon_fit_tolerance (all optional)
#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "sgdice/calibration.hpp"
#include "sgdice/errors.hpp"
#include "sgdice/params.hpp"

namespace sgdice {

inline constexpr int kParamSchemaVersion = 1;

/// What the annual conversion did.
struct CalibrationReport {
  int source_step_years = 1;
  CarbonFitMethod carbon_method = CarbonFitMethod::PrincipalRoot;
  double carbon_residual = 0.0;
  Eigen::Matrix3d carbon_transfer_source = Eigen::Matrix3d::Identity();
  double depreciation_source = 0.0;
  TemperatureFit temperature;
  BaselinePolicy baseline;
};

struct LoadedParams {
  ParamBundle bundle;
  CalibrationReport report;
  std::optional<CoarseModel> coarse;  // reference model at the source step, if step > 1
};

namespace detail {

inline std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

/// Reads typed fields and reports the JSON path plus the line of the key's
/// first appearance when something is missing or mistyped.
class JsonReader {
 public:
  explicit JsonReader(const std::string& text) : text_(text) {}

  std::size_t line_of_key(const std::string& key) const {
    const auto pos = text_.find("\"" + key + "\"");
    return pos == std::string::npos ? 0 : line_of_offset(text_, pos);
  }

  const nlohmann::json& object(const nlohmann::json& parent, const std::string& key,
                               const std::string& path) const {
    if (!parent.contains(key)) throw SchemaError("missing object '" + path + key + "'");
    const auto& v = parent.at(key);
    if (!v.is_object()) throw SchemaError("'" + path + key + "' must be an object", line_of_key(key));
    return v;
  }

  double number(const nlohmann::json& parent, const std::string& key, const std::string& path) const {
    if (!parent.contains(key)) throw SchemaError("missing number '" + path + key + "'");
    const auto& v = parent.at(key);
    if (!v.is_number()) throw SchemaError("'" + path + key + "' must be a number", line_of_key(key));
    return v.get<double>();
  }

  double number_or(const nlohmann::json& parent, const std::string& key, const std::string& path,
                   double fallback) const {
    return parent.contains(key) ? number(parent, key, path) : fallback;
  }

  int integer(const nlohmann::json& parent, const std::string& key, const std::string& path) const {
    if (!parent.contains(key)) throw SchemaError("missing integer '" + path + key + "'");
    const auto& v = parent.at(key);
    if (!v.is_number_integer()) throw SchemaError("'" + path + key + "' must be an integer", line_of_key(key));
    return v.get<int>();
  }

  std::vector<double> numbers(const nlohmann::json& parent, const std::string& key,
                              const std::string& path) const {
    if (!parent.contains(key)) throw SchemaError("missing array '" + path + key + "'");
    const auto& v = parent.at(key);
    if (!v.is_array()) throw SchemaError("'" + path + key + "' must be an array", line_of_key(key));
    std::vector<double> out;
    for (const auto& x : v) {
      if (!x.is_number()) throw SchemaError("'" + path + key + "' must hold numbers", line_of_key(key));
      out.push_back(x.get<double>());
    }
    return out;
  }

 private:
  const std::string& text_;
};

inline nlohmann::json parse_json(const std::string& text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw SchemaError(std::string("parse error: ") + e.what(), line_of_offset(text, e.byte));
  }
}

}  // namespace detail

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Parses and converts a parameter document. Throws SchemaError,
/// ValidationError or CalibrationError.
inline LoadedParams parse_params(const std::string& text) {
  const nlohmann::json root = detail::parse_json(text);
  if (!root.is_object()) throw SchemaError("top level must be an object", 1);
  const detail::JsonReader rd(text);
  if (!root.contains("schema_version")) throw SchemaError("missing 'schema_version'");
  const int version = rd.integer(root, "schema_version", "");
  if (version != kParamSchemaVersion)
    throw SchemaError("unsupported schema_version " + std::to_string(version), rd.line_of_key("schema_version"));

  LoadedParams out;
  ParamBundle& b = out.bundle;
  b.name = root.value("name", std::string("unnamed"));
  const int start_year = rd.integer(root, "start_year", "");
  const int horizon = rd.integer(root, "horizon_years", "");
  const int step = rd.integer(root, "source_step_years", "");
  if (step < 1) throw ValidationError("source_step_years", "must be >= 1");
  if (horizon < 400) throw ValidationError("horizon_years", "must be >= 400");

  const auto& econ = rd.object(root, "economy", "");
  EconParams& e = b.econ;
  e.capital_share = rd.number(econ, "capital_share", "economy.");
  e.depreciation = rd.number(econ, "depreciation", "economy.");
  e.damage_coeff = rd.number(econ, "damage_coeff", "economy.");
  e.abatement_exponent = rd.number(econ, "abatement_exponent", "economy.");
  e.sg_damage_coeff = rd.number(econ, "sg_damage_coeff", "economy.");
  e.sg_damage_exponent = rd.integer(econ, "sg_damage_exponent", "economy.");
  e.elasticity_marginal_utility = rd.number(econ, "elasticity_marginal_utility", "economy.");
  e.time_preference = rd.number(econ, "time_preference", "economy.");
  validate(e);

  const auto& clim = rd.object(root, "climate", "");
  ClimateParams& c = b.climate;
  c.forcing_2xco2 = rd.number(clim, "forcing_2xco2", "climate.");
  c.m_preindustrial = rd.number(clim, "m_preindustrial", "climate.");
  c.equilibrium_sensitivity = rd.number(clim, "equilibrium_sensitivity", "climate.");
  if (!clim.contains("carbon_transfer") || !clim["carbon_transfer"].is_array() ||
      clim["carbon_transfer"].size() != 3)
    throw SchemaError("'climate.carbon_transfer' must be a 3x3 array", rd.line_of_key("carbon_transfer"));
  Eigen::Matrix3d phi;
  for (int i = 0; i < 3; ++i) {
    const auto& row = clim["carbon_transfer"][static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != 3)
      throw SchemaError("'climate.carbon_transfer' must be a 3x3 array", rd.line_of_key("carbon_transfer"));
    for (int j = 0; j < 3; ++j) {
      if (!row[static_cast<std::size_t>(j)].is_number())
        throw SchemaError("'climate.carbon_transfer' must hold numbers", rd.line_of_key("carbon_transfer"));
      phi(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
  }
  validate_carbon_transfer(phi);
  const auto& temp = rd.object(clim, "temperature", "climate.");
  TemperatureResponse tr_source{rd.number(temp, "atmosphere_speed", "climate.temperature."),
                                rd.number(temp, "ocean_exchange", "climate.temperature."),
                                rd.number(temp, "ocean_speed", "climate.temperature.")};

  const auto& init = rd.object(root, "initial_state", "");
  b.initial.capital = rd.number(init, "capital", "initial_state.");
  const auto carbon = rd.numbers(init, "carbon", "initial_state.");
  if (carbon.size() != 3) throw SchemaError("'initial_state.carbon' must have 3 entries", rd.line_of_key("carbon"));
  b.initial.carbon = {carbon[0], carbon[1], carbon[2]};
  b.initial.t_atm = rd.number(init, "t_atm", "initial_state.");
  b.initial.t_ocean = rd.number(init, "t_ocean", "initial_state.");

  if (root.contains("limits")) {
    const auto& lim = rd.object(root, "limits", "");
    b.limits.mu_initial = rd.number_or(lim, "mu_initial", "limits.", b.limits.mu_initial);
    b.limits.mu_baseline = rd.number_or(lim, "mu_baseline", "limits.", b.limits.mu_baseline);
    b.limits.mu_max = rd.number_or(lim, "mu_max", "limits.", b.limits.mu_max);
    b.limits.f_srm_max = rd.number_or(lim, "f_srm_max", "limits.", b.limits.f_srm_max);
  }

  // Source-step exogenous series.
  const auto& exo = rd.object(root, "exogenous", "");
  const std::size_t nodes = static_cast<std::size_t>((horizon - 1) / step + 2);
  ExogenousPaths source;
  if (exo.contains("generator")) {
    if (exo["generator"] != "dice2016r2")
      throw SchemaError("unknown exogenous generator", rd.line_of_key("generator"));
    Dice2016Generator g;
    const auto& pop = rd.object(exo, "population", "exogenous.");
    g.pop0 = rd.number(pop, "initial", "exogenous.population.");
    g.pop_asymptote = rd.number(pop, "asymptote", "exogenous.population.");
    g.pop_adjustment = rd.number(pop, "adjustment", "exogenous.population.");
    const auto& tfp = rd.object(exo, "productivity", "exogenous.");
    g.tfp0 = rd.number(tfp, "initial", "exogenous.productivity.");
    g.tfp_growth0 = rd.number(tfp, "growth0", "exogenous.productivity.");
    g.tfp_decline = rd.number(tfp, "growth_decline", "exogenous.productivity.");
    const auto& sig = rd.object(exo, "emissions_intensity", "exogenous.");
    g.emissions0 = rd.number(sig, "emissions0", "exogenous.emissions_intensity.");
    g.output0 = rd.number(sig, "output0", "exogenous.emissions_intensity.");
    g.mu0 = rd.number(sig, "mu0", "exogenous.emissions_intensity.");
    g.sigma_growth0 = rd.number(sig, "growth0", "exogenous.emissions_intensity.");
    g.sigma_decline = rd.number(sig, "growth_decline", "exogenous.emissions_intensity.");
    const auto& back = rd.object(exo, "backstop", "exogenous.");
    g.backstop_price = rd.number(back, "price0", "exogenous.backstop.");
    g.backstop_decline = rd.number(back, "decline_per_step", "exogenous.backstop.");
    const auto& land = rd.object(exo, "land_emissions", "exogenous.");
    g.land_emissions0 = rd.number(land, "initial", "exogenous.land_emissions.");
    g.land_decline = rd.number(land, "decline_per_step", "exogenous.land_emissions.");
    const auto& fex = rd.object(exo, "exogenous_forcing", "exogenous.");
    g.forcing_ex0 = rd.number(fex, "initial", "exogenous.exogenous_forcing.");
    g.forcing_ex1 = rd.number(fex, "final", "exogenous.exogenous_forcing.");
    g.forcing_ramp_steps = rd.integer(fex, "ramp_steps", "exogenous.exogenous_forcing.");
    if (g.forcing_ramp_steps < 1) throw ValidationError("exogenous.exogenous_forcing.ramp_steps", "must be >= 1");
    source = generate_dice2016_paths(g, nodes, step, start_year, e.abatement_exponent);
  } else {
    const auto& s = rd.object(exo, "series", "exogenous.");
    source.start_year = start_year;
    source.step_years = step;
    source.population = rd.numbers(s, "population", "exogenous.series.");
    source.productivity = rd.numbers(s, "productivity", "exogenous.series.");
    source.emissions_intensity = rd.numbers(s, "emissions_intensity", "exogenous.series.");
    source.land_emissions = rd.numbers(s, "land_emissions", "exogenous.series.");
    source.exogenous_forcing = rd.numbers(s, "exogenous_forcing", "exogenous.series.");
    source.backstop_cost_fraction = rd.numbers(s, "backstop_cost_fraction", "exogenous.series.");
  }

  BaselinePolicy policy;
  double temp_tol = 0.05, carbon_tol = 1e-3;
  if (root.contains("calibration")) {
    const auto& cal = rd.object(root, "calibration", "");
    policy.savings = rd.number_or(cal, "baseline_savings", "calibration.", policy.savings);
    temp_tol = rd.number_or(cal, "temperature_tolerance", "calibration.", temp_tol);
    carbon_tol = rd.number_or(cal, "carbon_fit_tolerance", "calibration.", carbon_tol);
  }
  policy.mu = b.limits.mu_baseline;

  CalibrationReport& rep = out.report;
  rep.source_step_years = step;
  rep.carbon_transfer_source = phi;
  rep.depreciation_source = e.depreciation;
  rep.baseline = policy;
  if (step == 1) {
    validate(source, static_cast<std::size_t>(horizon));
    b.paths = truncate(source, static_cast<std::size_t>(horizon));
    c.carbon_transfer = phi;
    c.temp_response = tr_source;
    rep.temperature.response = tr_source;
  } else {
    validate(source, 2);
    b.paths = truncate(annualize_paths(source), static_cast<std::size_t>(horizon));
    const CarbonCycleFit fit = annualize_carbon_cycle(phi, step, carbon_tol);
    c.carbon_transfer = fit.annual;
    rep.carbon_method = fit.method;
    rep.carbon_residual = fit.residual;
    CoarseModel coarse{source, phi, tr_source, c.forcing_2xco2, c.m_preindustrial,
                       c.equilibrium_sensitivity, e, b.initial};
    b.econ.depreciation = annualize_depreciation(e.depreciation, step);
    c.temp_response = tr_source;  // placeholder until fitted
    c.temp_response.atmosphere_speed /= step;
    c.temp_response.ocean_speed /= step;
    validate(b);
    rep.temperature = annualize_temperature(b, coarse, policy, temp_tol);
    c.temp_response = rep.temperature.response;
    out.coarse = std::move(coarse);
  }
  validate(b);
  return out;
}

inline LoadedParams load_params(const std::string& path) { return parse_params(read_text_file(path)); }

}  // namespace sgdice
