// SPDX-License-Identifier: Apache-2.0
//
// Conversion of the five-year DICE2016R2 calibration to an annual step.
//
//  * exogenous series: node values kept exactly; growth-defined series are
//    interpolated geometrically, additive ones linearly;
//  * carbon cycle: principal fifth root of the transfer matrix, or a
//    least-squares column-stochastic fit when the root is not a valid
//    transfer matrix;
//  * capital depreciation: per-year rate with the same steady-state
//    capital/investment ratio as the five-year recursion;
//  * temperature speeds: divided by the step length, then refit on the
//    baseline trajectory of the five-year reference model if the node
//    deviation exceeds tolerance.
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include "sgdice/climate.hpp"
#include "sgdice/economy.hpp"
#include "sgdice/params.hpp"
#include "sgdice/simulate.hpp"

namespace sgdice {

/// Scalar generators of the DICE2016R2 exogenous series at the source step.
struct Dice2016Generator {
  double pop0 = 7403.0, pop_asymptote = 11500.0, pop_adjustment = 0.134;
  double tfp0 = 5.115, tfp_growth0 = 0.076, tfp_decline = 0.005;
  double emissions0 = 35.85, output0 = 105.5, mu0 = 0.03;
  double sigma_growth0 = -0.0152, sigma_decline = -0.001;
  double backstop_price = 550.0, backstop_decline = 0.025;  // USD/tCO2, per step
  double land_emissions0 = 2.6, land_decline = 0.115;       // per step
  double forcing_ex0 = 0.5, forcing_ex1 = 1.0;
  int forcing_ramp_steps = 17;
};

/// Source-resolution series from the DICE2016R2 difference equations.
/// `abatement_exponent` enters the backstop cost fraction.
inline ExogenousPaths generate_dice2016_paths(const Dice2016Generator& g, std::size_t nodes,
                                              int step_years, int start_year,
                                              double abatement_exponent) {
  ExogenousPaths p;
  p.start_year = start_year;
  p.step_years = step_years;
  p.population.resize(nodes);
  p.productivity.resize(nodes);
  p.emissions_intensity.resize(nodes);
  p.land_emissions.resize(nodes);
  p.exogenous_forcing.resize(nodes);
  p.backstop_cost_fraction.resize(nodes);
  const double dt = step_years;
  double pop = g.pop0, tfp = g.tfp0, gsig = g.sigma_growth0;
  double sigma = g.emissions0 / (g.output0 * (1.0 - g.mu0));
  for (std::size_t t = 0; t < nodes; ++t) {
    const double k = static_cast<double>(t);
    p.population[t] = pop;
    p.productivity[t] = tfp;
    p.emissions_intensity[t] = sigma;
    p.land_emissions[t] = g.land_emissions0 * std::pow(1.0 - g.land_decline, k);
    p.exogenous_forcing[t] =
        g.forcing_ex0 + (g.forcing_ex1 - g.forcing_ex0) *
                            std::min(k, static_cast<double>(g.forcing_ramp_steps)) /
                            g.forcing_ramp_steps;
    const double backstop = g.backstop_price * std::pow(1.0 - g.backstop_decline, k);
    p.backstop_cost_fraction[t] = backstop * sigma / abatement_exponent / 1000.0;

    pop = pop * std::pow(g.pop_asymptote / pop, g.pop_adjustment);
    tfp = tfp / (1.0 - g.tfp_growth0 * std::exp(-g.tfp_decline * dt * k));
    sigma = sigma * std::exp(gsig * dt);
    gsig = gsig * std::pow(1.0 + g.sigma_decline, dt);
  }
  return p;
}

/// Annual series from coarse ones. The result has step*(n-1)+1 entries and
/// reproduces every source node exactly.
inline ExogenousPaths annualize_paths(const ExogenousPaths& coarse) {
  validate(coarse, 2);
  const std::size_t n = coarse.size();
  const int step = coarse.step_years;
  const std::size_t m = static_cast<std::size_t>(step) * (n - 1) + 1;
  auto geometric = [&](const std::vector<double>& v) {
    std::vector<double> out(m);
    for (std::size_t y = 0; y < m; ++y) {
      const std::size_t i = y / step, r = y % step;
      out[y] = r == 0 ? v[i] : v[i] * std::pow(v[i + 1] / v[i], static_cast<double>(r) / step);
    }
    return out;
  };
  auto linear = [&](const std::vector<double>& v) {
    std::vector<double> out(m);
    for (std::size_t y = 0; y < m; ++y) {
      const std::size_t i = y / step, r = y % step;
      out[y] = r == 0 ? v[i] : v[i] + (v[i + 1] - v[i]) * static_cast<double>(r) / step;
    }
    return out;
  };
  ExogenousPaths a;
  a.start_year = coarse.start_year;
  a.step_years = 1;
  a.population = geometric(coarse.population);
  a.productivity = geometric(coarse.productivity);
  a.emissions_intensity = geometric(coarse.emissions_intensity);
  a.backstop_cost_fraction = geometric(coarse.backstop_cost_fraction);
  a.land_emissions = linear(coarse.land_emissions);
  a.exogenous_forcing = linear(coarse.exogenous_forcing);
  return a;
}

inline ExogenousPaths truncate(ExogenousPaths p, std::size_t n) {
  detail::require(p.size() >= n, "horizon_years",
                  "source series cover only " + std::to_string(p.size()) + " years");
  for (auto* v : {&p.population, &p.productivity, &p.emissions_intensity, &p.land_emissions,
                  &p.exogenous_forcing, &p.backstop_cost_fraction})
    v->resize(n);
  return p;
}

enum class CarbonFitMethod { PrincipalRoot, LeastSquares };

struct CarbonCycleFit {
  Eigen::Matrix3d annual;
  CarbonFitMethod method = CarbonFitMethod::PrincipalRoot;
  double residual = 0.0;  // max |annual^steps - source| entry
};

namespace detail {

inline Eigen::Matrix3d matrix_power(const Eigen::Matrix3d& m, int k) {
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity();
  for (int i = 0; i < k; ++i) r = r * m;
  return r;
}

inline double power_residual(const Eigen::Matrix3d& annual, const Eigen::Matrix3d& source, int steps) {
  return (matrix_power(annual, steps) - source).cwiseAbs().maxCoeff();
}

/// Sets each diagonal entry so its column sums to exactly 1.
inline void close_columns(Eigen::Matrix3d& m) {
  for (int j = 0; j < 3; ++j) {
    double off = 0.0;
    for (int i = 0; i < 3; ++i)
      if (i != j) off += m(i, j);
    m(j, j) = 1.0 - off;
  }
}

// Off-diagonal entries as squares of the parameters; diagonal closes the column.
struct StochasticRootFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  Eigen::Matrix3d source;
  int steps = 5;

  static Eigen::Matrix3d unpack(const Eigen::VectorXd& p) {
    Eigen::Matrix3d m = Eigen::Matrix3d::Zero();
    int k = 0;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        if (i != j) {
          m(i, j) = p[k] * p[k];
          ++k;
        }
    close_columns(m);
    return m;
  }
  static Eigen::VectorXd pack(const Eigen::Matrix3d& m) {
    Eigen::VectorXd p(6);
    int k = 0;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        if (i != j) p[k++] = std::sqrt(std::max(m(i, j), 0.0));
    return p;
  }
  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    const Eigen::Matrix3d d = matrix_power(unpack(p), steps) - source;
    for (int k = 0; k < 9; ++k) r[k] = d(k % 3, k / 3);
    return 0;
  }
  int inputs() const { return 6; }
  int values() const { return 9; }
};

}  // namespace detail

/// Annual transfer matrix whose `steps`-th power reproduces `source`.
/// Throws CalibrationError when the least-squares fallback misses by more than `fit_tolerance`.
inline CarbonCycleFit annualize_carbon_cycle(const Eigen::Matrix3d& source, int steps = 5,
                                             double fit_tolerance = 1e-3) {
  validate_carbon_transfer(source);
  CarbonCycleFit fit;
  const Eigen::Matrix3d root = source.pow(1.0 / steps);
  const bool valid_root = root.allFinite() && root.minCoeff() >= -1e-14;
  Eigen::Matrix3d start = Eigen::Matrix3d::Identity();
  if (root.allFinite()) start = root.cwiseMax(0.0);
  detail::close_columns(start);
  if (valid_root) {
    fit.annual = start;
    fit.method = CarbonFitMethod::PrincipalRoot;
  } else {
    detail::StochasticRootFunctor f{source, steps};
    Eigen::NumericalDiff<detail::StochasticRootFunctor> nd(f);
    Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::StochasticRootFunctor>> lm(nd);
    lm.parameters.ftol = 1e-15;
    lm.parameters.xtol = 1e-15;
    lm.parameters.maxfev = 20000;
    Eigen::VectorXd p = detail::StochasticRootFunctor::pack(start);
    lm.minimize(p);
    fit.annual = detail::StochasticRootFunctor::unpack(p);
    fit.method = CarbonFitMethod::LeastSquares;
  }
  fit.residual = detail::power_residual(fit.annual, source, steps);
  const double limit = fit.method == CarbonFitMethod::PrincipalRoot ? 1e-6 : fit_tolerance;
  if (fit.residual > limit || fit.annual.minCoeff() < 0.0)
    throw CalibrationError("no valid annual carbon transfer matrix", fit.residual);
  return fit;
}

/// Per-year depreciation whose steady-state capital/investment ratio matches
/// K' = (1-d)^step K + step I.
inline double annualize_depreciation(double per_year_rate, int step) {
  return (1.0 - std::pow(1.0 - per_year_rate, step)) / step;
}

/// Five-year reference model: the DICE2016R2 difference equations at their
/// native step (emissions enter the atmosphere after the transfer). Returns
/// atmospheric temperature at every node, for fixed mu and savings rate.
struct CoarseModel {
  ExogenousPaths paths;  // at the coarse step
  Eigen::Matrix3d carbon_transfer;
  TemperatureResponse temp_response;
  double forcing_2xco2 = 3.6813, m_preindustrial = 588.0, equilibrium_sensitivity = 3.1;
  EconParams econ;  // depreciation per year, compounded over the step
  InitialState initial;

  struct Node {
    double t_atm, t_ocean, m_at, capital, emissions;
  };

  std::vector<Node> run(double mu, double savings, std::size_t nodes) const {
    const double dt = paths.step_years;
    const double lambda = forcing_2xco2 / equilibrium_sensitivity;
    Eigen::Vector3d m(initial.carbon[0], initial.carbon[1], initial.carbon[2]);
    double k = initial.capital, ta = initial.t_atm, to = initial.t_ocean;
    std::vector<Node> out;
    nodes = std::min(nodes, paths.size());
    for (std::size_t t = 0; t < nodes; ++t) {
      const double y = gross_output(paths.productivity[t], k, paths.population[t], econ);
      const double net = y * (1.0 - climate_damage_fraction(ta, econ)) *
                         (1.0 - abatement_cost_fraction(mu, paths.backstop_cost_fraction[t], econ));
      const double e = industrial_emissions(paths.emissions_intensity[t], y, mu) + paths.land_emissions[t];
      out.push_back({ta, to, m[0], k, e});
      if (t + 1 == nodes) break;
      k = std::pow(1.0 - econ.depreciation, dt) * k + dt * savings * net;
      m = carbon_transfer * m;
      m[0] += dt * e / kCo2PerCarbon;
      const double f = forcing_2xco2 * std::log2(m[0] / m_preindustrial) + paths.exogenous_forcing[t + 1];
      const double ta_next = ta + temp_response.atmosphere_speed *
                                      (f - lambda * ta - temp_response.ocean_exchange * (ta - to));
      to = to + temp_response.ocean_speed * (ta - to);
      ta = ta_next;
    }
    return out;
  }
};

/// Baseline policy used to match the annual and coarse models.
struct BaselinePolicy {
  double mu = 0.03;
  double savings = 0.2583;
};

/// Max |T_annual - T_coarse| over the coarse nodes inside the annual horizon.
inline std::vector<double> baseline_node_deviation(const ParamBundle& annual, const CoarseModel& coarse,
                                                   const BaselinePolicy& policy) {
  const std::size_t n = annual.horizon();
  const int step = coarse.paths.step_years;
  const std::size_t nodes = (n - 1) / step + 1;
  const auto ref = coarse.run(policy.mu, policy.savings, nodes);
  ScenarioConfig cfg;
  cfg.baseline_mode = true;
  const Model model(annual, cfg);
  const Trajectory tr = model.run(ControlPath(n, policy.mu, policy.savings, 0.0));
  std::vector<double> dev(ref.size());
  for (std::size_t k = 0; k < ref.size(); ++k) dev[k] = tr[k * step].climate.t_atm - ref[k].t_atm;
  return dev;
}

struct TemperatureFit {
  TemperatureResponse response;
  double max_deviation_before = 0.0;
  double max_deviation_after = 0.0;
  bool refit = false;
};

namespace detail {

struct TemperatureSpeedFunctor {
  using Scalar = double;
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

  const ParamBundle* annual;
  const CoarseModel* coarse;
  BaselinePolicy policy;
  int n_values;

  int operator()(const Eigen::VectorXd& p, Eigen::VectorXd& r) const {
    ParamBundle b = *annual;
    b.climate.temp_response.atmosphere_speed = p[0];
    b.climate.temp_response.ocean_speed = p[1];
    const auto dev = baseline_node_deviation(b, *coarse, policy);
    for (int k = 0; k < n_values; ++k) r[k] = dev[static_cast<std::size_t>(k)];
    return 0;
  }
  int inputs() const { return 2; }
  int values() const { return n_values; }
};

inline double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace detail

/// Rescales the coarse temperature speeds to one year and refits them by
/// least squares on the baseline trajectory when the node deviation exceeds `tolerance`.
inline TemperatureFit annualize_temperature(ParamBundle annual, const CoarseModel& coarse,
                                            const BaselinePolicy& policy, double tolerance = 0.05) {
  const double step = coarse.paths.step_years;
  TemperatureFit fit;
  fit.response = coarse.temp_response;
  fit.response.atmosphere_speed /= step;
  fit.response.ocean_speed /= step;
  annual.climate.temp_response = fit.response;
  fit.max_deviation_before = detail::max_abs(baseline_node_deviation(annual, coarse, policy));
  fit.max_deviation_after = fit.max_deviation_before;
  if (fit.max_deviation_before < tolerance) return fit;

  const auto n_values = static_cast<int>(baseline_node_deviation(annual, coarse, policy).size());
  detail::TemperatureSpeedFunctor f{&annual, &coarse, policy, n_values};
  Eigen::NumericalDiff<detail::TemperatureSpeedFunctor> nd(f);
  Eigen::LevenbergMarquardt<Eigen::NumericalDiff<detail::TemperatureSpeedFunctor>> lm(nd);
  lm.parameters.ftol = 1e-12;
  lm.parameters.xtol = 1e-12;
  Eigen::VectorXd p(2);
  p << fit.response.atmosphere_speed, fit.response.ocean_speed;
  lm.minimize(p);
  annual.climate.temp_response.atmosphere_speed = p[0];
  annual.climate.temp_response.ocean_speed = p[1];
  const double after = detail::max_abs(baseline_node_deviation(annual, coarse, policy));
  fit.refit = true;
  fit.response = annual.climate.temp_response;
  fit.max_deviation_after = after;
  if (!(after < tolerance) || !(p[0] > 0.0) || !(p[1] > 0.0))
    throw CalibrationError("temperature speeds cannot match the baseline within tolerance", after);
  return fit;
}

}  // namespace sgdice
