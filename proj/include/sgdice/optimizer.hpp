// SPDX-License-Identifier: Apache-2.0
//
// Scenario optimisation by direct transcription: every control of every
// year is one decision variable, bounded per the scenario's box, and the
// adjoint gradient drives the bound-constrained solver.
#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numbers>
#include <random>

#include "sgdice/box_optimizer.hpp"
#include "sgdice/metrics.hpp"
#include "sgdice/solution.hpp"

namespace sgdice {

struct SolverOptions {
  BoxOptions box{.tolerance = 1e-10};  // polish well below the acceptance threshold
  double kkt_tolerance = 1e-6;         // relative projected-gradient norm for "converged"
  int random_starts = 3;
  std::uint64_t seed = 20190601;
  std::vector<ControlPath> warm_starts;  // e.g. solutions of nested portfolios

  // Cost-effectiveness mode.
  double cap_tolerance = 0.01;  // degrees C
  int max_outer_iterations = 40;
  double initial_penalty_weight = 0.1;
};

namespace detail {

inline std::vector<double> pack(const ControlPath& p) {
  std::vector<double> x;
  x.reserve(3 * p.size());
  x.insert(x.end(), p.mu.begin(), p.mu.end());
  x.insert(x.end(), p.savings.begin(), p.savings.end());
  x.insert(x.end(), p.f_srm.begin(), p.f_srm.end());
  return x;
}

inline ControlPath unpack(const std::vector<double>& x) {
  const std::size_t n = x.size() / 3;
  ControlPath p(n);
  std::copy_n(x.begin(), n, p.mu.begin());
  std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(n), n, p.savings.begin());
  std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(2 * n), n, p.f_srm.begin());
  return p;
}

inline ControlPath clamp_to(ControlPath u, const ControlBounds& b) {
  for (std::size_t t = 0; t < u.size(); ++t) {
    u.mu[t] = std::clamp(u.mu[t], b.lower.mu[t], b.upper.mu[t]);
    u.savings[t] = std::clamp(u.savings[t], b.lower.savings[t], b.upper.savings[t]);
    u.f_srm[t] = std::clamp(u.f_srm[t], b.lower.f_srm[t], b.upper.f_srm[t]);
  }
  return u;
}

/// mu ramps linearly to 1 over `ramp_years`, then holds `mu_end`; flat savings and SG.
inline ControlPath ramp_path(const Model& m, double ramp_years, double mu_end, double savings,
                             double f_srm) {
  const std::size_t n = m.horizon();
  const double mu0 = m.params().limits.mu_initial;
  ControlPath u(n);
  for (std::size_t t = 0; t < n; ++t) {
    const double x = static_cast<double>(t) / ramp_years;
    u.mu[t] = x < 1.0 ? mu0 + (1.0 - mu0) * x : mu_end;
    u.savings[t] = savings;
    u.f_srm[t] = f_srm;
  }
  return clamp_to(u, m.bounds());
}

inline ControlPath default_start(const Model& m) { return ramp_path(m, 100.0, 1.0, 0.25, 0.0); }

// Uniform [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementation.
inline double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline ControlPath random_start(const Model& m, std::mt19937_64& rng) {
  const double ramp = 50.0 + 100.0 * unit(rng);
  const double mu_end = 1.0 + 0.3 * unit(rng);  // clipped to 1 without removal
  const double s = 0.2 + 0.1 * unit(rng);
  const double sg = 2.0 * unit(rng);
  return ramp_path(m, ramp, mu_end, s, sg);
}

inline BoxResult solve_box(const Model& m, const ControlPath& start, const BoxOptions& opt,
                           const TemperaturePenalty* penalty) {
  const auto lo = pack(m.bounds().lower), hi = pack(m.bounds().upper);
  auto f = [&](const std::vector<double>& x, std::vector<double>& g) {
    ControlPath grad;
    const double v = m.objective_and_gradient(unpack(x), grad, penalty);
    g = pack(grad);
    return v;
  };
  return maximize_box(f, pack(clamp_to(start, m.bounds())), lo, hi, opt);
}

inline Solution make_solution(const ParamBundle& params, const ScenarioConfig& config,
                              const Model& m, const BoxResult& r, double kkt_tolerance) {
  Solution s;
  s.params = params;
  s.config = config;
  s.controls = unpack(r.x);
  s.trajectory = m.run(s.controls);
  s.objective = r.value;
  s.welfare = m.welfare(s.trajectory);
  auto& d = s.diagnostics;
  d.iterations = r.iterations;
  d.newton_iterations = r.newton_iterations;
  d.evaluations = r.evaluations;
  d.gradient_norm = r.gradient_norm;
  d.active_lower = r.active_lower;
  d.active_upper = r.active_upper;
  d.converged = r.gradient_norm < kkt_tolerance;
  return s;
}

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace detail

inline Solution optimize_cea(const ParamBundle& params, const ScenarioConfig& config,
                      const SolverOptions& opt = {});

/// Welfare-maximising controls for a CBA scenario (CEA configs are forwarded
/// to optimize_cea). Runs the deterministic ramp start, `random_starts`
/// seeded random starts and any warm starts; reports the best converged
/// result. Throws ConvergenceError carrying the best path when none converge.
inline Solution optimize(const ParamBundle& params, const ScenarioConfig& config,
                         const SolverOptions& opt = {}) {
  if (config.mode == Mode::Cea) return optimize_cea(params, config, opt);
  const auto t0 = std::chrono::steady_clock::now();
  const Model m(params, config);
  std::vector<ControlPath> starts{detail::default_start(m)};
  std::mt19937_64 rng(opt.seed);
  for (int k = 0; k < opt.random_starts; ++k) starts.push_back(detail::random_start(m, rng));
  for (const auto& w : opt.warm_starts) {
    if (w.size() != m.horizon()) throw ValidationError("warm_starts", "length must equal horizon");
    starts.push_back(detail::clamp_to(w, m.bounds()));
  }

  std::optional<Solution> best, best_any;
  int evaluations = 0;
  for (std::size_t k = 0; k < starts.size(); ++k) {
    const BoxResult r = detail::solve_box(m, starts[k], opt.box, nullptr);
    evaluations += r.evaluations;
    Solution s = detail::make_solution(params, config, m, r, opt.kkt_tolerance);
    s.diagnostics.best_start = static_cast<int>(k);
    if (!best_any || s.objective > best_any->objective) best_any = s;
    if (s.diagnostics.converged && s.trajectory.feasible() && (!best || s.objective > best->objective))
      best = std::move(s);
  }
  Solution& out = best ? *best : *best_any;
  out.diagnostics.starts = static_cast<int>(starts.size());
  out.diagnostics.evaluations = evaluations;
  out.diagnostics.seconds = detail::seconds_since(t0);
  if (!best)
    throw ConvergenceError("optimize: no start of '" + config.name + "' converged (best gradient norm " +
                               std::to_string(out.diagnostics.gradient_norm) + ")",
                           out);
  return out;
}

/// Welfare without temperature damages subject to T_atm <= t_cap, by an
/// augmented Lagrangian on the per-year cap. A phase-1 solve minimises the
/// squared exceedance alone; if even that leaves more than `cap_tolerance`,
/// the result is an infeasible verdict (feasible = false) holding the
/// least-violating path.
inline Solution optimize_cea(const ParamBundle& params, const ScenarioConfig& config,
                             const SolverOptions& opt) {
  if (config.mode != Mode::Cea) throw ValidationError("mode", "optimize_cea requires CEA mode");
  const auto t0 = std::chrono::steady_clock::now();
  const Model m(params, config);
  const std::size_t n = m.horizon();

  TemperaturePenalty feas{config.t_cap, 1.0, {}, false};
  const BoxResult r1 = detail::solve_box(m, detail::default_start(m), opt.box, &feas);
  const double v1 = m.max_cap_violation(m.run(detail::unpack(r1.x)), config.t_cap);
  if (v1 > opt.cap_tolerance) {
    Solution s = detail::make_solution(params, config, m, r1, opt.kkt_tolerance);
    s.feasible = false;
    s.diagnostics.max_cap_violation = v1;
    s.diagnostics.starts = 1;
    s.diagnostics.seconds = detail::seconds_since(t0);
    return s;
  }

  TemperaturePenalty pen{config.t_cap, opt.initial_penalty_weight, std::vector<double>(n, 0.0), true};
  ControlPath x = detail::default_start(m);
  for (const auto& w : opt.warm_starts)
    if (w.size() == n) x = detail::clamp_to(w, m.bounds());
  double prev_violation = std::numeric_limits<double>::infinity();
  int iterations = 0, evaluations = r1.evaluations;
  std::optional<Solution> last;
  for (int k = 1; k <= opt.max_outer_iterations; ++k) {
    const BoxResult r = detail::solve_box(m, x, opt.box, &pen);
    iterations += r.iterations;
    evaluations += r.evaluations;
    x = detail::unpack(r.x);
    last = detail::make_solution(params, config, m, r, opt.kkt_tolerance);
    last->penalty = pen;
    const double v = m.max_cap_violation(last->trajectory, config.t_cap);
    last->diagnostics.max_cap_violation = v;
    last->diagnostics.outer_iterations = k;
    if (v < 0.1 * opt.cap_tolerance && last->diagnostics.converged) break;
    for (std::size_t t = 1; t < n; ++t)
      pen.multipliers[t] =
          std::max(0.0, pen.multipliers[t] + pen.weight * (last->trajectory[t].climate.t_atm - config.t_cap));
    if (v > 0.25 * prev_violation) pen.weight *= 10.0;
    prev_violation = v;
  }
  Solution& out = *last;
  out.diagnostics.iterations = iterations;
  out.diagnostics.evaluations = evaluations;
  out.diagnostics.starts = 1;
  out.diagnostics.seconds = detail::seconds_since(t0);
  out.diagnostics.converged =
      out.diagnostics.converged && out.diagnostics.max_cap_violation < opt.cap_tolerance;
  if (!out.diagnostics.converged)
    throw ConvergenceError("optimize_cea: '" + config.name + "' did not satisfy the cap within " +
                               std::to_string(opt.max_outer_iterations) + " outer iterations",
                           out);
  return out;
}

struct SgPerturbation {
  double scale = 1.0;
  Trajectory trajectory;
  double welfare = 0.0;
  double bge_percent = 0.0;  // vs baseline
};

/// Re-simulates `opt` with its SG path multiplied by `scale`, mitigation and
/// savings held fixed, and values it against `baseline`.
inline SgPerturbation perturb_sg(const Solution& opt, double scale, const Solution& baseline) {
  if (!std::isfinite(scale) || scale < 0.0) throw ValidationError("scale", "must be finite and >= 0");
  ControlPath u = opt.controls;
  for (double& f : u.f_srm) f *= scale;
  ScenarioConfig c = opt.config;
  c.mode = Mode::Cba;
  const Model m(opt.params, c);
  SgPerturbation out;
  out.scale = scale;
  out.trajectory = m.run(u);
  out.welfare = m.welfare(out.trajectory);
  out.bge_percent = bge_percent(baseline.model(), baseline.trajectory, out.welfare);
  return out;
}

}  // namespace sgdice
