// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "sgdice/errors.hpp"
#include "sgdice/simulate.hpp"

namespace sgdice {

struct Diagnostics {
  int iterations = 0;         // L-BFGS iterations, summed over outer loops
  int newton_iterations = 0;
  int evaluations = 0;        // objective+gradient evaluations
  double gradient_norm = 0.0; // projected-gradient inf-norm / max(1, |J|)
  int active_lower = 0;
  int active_upper = 0;
  int starts = 0;
  int best_start = 0;         // 0 = deterministic ramp, then random, then warm starts
  int outer_iterations = 0;   // CEA only
  double max_cap_violation = 0.0;  // CEA only
  double seconds = 0.0;
  bool converged = false;
};

/// A solved scenario. `params` is the unmodified calibration; the scenario's
/// overrides are applied again when a Model is rebuilt from it.
struct Solution {
  ParamBundle params;
  ScenarioConfig config;
  ControlPath controls;
  Trajectory trajectory;
  Diagnostics diagnostics;
  double objective = 0.0;  // normalised, penalty included
  double welfare = 0.0;    // unnormalised sum of weighted utility
  bool feasible = true;    // false only for an infeasible CEA verdict
  std::optional<TemperaturePenalty> penalty;  // final CEA multipliers

  Model model() const { return Model(params, config); }
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, Solution best)
      : Error(what), best_(std::move(best)) {}
  ExitCode exit_code() const noexcept override { return ExitCode::Convergence; }
  const Solution& best() const noexcept { return best_; }

 private:
  Solution best_;
};

}  // namespace sgdice
