// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>

#include "sgdice/params.hpp"

namespace sgdice {

enum class Mode { Cba, Cea };

inline const char* to_string(Mode m) { return m == Mode::Cba ? "cba" : "cea"; }

/// Parameter deltas applied on top of the default calibration.
struct Overrides {
  std::optional<double> time_preference;
  double damage_multiplier = 1.0;
  std::optional<int> sg_damage_exponent;
  double sg_damage_multiplier = 1.0;

  bool operator==(const Overrides&) const = default;
};

struct ScenarioConfig {
  std::string name;
  bool allow_cdr = false;
  bool allow_sg = false;
  Mode mode = Mode::Cba;
  double t_cap = 2.0;          // degrees C, CEA only
  bool baseline_mode = false;  // mu pinned at the baseline level, no CDR or SG
  Overrides overrides;
  int terminal_years = 100;       // post-horizon years valued at the final-year utility
  int fixed_savings_years = 20;   // trailing years with savings pinned to the steady-state rate
};

inline void validate(const ScenarioConfig& c) {
  using detail::require;
  require(!(c.baseline_mode && (c.allow_cdr || c.allow_sg)), "baseline_mode",
          "baseline excludes CDR and SG");
  require(!(c.baseline_mode && c.mode == Mode::Cea), "baseline_mode", "baseline is CBA only");
  if (c.mode == Mode::Cea) require(c.t_cap > 0.0, "t_cap", "must be > 0");
  require(c.terminal_years >= 0, "terminal_years", "must be >= 0");
  require(c.fixed_savings_years >= 0, "fixed_savings_years", "must be >= 0");
  const auto& o = c.overrides;
  if (o.time_preference) require(*o.time_preference >= 0.0, "overrides.time_preference", ">= 0");
  require(o.damage_multiplier > 0.0, "overrides.damage_multiplier", "must be > 0");
  require(o.sg_damage_multiplier >= 0.0, "overrides.sg_damage_multiplier", "must be >= 0");
  if (o.sg_damage_exponent)
    require(*o.sg_damage_exponent == 1 || *o.sg_damage_exponent == 2,
            "overrides.sg_damage_exponent", "must be 1 or 2");
}

inline ParamBundle apply_overrides(ParamBundle b, const Overrides& o) {
  if (o.time_preference) b.econ.time_preference = *o.time_preference;
  b.econ.damage_coeff *= o.damage_multiplier;
  if (o.sg_damage_exponent) b.econ.sg_damage_exponent = *o.sg_damage_exponent;
  b.econ.sg_damage_coeff *= o.sg_damage_multiplier;
  return b;
}

/// Named sensitivity cases: S1 3%/yr discounting, S2 zero discounting,
/// S3 doubled climate damages, S4 linear SG side effects, S5 doubled and
/// S6 one tenth of the SG side-effect coefficient.
inline std::optional<Overrides> sensitivity_overrides(const std::string& name) {
  Overrides o;
  if (name == "S1") o.time_preference = 0.03;
  else if (name == "S2") o.time_preference = 0.0;
  else if (name == "S3") o.damage_multiplier = 2.0;
  else if (name == "S4") o.sg_damage_exponent = 1;
  else if (name == "S5") o.sg_damage_multiplier = 2.0;
  else if (name == "S6") o.sg_damage_multiplier = 0.1;
  else if (name != "default") return std::nullopt;
  return o;
}

/// The four policy portfolios plus the baseline.
enum class Portfolio { Baseline, MitigationOnly, MitigationCdr, MitigationSg, Full };

inline ScenarioConfig make_config(Portfolio p, std::string name = {}) {
  ScenarioConfig c;
  c.name = std::move(name);
  c.baseline_mode = p == Portfolio::Baseline;
  c.allow_cdr = p == Portfolio::MitigationCdr || p == Portfolio::Full;
  c.allow_sg = p == Portfolio::MitigationSg || p == Portfolio::Full;
  return c;
}

}  // namespace sgdice
