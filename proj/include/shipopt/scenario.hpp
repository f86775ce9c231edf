#pragma once

#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace shipopt {

/// One diesel generating set. Power in MW, times in minutes, ramps in
/// MW/min, start-up cost in EUR. c_min/c_max/alpha/beta are fractions of
/// rated power.
struct DieselGenSpec {
  std::string id;
  double rated_power = 0.0;
  double c_min = 0.0;
  double c_max = 1.0;
  double min_up_time = 0.0;
  double min_down_time = 0.0;
  double ramp_up = 0.0;
  double ramp_down = 0.0;
  double alpha = 1.0;
  double beta = 1.0;
  double startup_cost = 0.0;
  /// Datasheet samples (power fraction of rated, specific consumption in
  /// g/kWh), strictly increasing in the first coordinate.
  std::vector<std::pair<double, double>> sfoc_points;

  bool operator==(const DieselGenSpec&) const = default;
};

/// Battery storage incl. converter. SOC values are fractions of rated
/// energy; C-rate coefficients scale rated power.
struct BessSpec {
  double rated_power = 0.0;   // MW
  double rated_energy = 0.0;  // MWh
  double soc_initial = 0.5;
  double soc_final = 0.5;
  double soc_min = 0.0;
  double soc_max = 1.0;
  double eta_charge = 1.0;
  double eta_discharge = 1.0;
  double c_charge_min = 0.0;
  double c_charge_max = 1.0;
  double c_discharge_min = 0.0;
  double c_discharge_max = 1.0;
  double alpha = 1.0;
  /// Emergency load-step fraction. Defaults to alpha when the scenario
  /// file omits it (the converter can step to full emergency rating).
  double beta = 1.0;

  bool operator==(const BessSpec&) const = default;
};

struct SecurityConfig {
  double big_m = 1e9;
  std::set<std::string> v_active_ocs;
  int min_online_units = 2;

  bool operator==(const SecurityConfig&) const = default;
};

/// On/off status and dispatched power of one unit just before the horizon.
struct InitialUnitState {
  bool on = false;
  double power = 0.0;  // MW

  bool operator==(const InitialUnitState&) const = default;
};

struct ScenarioConfig {
  std::vector<DieselGenSpec> dgs;
  std::optional<BessSpec> bess;
  double fuel_price = 0.0;  // EUR per kg
  double co2_factor = 0.0;  // kg CO2 per kg fuel
  double dt = 0.0;          // hours
  int horizon = 0;          // steps
  int n_segments = 1;
  SecurityConfig security;
  /// Keyed by DG id; units not listed start off at zero power.
  std::vector<std::pair<std::string, InitialUnitState>> initial_commitment;

  int num_dgs() const { return static_cast<int>(dgs.size()); }
  /// Generating units counted for security: all DGs plus the BESS.
  int num_units() const { return num_dgs() + (bess ? 1 : 0); }
  /// Step length in minutes.
  double dt_minutes() const { return dt * 60.0; }
  /// Minimum up time of DG i expressed in steps.
  int min_up_steps(int i) const;
  int min_down_steps(int i) const;
  /// Initial state of DG i (all-off default when not listed).
  InitialUnitState initial_state(int i) const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parses and validates a scenario file. Throws ParseError on malformed
/// JSON and ValidationError naming the first violated invariant.
ScenarioConfig load_scenario(const std::string& path);

/// Same, from an in-memory JSON document.
ScenarioConfig parse_scenario(const std::string& json_text);

/// Re-checks every invariant of an already constructed config.
void validate_scenario(const ScenarioConfig& config);

}  // namespace shipopt
