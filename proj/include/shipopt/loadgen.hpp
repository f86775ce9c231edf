#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shipopt/scenario.hpp"

namespace shipopt {

/// One ship operating mode: hotel load, admissible speeds, and whether the
/// blackout-prevention constraints are active while in it.
struct OperatingCondition {
  std::string name;
  double hotel_load = 0.0;          // MW
  std::vector<double> sog_states;   // knots, strictly increasing
  bool security_active = false;
};

/// First-order Markov chain over discrete speed-over-ground states.
struct MarkovChain {
  std::vector<double> states;                    // knots
  std::vector<std::vector<double>> transition;   // row-stochastic

  int num_states() const { return static_cast<int>(states.size()); }
};

/// Propulsion power calibration for the cubic propeller law.
struct PropulsionCalibration {
  double design_sog = 0.0;    // knots
  double design_power = 0.0;  // MW
};

struct LoadStep {
  double total_load = 0.0;  // MW
  double p_prop = 0.0;      // MW
  double p_hotel = 0.0;     // MW
  double sog = 0.0;         // knots
  std::string oc_name;
  bool v = false;
};

struct LoadProfile {
  std::vector<LoadStep> steps;

  int horizon() const { return static_cast<int>(steps.size()); }
  double load(int t) const { return steps[t].total_load; }  // t is 0-based
  bool v_active(int t) const { return steps[t].v; }
  int num_v_active() const;
};

/// A stretch of the voyage spent in one operating condition.
struct OcScheduleEntry {
  OperatingCondition oc;
  int steps = 0;
};

/// Maximum-likelihood transition matrix from an observed speed series.
/// Samples map to the nearest state; rows without outgoing observations
/// become self-loops.
MarkovChain estimate_chain(const std::vector<double>& sog_series,
                           const std::vector<double>& states);

/// Cubic propeller law, clamped at the design power.
double propulsion_power(double sog, const PropulsionCalibration& calibration);

/// Synthesizes the load profile: chain-driven SOG restricted to the current
/// OC's admissible states, cubic propulsion power, and hotel load with
/// truncated Gaussian noise (std = hotel_noise_std_frac of the OC mean,
/// cut at +-3 sigma and at zero). Bit-reproducible for a fixed seed; the
/// generator is mt19937_64 with Box-Muller normals.
LoadProfile sample_profile(const MarkovChain& chain,
                           const std::vector<OcScheduleEntry>& ocs,
                           const ScenarioConfig& config,
                           const PropulsionCalibration& calibration,
                           std::uint64_t seed,
                           double hotel_noise_std_frac = 0.05);

/// Everything simulate-load needs from one oc-schedule file.
struct OcScheduleFile {
  PropulsionCalibration propulsion;
  MarkovChain chain;
  std::vector<OcScheduleEntry> schedule;
  double hotel_noise_std_frac = 0.05;
};

/// Parses an oc-schedule JSON document. Per-OC security flags default to
/// membership of the OC name in config.security.v_active_ocs.
OcScheduleFile load_oc_schedule(const std::string& path,
                                const ScenarioConfig& config);

/// Profile CSV: columns t, oc, sog_kn, p_prop_mw, p_hotel_mw, p_load_mw, v.
void write_profile_csv(const LoadProfile& profile, const std::string& path);
LoadProfile read_profile_csv(const std::string& path);

}  // namespace shipopt
