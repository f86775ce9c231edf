#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shipopt/fuelcurve.hpp"
#include "shipopt/loadgen.hpp"
#include "shipopt/scenario.hpp"
#include "shipopt/schedule.hpp"
#include "shipopt/solver.hpp"

namespace shipopt {

struct RunReport {
  double total_cost = 0.0;  // EUR, fuel + start-ups
  double total_fuel = 0.0;  // kg
  double total_co2 = 0.0;   // kg, = total_fuel * co2_factor
  /// Mean loading factor over all (unit, step) pairs with the unit online;
  /// absent when nothing ever runs.
  std::optional<double> lf_avg;
  /// Energy-weighted alternative: total energy / total online capacity.
  std::optional<double> lf_avg_energy_weighted;
  int startups = 0;

  // Per-step series for plotting; [i][t] resp. [t].
  std::vector<std::vector<double>> p_dg;
  std::vector<double> p_charge;
  std::vector<double> p_discharge;
  std::vector<double> soc;
  std::vector<double> p_load;
  std::vector<int> v;

  // Solve metadata.
  MipStatus status = MipStatus::Infeasible;
  double objective = 0.0;
  double best_bound = 0.0;
  double gap = 0.0;
  long nodes_explored = 0;
  double wall_time = 0.0;
};

/// Fuel is integrated from the schedule through the fuel curves (greedy
/// segment fill), cost adds start-ups, CO2 applies the scenario's emission
/// factor. When `curves` is empty they are rebuilt from the scenario.
RunReport compute_report(const Schedule& schedule, const ScenarioConfig& config,
                         const LoadProfile& profile, const MipResult& result,
                         const std::vector<PiecewiseFuelCurve>& curves = {});

std::string report_to_json(const RunReport& report);

/// schedule.csv: t, p_dg1..p_dgN, z1..zN, u1..uN, p_charge, p_discharge,
/// soc, p_load, v. Values print with 17 significant digits so identical
/// runs produce bit-identical files.
void write_schedule_csv(const Schedule& schedule, const LoadProfile& profile,
                        const std::string& path);
Schedule read_schedule_csv(const std::string& path);

/// Two-column gnuplot series (blocks separated by blank lines).
void write_plot_dispatch(const RunReport& report, const ScenarioConfig& config,
                         const std::string& path);
void write_plot_soc(const RunReport& report, const std::string& path);

}  // namespace shipopt
