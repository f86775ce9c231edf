#pragma once

#include <string>
#include <vector>

#include "shipopt/loadgen.hpp"
#include "shipopt/scenario.hpp"
#include "shipopt/schedule.hpp"

namespace shipopt {

// Model-free validation: every requirement is re-derived arithmetically
// from the schedule itself. This header must stay independent of the MILP
// formulation (no milp.hpp include); check_security in particular works on
// the set of online units directly.

struct CheckItem {
  std::string name;     // e.g. "balance", "soc_recursion", "capacity"
  int t = 0;            // 1-based step
  std::string unit;     // unit id, or empty for system-level checks
  double margin = 0.0;  // >= 0 means pass; MW, or percentage points for SOC
  bool pass = true;
};

struct FeasibilityReport {
  std::vector<CheckItem> items;
  int failures = 0;
  double worst_margin = 0.0;

  bool clean(double tol = 0.0) const { return worst_margin >= -tol; }
};

/// Post-contingency checks per v-active step and online unit r: capacity
/// (the remaining units cover load + charging at overload rating), step
/// coverage (r's output is within the remaining units' instantaneous step
/// capability) and headroom (every online unit can absorb its own maximum
/// step). The BESS counts with its emergency rating; its output is the
/// discharging power.
struct ContingencyReport {
  std::vector<CheckItem> items;
  int steps_checked = 0;
  int failures = 0;
  double worst_margin = 0.0;

  bool clean() const { return failures == 0; }
};

/// Arithmetic replay of every non-security constraint: load balance,
/// dispatch gating vs commitment, start-up linkage, minimum up/down
/// windows, ramps, SOC recursion and bounds, terminal SOC, and BESS
/// charge/discharge exclusivity.
FeasibilityReport check_feasibility(const Schedule& schedule,
                                    const ScenarioConfig& config,
                                    const LoadProfile& profile);

ContingencyReport check_security(const Schedule& schedule,
                                 const ScenarioConfig& config,
                                 const LoadProfile& profile);

/// Exhaustive optimum for tiny instances: enumerates every unit-status
/// pattern over the horizon (DG on/off per step; BESS idle/charge/
/// discharge per step), discards patterns violating the start-up and
/// minimum up/down logic, solves the continuous dispatch LP for the rest
/// and returns the minimum objective. +infinity when nothing is feasible.
/// Throws ModelError when DGs*T + 2*T (with BESS) exceeds max_binaries.
double brute_force_optimum(const ScenarioConfig& config,
                           const LoadProfile& profile,
                           int max_binaries = 24);

std::string report_to_json(const FeasibilityReport& feas,
                           const ContingencyReport& sec);
std::string report_to_table(const FeasibilityReport& feas,
                            const ContingencyReport& sec);

}  // namespace shipopt
