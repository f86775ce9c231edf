#pragma once

#include <utility>
#include <vector>

namespace shipopt {

/// The solved trajectory: per-step dispatch, commitment and start-up
/// status per DG, BESS charge/discharge power and end-of-step SOC.
struct Schedule {
  int num_dgs = 0;
  int horizon = 0;
  bool has_bess = false;
  std::vector<std::vector<double>> p_dg;  // [i][t] MW
  std::vector<std::vector<int>> z;        // [i][t] 0/1
  std::vector<std::vector<int>> u;        // [i][t] 0/1
  std::vector<double> p_charge;           // [t] MW
  std::vector<double> p_discharge;        // [t] MW
  std::vector<double> soc;                // [t] fraction, end of step
  /// Designated combination per v-active step: (0-based step, 1-based
  /// combination index in enumeration order).
  std::vector<std::pair<int, int>> active_combination;
  double objective = 0.0;

  bool online(int i, int t) const { return z[i][t] != 0; }
};

}  // namespace shipopt
