#pragma once

#include <map>
#include <string>
#include <vector>

#include "shipopt/fuelcurve.hpp"
#include "shipopt/loadgen.hpp"
#include "shipopt/lp.hpp"
#include "shipopt/scenario.hpp"
#include "shipopt/schedule.hpp"

namespace shipopt {

enum class VarDomain { Continuous, Binary, Integer };

/// Typed handle into the model's variable table. Indices are 0-based
/// internally; names render them 1-based.
struct VarRef {
  enum class Kind {
    Delta,       // segment fill, (dg i, segment m, t)
    PDg,         // DG dispatch, (i, t)
    Z,           // DG on/off, (i, t)
    U,           // DG start-up, (i, t)
    PCharge,     // BESS charging power, (t)
    PDischarge,  // BESS discharging power, (t)
    Soc,         // state of charge, (t)
    S,           // active-combination selector, (combination j, t)
    F,           // online count within combination, (j, t)
    ZbC,         // BESS charging status, (t)
    ZbD,         // BESS discharging status, (t)
    Zb,          // BESS on/off, (t)
  };
  Kind kind;
  int i = -1;  // DG index
  int m = -1;  // segment index
  int t = -1;  // time step
  int j = -1;  // combination index
};

struct Variable {
  std::string name;
  VarRef ref;
  VarDomain domain = VarDomain::Continuous;
  double lb = 0.0;
  double ub = 0.0;
  double cost = 0.0;
};

/// A set of >= 2 generating units that may be designated as the secured
/// combination. Unit positions run over DGs in scenario order with the
/// BESS last.
struct Combination {
  int index = 0;                 // 1-based position in enumeration order
  std::vector<int> members;      // unit positions, ascending
  std::vector<std::string> ids;  // matching unit ids

  int size() const { return static_cast<int>(members.size()); }
};

struct MilpModel {
  std::vector<Variable> vars;
  std::vector<Row> rows;
  double objective_constant = 0.0;

  // Scenario dimensions the model was built from.
  int num_dgs = 0;
  int horizon = 0;
  bool has_bess = false;
  std::vector<Combination> combinations;
  std::vector<int> v_active_steps;  // 0-based steps carrying the security family

  // Variable lookup tables; -1 marks variables that do not exist.
  std::vector<int> idx_delta;  // [(i*max_segments + m)*T + t]
  std::vector<int> idx_pdg;    // [i*T + t]
  std::vector<int> idx_z;
  std::vector<int> idx_u;
  std::vector<int> idx_pc;  // [t]
  std::vector<int> idx_pd;
  std::vector<int> idx_soc;
  std::vector<int> idx_zbc;
  std::vector<int> idx_zbd;
  std::vector<int> idx_zb;
  std::map<std::pair<int, int>, int> idx_s;  // (j 0-based, t 0-based) -> col
  std::map<std::pair<int, int>, int> idx_f;

  int max_segments = 0;

  int delta(int i, int m, int t) const {
    return idx_delta[(i * max_segments + m) * horizon + t];
  }
  int pdg(int i, int t) const { return idx_pdg[i * horizon + t]; }
  int z(int i, int t) const { return idx_z[i * horizon + t]; }
  int u(int i, int t) const { return idx_u[i * horizon + t]; }
  int pc(int t) const { return idx_pc[t]; }
  int pd(int t) const { return idx_pd[t]; }
  int soc(int t) const { return idx_soc[t]; }
  int zbc(int t) const { return idx_zbc[t]; }
  int zbd(int t) const { return idx_zbd[t]; }
  int zb(int t) const { return idx_zb[t]; }
  int s(int j, int t) const;  // -1 when absent
  int f(int j, int t) const;

  int num_vars() const { return static_cast<int>(vars.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
  int num_binaries() const;
  int num_integers() const;  // binaries + general integers

  /// Asserts structural sanity: unique names, entries reference declared
  /// variables, binaries bounded by [0,1]. Throws ModelError.
  void check_consistency() const;
};

/// All subsets of size >= 2 in lexicographic order of member positions.
/// `ids` are unit identifiers aligned with positions (DGs first, BESS
/// last). Throws ModelError when fewer than two units exist.
std::vector<Combination> enumerate_combinations(const std::vector<std::string>& ids);

/// Translates scenario + fuel curves + load profile into the MILP.
MilpModel build_model(const ScenarioConfig& config,
                      const std::vector<PiecewiseFuelCurve>& curves,
                      const LoadProfile& profile);

/// Closed-form variable/row counts for a scenario of these dimensions;
/// build_model's output must match (enforced in tests).
struct ModelCounts {
  int variables = 0;
  int rows = 0;
  int binaries = 0;
};
ModelCounts expected_model_counts(const ScenarioConfig& config,
                                  const LoadProfile& profile);

/// Reads a solution vector back into a typed Schedule. Verifies that every
/// integer variable is within integrality tolerance and that the SOC
/// trajectory recomputed from dispatched powers matches the solver's SOC
/// within `soc_tol`. Throws ModelError on violation.
Schedule extract_schedule(const MilpModel& model,
                          const std::vector<double>& solution,
                          const ScenarioConfig& config,
                          double integrality_tol = 1e-6,
                          double soc_tol = 1e-6);

}  // namespace shipopt
