#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "shipopt/lp.hpp"
#include "shipopt/milp.hpp"

namespace shipopt {

/// Integrality relaxation of the model (bounds and rows kept verbatim).
LpProblem relax(const MilpModel& model);

/// Relaxes integrality and solves.
LpSolution solve_lp(const MilpModel& model, const LpOptions& options = {});

struct SolverOptions {
  double gap_tol = 0.01;
  long node_limit = 0;      // 0 = unlimited
  double time_limit = 0.0;  // seconds, 0 = unlimited
  int workers = 1;          // accepted for CLI compatibility; results are
                            // worker-count independent
  double integrality_tol = 1e-6;
  double feasibility_tol = 1e-7;
};

enum class MipStatus { Optimal, Feasible, Infeasible, LimitReached };

struct MipResult {
  MipStatus status = MipStatus::Infeasible;
  LpSolution incumbent;  // meaningful for Optimal/Feasible
  double best_bound = 0.0;
  double gap = 0.0;  // (incumbent - bound) / max(1, |incumbent|)
  long nodes_explored = 0;
  long lp_iterations = 0;
  double wall_time = 0.0;  // seconds

  bool has_incumbent() const {
    return status == MipStatus::Optimal || status == MipStatus::Feasible;
  }
};

/// Best-first branch-and-bound over the model's unit-status binaries
/// (z, u and the BESS z-family) with most-fractional selection and
/// smallest-index tie-breaks. Combination selectors s/f are never
/// branched on: once every unit binary of a step is fixed, they are
/// propagated to the maximal online combination. Deterministic for fixed
/// options; a nonzero time_limit is the only source of run-to-run
/// variation.
MipResult solve_milp(const MilpModel& model, const SolverOptions& options = {});

/// MPS interchange. Row names carry the model's provenance tags; integer
/// columns are wrapped in MARKER INTORG/INTEND; values are printed with 17
/// significant digits so a round-trip through read_mps is bit-exact.
void export_mps(const MilpModel& model, const std::string& path,
                const std::string& name = "SHIPOPT");

struct MpsColumn {
  std::string name;
  double lb = 0.0;
  double ub = 0.0;
  bool integer = false;
  std::vector<std::pair<std::string, double>> entries;  // (row name, coef)
};

struct MpsModel {
  std::string name;
  std::string objective_row;
  double objective_constant = 0.0;
  std::vector<std::pair<std::string, RowSense>> rows;  // declaration order
  std::vector<MpsColumn> columns;
  std::vector<std::pair<std::string, double>> rhs;  // constraint rows only
};

MpsModel read_mps(const std::string& path);

/// Normalized comparison: dimensions, senses, bounds, integrality and
/// every coefficient must agree bit-for-bit. Returns an empty string on
/// success, else a description of the first mismatch.
std::string compare_mps(const MilpModel& model, const MpsModel& parsed);

}  // namespace shipopt
