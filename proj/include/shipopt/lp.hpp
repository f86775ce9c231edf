#pragma once

#include <string>
#include <vector>

namespace shipopt {

enum class RowSense { LE, EQ, GE };

struct RowEntry {
  int col = -1;
  double coef = 0.0;
};

/// One sparse constraint row. `tag` is the provenance label that also
/// becomes the MPS row name (e.g. "E21_J5_R2_T7").
struct Row {
  std::string tag;
  RowSense sense = RowSense::LE;
  double rhs = 0.0;
  std::vector<RowEntry> entries;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  double objective = 0.0;
  std::vector<double> values;  // one entry per structural variable
  double max_residual = 0.0;   // scaled primal residual at the solution
  double infeasibility = 0.0;  // remaining phase-1 sum when infeasible
  long iterations = 0;
};

/// Standalone LP: min cost*x + constant, lb <= x <= ub, Ax {<=,=,>=} rhs.
struct LpProblem {
  std::vector<double> lb;
  std::vector<double> ub;
  std::vector<double> cost;
  double objective_constant = 0.0;
  std::vector<Row> rows;

  int num_cols() const { return static_cast<int>(cost.size()); }
  int num_rows() const { return static_cast<int>(rows.size()); }
  int add_col(double lower, double upper, double obj);
};

struct LpOptions {
  double feasibility_tol = 1e-7;
  double optimality_tol = 1e-9;
  long iteration_limit = 0;  // 0 = automatic (scales with problem size)
};

/// Bounded-variable revised simplex. Deterministic: Dantzig pricing with
/// smallest-index tie-breaks, Bland's rule after a bounded run of
/// non-improving pivots.
LpSolution solve_lp(const LpProblem& problem, const LpOptions& options = {});

}  // namespace shipopt
