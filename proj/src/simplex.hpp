#pragma once

// Bounded-variable revised simplex with a sparse LU of the basis and
// product-form eta updates between refactorizations. Phase 1 minimizes the
// sum of bound violations of basic variables (composite: the phase is
// decided from the current infeasibility each iteration). Deterministic:
// Dantzig pricing with smallest-index tie-breaks and a Bland fallback
// after a bounded run of degenerate steps.

#include <cstdint>
#include <vector>

#include "shipopt/lp.hpp"

namespace shipopt::detail {

struct SimplexOptions {
  double feas_tol = 1e-7;
  double dual_tol = 1e-9;
  long iteration_limit = 0;  // 0 = automatic
  int refactor_every = 64;
};

class Simplex {
public:
  Simplex(const LpProblem& problem, SimplexOptions options);

  /// Overrides the bounds of a structural column (branch-and-bound
  /// fixings). reset_bounds restores the problem's own bounds.
  void set_bound(int col, double lb, double ub);
  void reset_bounds();

  /// Basis snapshot: basic column per row position plus the nonbasic
  /// state of every column.
  struct BasisState {
    std::vector<std::int32_t> basic;
    std::vector<std::uint8_t> stat;  // VStat per column
  };

  bool load_basis(const BasisState& state);
  BasisState save_basis() const;
  void clear_basis();

  LpStatus solve();

  double objective() const { return objective_; }
  double infeasibility() const { return infeasibility_; }
  double max_residual() const { return max_residual_; }
  long iterations() const { return iterations_; }
  std::vector<double> structural_values() const;

  enum VStat : std::uint8_t { kLower = 0, kUpper = 1, kBasic = 2, kFree = 3 };

private:
  // problem data
  const LpProblem& p_;
  SimplexOptions opt_;
  int n_ = 0;     // structural columns
  int m_ = 0;     // rows (= logical columns)
  int ntot_ = 0;  // n + m
  // CSC of the structural part
  std::vector<int> col_start_;
  std::vector<int> col_row_;
  std::vector<double> col_val_;
  std::vector<double> rhs_;
  std::vector<double> lb_, ub_;          // active bounds (with overrides)
  std::vector<double> lb_orig_, ub_orig_;
  std::vector<double> cost_;             // structural + logical zeros
  double cost_scale_ = 1.0;              // max |cost|, for dual tolerance

  // basis
  std::vector<std::int32_t> basic_;  // column per row position
  std::vector<std::uint8_t> stat_;   // VStat per column
  std::vector<double> x_;            // current value per column
  bool basis_loaded_ = false;

  // LU factors of the basis (see factorize())
  std::vector<int> lu_pivot_row_;               // step -> row
  std::vector<int> lu_step_of_pos_;             // basis position -> step
  std::vector<int> lu_pos_of_step_;             // step -> basis position
  std::vector<std::vector<std::pair<int, double>>> lu_lcol_;  // per step (row, mult)
  std::vector<std::vector<std::pair<int, double>>> lu_ucol_;  // per step (step, val)
  std::vector<double> lu_udiag_;

  struct Eta {
    int pivot_pos;
    double diag;
    std::vector<std::pair<int, double>> entries;  // (position, value), no diag
  };
  std::vector<Eta> etas_;

  // scratch
  std::vector<double> work_row_;   // row space
  std::vector<double> work_pos_;   // position space
  std::vector<double> work_step_;  // elimination-step space

  // results
  double objective_ = 0.0;
  double infeasibility_ = 0.0;
  double max_residual_ = 0.0;
  long iterations_ = 0;

  void cold_basis();
  bool factorize();  // false on singular basis
  void compute_basic_values();
  void ftran(std::vector<double>& row_vec, std::vector<double>& pos_out);
  void btran(const std::vector<double>& pos_vec, std::vector<double>& row_out);
  double column_dot(int col, const std::vector<double>& row_vec) const;
  void scatter_column(int col, std::vector<double>& row_vec) const;
  double total_infeasibility() const;
  double bound_violation(int col, double v) const;
  void snap_nonbasic_values();
  void finalize();
};

}  // namespace shipopt::detail
