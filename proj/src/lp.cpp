#include "shipopt/lp.hpp"

#include "simplex.hpp"

namespace shipopt {

int LpProblem::add_col(double lower, double upper, double obj) {
  lb.push_back(lower);
  ub.push_back(upper);
  cost.push_back(obj);
  return num_cols() - 1;
}

LpSolution solve_lp(const LpProblem& problem, const LpOptions& options) {
  detail::SimplexOptions sopt;
  sopt.feas_tol = options.feasibility_tol;
  sopt.dual_tol = options.optimality_tol;
  sopt.iteration_limit = options.iteration_limit;
  detail::Simplex simplex(problem, sopt);
  LpSolution sol;
  sol.status = simplex.solve();
  sol.iterations = simplex.iterations();
  sol.infeasibility = simplex.infeasibility();
  sol.max_residual = simplex.max_residual();
  sol.values = simplex.structural_values();
  sol.objective = simplex.objective();
  return sol;
}

}  // namespace shipopt
