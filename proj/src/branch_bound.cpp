#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <queue>
#include <vector>

#include "shipopt/errors.hpp"
#include "shipopt/solver.hpp"
#include "simplex.hpp"

namespace shipopt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Immutable chain of branching decisions, shared between siblings.
struct Fixing {
  int col;
  double value;
  std::shared_ptr<const Fixing> parent;
};

struct Node {
  long id = 0;
  double bound = -kInf;  // parent LP objective (valid lower bound)
  std::shared_ptr<const Fixing> fixings;
  std::shared_ptr<const detail::Simplex::BasisState> basis;
};

struct NodeOrder {
  // Best-first on the bound; FIFO on ties for determinism.
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

/// Per-step propagation context: the unit-status columns that decide the
/// online set of a v-active step.
struct StepStatus {
  int t;
  std::vector<int> unit_cols;  // z(i,t) per DG, then zb(t) when present
};

class BranchAndBound {
public:
  BranchAndBound(const MilpModel& model, const SolverOptions& opt)
      : model_(model), opt_(opt), problem_(relax(model)) {
    detail::SimplexOptions sopt;
    sopt.feas_tol = opt.feasibility_tol;
    simplex_ = std::make_unique<detail::Simplex>(problem_, sopt);

    for (int k = 0; k < model_.num_vars(); ++k) {
      const Variable& v = model_.vars[k];
      using VK = VarRef::Kind;
      switch (v.ref.kind) {
        case VK::Z:
        case VK::U:
        case VK::ZbC:
        case VK::ZbD:
        case VK::Zb:
          branchable_.push_back(k);
          break;
        default:
          break;
      }
    }
    for (int t : model_.v_active_steps) {
      StepStatus st;
      st.t = t;
      for (int i = 0; i < model_.num_dgs; ++i) st.unit_cols.push_back(model_.z(i, t));
      if (model_.has_bess) st.unit_cols.push_back(model_.zb(t));
      steps_.push_back(std::move(st));
    }
  }

  MipResult run() {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
      return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
    };

    MipResult result;
    std::priority_queue<Node, std::vector<Node>, NodeOrder> queue;
    std::vector<Node> dive;  // plunging stack, takes precedence
    long next_id = 0;
    queue.push(Node{next_id++, -kInf, nullptr, nullptr});

    double incumbent_obj = kInf;
    std::vector<double> incumbent_values;
    bool hit_limit = false;

    auto prune_eps = [&] { return 1e-9 * std::max(1.0, std::abs(incumbent_obj)); };
    auto global_bound = [&] {
      double b = queue.empty() ? kInf : queue.top().bound;
      for (const Node& n : dive) b = std::min(b, n.bound);
      return b;
    };
    auto gap_of = [&](double bound) {
      if (incumbent_obj == kInf) return kInf;
      double b = std::min(bound, incumbent_obj);
      return (incumbent_obj - b) / std::max(1.0, std::abs(incumbent_obj));
    };

    while (!queue.empty() || !dive.empty()) {
      if (incumbent_obj < kInf && gap_of(global_bound()) <= opt_.gap_tol) break;
      if (opt_.node_limit > 0 && result.nodes_explored >= opt_.node_limit) {
        hit_limit = true;
        break;
      }
      if (opt_.time_limit > 0.0 && elapsed() > opt_.time_limit) {
        hit_limit = true;
        break;
      }

      Node node;
      if (!dive.empty()) {
        node = std::move(dive.back());
        dive.pop_back();
      } else {
        node = queue.top();
        queue.pop();
      }
      if (incumbent_obj < kInf && node.bound >= incumbent_obj - prune_eps()) continue;

      ++result.nodes_explored;

      // Install the node's bound fixings plus the propagated combination
      // selectors, then re-optimize from the parent basis.
      simplex_->reset_bounds();
      for (const Fixing* f = node.fixings.get(); f; f = f->parent.get()) {
        simplex_->set_bound(f->col, f->value, f->value);
      }
      bool propagation_infeasible = false;
      for (const StepStatus& st : steps_) {
        if (!propagate_step(st, node.fixings.get(), propagation_infeasible)) continue;
        if (propagation_infeasible) break;
      }
      if (propagation_infeasible) continue;

      if (node.basis) {
        simplex_->load_basis(*node.basis);
      } else {
        simplex_->clear_basis();
      }
      LpStatus lp = simplex_->solve();
      lp_iterations_ += simplex_->iterations();
      result.lp_iterations = lp_iterations_;
      if (lp == LpStatus::Infeasible) continue;
      if (lp == LpStatus::Unbounded) {
        throw SolveError("milp: relaxation reported unbounded despite finite bounds");
      }
      if (lp == LpStatus::IterationLimit) {
        throw SolveError("milp: node LP hit the iteration safety limit");
      }
      double bound = simplex_->objective();
      if (incumbent_obj < kInf && bound >= incumbent_obj - prune_eps()) continue;

      std::vector<double> x = simplex_->structural_values();
      auto basis = std::make_shared<detail::Simplex::BasisState>(simplex_->save_basis());

      // Branch variable: most fractional unit-status binary.
      int branch_col = -1;
      double best_dist = 0.5 - opt_.integrality_tol;
      for (int col : branchable_) {
        double frac = x[col] - std::floor(x[col]);
        double dist = std::abs(x[col] - std::round(x[col]));
        if (dist <= opt_.integrality_tol) continue;
        double score = std::abs(frac - 0.5);
        if (score < best_dist) {
          best_dist = score;
          branch_col = col;
        }
      }

      if (branch_col < 0) {
        // Unit statuses are integral. Try to complete: fix them to their
        // rounded values, propagate s/f to the maximal online combination
        // and re-solve the continuous rest.
        double comp_obj;
        std::vector<double> comp_x;
        double comp_residual = 0.0;
        bool comp_feasible =
            complete(node, x, basis.get(), comp_obj, comp_x, comp_residual);
        result.lp_iterations = lp_iterations_;
        if (comp_feasible && comp_obj < incumbent_obj - 1e-12) {
          incumbent_obj = comp_obj;
          incumbent_values = std::move(comp_x);
          result.incumbent.max_residual = comp_residual;
        }
        if (comp_feasible && comp_obj <= bound + prune_eps()) continue;  // node solved
        // The completion did not close the node (or was infeasible under
        // the maximal rule): branch on the first unfixed status binary.
        branch_col = first_unfixed_status(node.fixings.get());
        if (branch_col < 0) continue;  // fully fixed leaf: nothing better below
      }

      // Children share the parent's basis; the child on the LP's side of
      // the fractional value is plunged next.
      double val = x[branch_col];
      int preferred = val >= 0.5 ? 1 : 0;
      Node far{next_id++, bound,
               std::make_shared<const Fixing>(
                   Fixing{branch_col, static_cast<double>(1 - preferred), node.fixings}),
               basis};
      Node near{next_id++, bound,
                std::make_shared<const Fixing>(
                    Fixing{branch_col, static_cast<double>(preferred), node.fixings}),
                basis};
      queue.push(std::move(far));
      dive.push_back(std::move(near));
    }

    // Final verdict.
    result.wall_time = elapsed();
    bool exhausted = queue.empty() && dive.empty();
    if (incumbent_obj < kInf) {
      result.incumbent.status = LpStatus::Optimal;
      result.incumbent.objective = incumbent_obj;
      result.incumbent.values = std::move(incumbent_values);
      result.best_bound = exhausted ? incumbent_obj
                                    : std::min(global_bound(), incumbent_obj);
      result.gap = (incumbent_obj - result.best_bound) /
                   std::max(1.0, std::abs(incumbent_obj));
      if (result.gap < 0.0) result.gap = 0.0;
      result.status = (exhausted || result.gap <= 1e-9) ? MipStatus::Optimal
                                                        : MipStatus::Feasible;
    } else {
      result.best_bound = kInf;
      if (exhausted) {
        result.status = MipStatus::Infeasible;
      } else {
        result.status = MipStatus::LimitReached;
      }
    }
    return result;
  }

private:
  /// Applies the maximal-combination propagation of one step when all of
  /// its unit statuses are fixed. Returns false when the step is still
  /// undecided. Sets `infeasible` when fewer than 2 units remain online.
  bool propagate_step(const StepStatus& st, const Fixing* chain, bool& infeasible) {
    std::vector<int> online;
    for (size_t pos = 0; pos < st.unit_cols.size(); ++pos) {
      int col = st.unit_cols[pos];
      bool found = false;
      double value = 0.0;
      for (const Fixing* f = chain; f; f = f->parent.get()) {
        if (f->col == col) {
          found = true;
          value = f->value;
          break;
        }
      }
      if (!found) return false;
      if (value > 0.5) online.push_back(static_cast<int>(pos));
    }
    if (static_cast<int>(online.size()) < 2) {
      infeasible = true;
      return true;
    }
    int jstar = -1;
    for (size_t j = 0; j < model_.combinations.size(); ++j) {
      if (model_.combinations[j].members == online) {
        jstar = static_cast<int>(j);
        break;
      }
    }
    if (jstar < 0) throw ModelError("milp: online set has no matching combination");
    for (size_t j = 0; j < model_.combinations.size(); ++j) {
      double sv = static_cast<int>(j) == jstar ? 1.0 : 0.0;
      simplex_->set_bound(model_.s(static_cast<int>(j), st.t), sv, sv);
      int members_online = 0;
      for (int pos : model_.combinations[j].members) {
        members_online += std::find(online.begin(), online.end(), pos) != online.end();
      }
      simplex_->set_bound(model_.f(static_cast<int>(j), st.t),
                          static_cast<double>(members_online),
                          static_cast<double>(members_online));
    }
    return true;
  }

  /// Fixes every unit-status binary to its rounded LP value, propagates
  /// all combination selectors and re-solves. On success returns the
  /// completed objective and full variable vector.
  bool complete(const Node& node, const std::vector<double>& x,
                const detail::Simplex::BasisState* basis, double& obj,
                std::vector<double>& out, double& residual) {
    simplex_->reset_bounds();
    for (const Fixing* f = node.fixings.get(); f; f = f->parent.get()) {
      simplex_->set_bound(f->col, f->value, f->value);
    }
    for (int col : branchable_) {
      double v = std::round(x[col]);
      simplex_->set_bound(col, v, v);
    }
    for (const StepStatus& st : steps_) {
      std::vector<int> online;
      for (size_t pos = 0; pos < st.unit_cols.size(); ++pos) {
        if (std::round(x[st.unit_cols[pos]]) > 0.5) {
          online.push_back(static_cast<int>(pos));
        }
      }
      if (static_cast<int>(online.size()) < 2) return false;
      int jstar = -1;
      for (size_t j = 0; j < model_.combinations.size(); ++j) {
        if (model_.combinations[j].members == online) {
          jstar = static_cast<int>(j);
          break;
        }
      }
      if (jstar < 0) return false;
      for (size_t j = 0; j < model_.combinations.size(); ++j) {
        double sv = static_cast<int>(j) == jstar ? 1.0 : 0.0;
        simplex_->set_bound(model_.s(static_cast<int>(j), st.t), sv, sv);
        int members_online = 0;
        for (int pos : model_.combinations[j].members) {
          members_online +=
              std::find(online.begin(), online.end(), pos) != online.end();
        }
        simplex_->set_bound(model_.f(static_cast<int>(j), st.t),
                            static_cast<double>(members_online),
                            static_cast<double>(members_online));
      }
    }
    if (basis) simplex_->load_basis(*basis);
    LpStatus lp = simplex_->solve();
    lp_iterations_ += simplex_->iterations();
    if (lp != LpStatus::Optimal) return false;
    obj = simplex_->objective();
    out = simplex_->structural_values();
    residual = simplex_->max_residual();
    // Snap the fixed integers exactly; the LP already pinned them by
    // bounds, this only removes 1e-12 noise before extraction.
    for (int col : branchable_) out[col] = std::round(out[col]);
    return true;
  }

  int first_unfixed_status(const Fixing* chain, const std::vector<double>&) const {
    for (int col : branchable_) {
      bool fixed = false;
      for (const Fixing* f = chain; f; f = f->parent.get()) {
        if (f->col == col) {
          fixed = true;
          break;
        }
      }
      if (!fixed) return col;
    }
    return -1;
  }

  const MilpModel& model_;
  SolverOptions opt_;
  LpProblem problem_;
  std::unique_ptr<detail::Simplex> simplex_;
  std::vector<int> branchable_;
  std::vector<StepStatus> steps_;
  long result_iterations_ = 0;
};

}  // namespace

LpProblem relax(const MilpModel& model) {
  LpProblem p;
  p.lb.reserve(model.num_vars());
  for (const Variable& v : model.vars) p.add_col(v.lb, v.ub, v.cost);
  p.objective_constant = model.objective_constant;
  p.rows = model.rows;
  return p;
}

LpSolution solve_lp(const MilpModel& model, const LpOptions& options) {
  return solve_lp(relax(model), options);
}

MipResult solve_milp(const MilpModel& model, const SolverOptions& options) {
  if (options.gap_tol < 0.0 || options.node_limit < 0 || options.time_limit < 0.0 ||
      options.workers < 1) {
    throw ModelError("solve_milp: options must be positive");
  }
  BranchAndBound bb(model, options);
  return bb.run();
}

}  // namespace shipopt
