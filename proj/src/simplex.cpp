#include "simplex.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "shipopt/errors.hpp"

namespace shipopt::detail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

Simplex::Simplex(const LpProblem& problem, SimplexOptions options)
    : p_(problem), opt_(options) {
  n_ = p_.num_cols();
  m_ = p_.num_rows();
  ntot_ = n_ + m_;

  // CSC of the structural columns.
  std::vector<int> counts(n_, 0);
  for (const Row& row : p_.rows) {
    for (const RowEntry& e : row.entries) {
      if (e.col < 0 || e.col >= n_) {
        throw ModelError("lp: row references undeclared column");
      }
      ++counts[e.col];
    }
  }
  col_start_.assign(n_ + 1, 0);
  for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + counts[j];
  col_row_.resize(col_start_[n_]);
  col_val_.resize(col_start_[n_]);
  std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
  for (int r = 0; r < m_; ++r) {
    for (const RowEntry& e : p_.rows[r].entries) {
      col_row_[fill[e.col]] = r;
      col_val_[fill[e.col]] = e.coef;
      ++fill[e.col];
    }
  }

  rhs_.resize(m_);
  for (int r = 0; r < m_; ++r) rhs_[r] = p_.rows[r].rhs;

  lb_orig_.assign(ntot_, 0.0);
  ub_orig_.assign(ntot_, 0.0);
  for (int j = 0; j < n_; ++j) {
    lb_orig_[j] = p_.lb[j];
    ub_orig_[j] = p_.ub[j];
    if (lb_orig_[j] > ub_orig_[j]) {
      throw ModelError("lp: column with crossed bounds");
    }
  }
  for (int r = 0; r < m_; ++r) {
    switch (p_.rows[r].sense) {
      case RowSense::LE:
        lb_orig_[n_ + r] = 0.0;
        ub_orig_[n_ + r] = kInf;
        break;
      case RowSense::GE:
        lb_orig_[n_ + r] = -kInf;
        ub_orig_[n_ + r] = 0.0;
        break;
      case RowSense::EQ:
        lb_orig_[n_ + r] = 0.0;
        ub_orig_[n_ + r] = 0.0;
        break;
    }
  }
  lb_ = lb_orig_;
  ub_ = ub_orig_;

  cost_.assign(ntot_, 0.0);
  cost_scale_ = 1.0;
  for (int j = 0; j < n_; ++j) {
    cost_[j] = p_.cost[j];
    cost_scale_ = std::max(cost_scale_, std::abs(cost_[j]));
  }

  x_.assign(ntot_, 0.0);
  stat_.assign(ntot_, kLower);
  work_row_.assign(m_, 0.0);
  work_pos_.assign(m_, 0.0);
  work_step_.assign(m_, 0.0);
}

void Simplex::set_bound(int col, double lb, double ub) {
  assert(col >= 0 && col < n_);
  lb_[col] = lb;
  ub_[col] = ub;
}

void Simplex::reset_bounds() {
  lb_ = lb_orig_;
  ub_ = ub_orig_;
}

bool Simplex::load_basis(const BasisState& state) {
  if (static_cast<int>(state.basic.size()) != m_ ||
      static_cast<int>(state.stat.size()) != ntot_) {
    return false;
  }
  std::vector<char> seen(ntot_, 0);
  for (std::int32_t c : state.basic) {
    if (c < 0 || c >= ntot_ || seen[c]) return false;
    seen[c] = 1;
  }
  basic_.assign(state.basic.begin(), state.basic.end());
  stat_.assign(state.stat.begin(), state.stat.end());
  basis_loaded_ = true;
  return true;
}

Simplex::BasisState Simplex::save_basis() const {
  BasisState s;
  s.basic.assign(basic_.begin(), basic_.end());
  s.stat.assign(stat_.begin(), stat_.end());
  return s;
}

void Simplex::clear_basis() { basis_loaded_ = false; }

void Simplex::cold_basis() {
  basic_.resize(m_);
  for (int r = 0; r < m_; ++r) {
    basic_[r] = n_ + r;
    stat_[n_ + r] = kBasic;
  }
  for (int j = 0; j < n_; ++j) {
    if (lb_[j] > -kInf) {
      stat_[j] = kLower;
    } else if (ub_[j] < kInf) {
      stat_[j] = kUpper;
    } else {
      stat_[j] = kFree;
    }
  }
  basis_loaded_ = true;
}

void Simplex::snap_nonbasic_values() {
  for (int j = 0; j < ntot_; ++j) {
    switch (stat_[j]) {
      case kLower:
        // A nonbasic column whose finite bound vanished under an override
        // migrates to the other side.
        if (lb_[j] <= -kInf) stat_[j] = ub_[j] < kInf ? kUpper : kFree;
        break;
      case kUpper:
        if (ub_[j] >= kInf) stat_[j] = lb_[j] > -kInf ? kLower : kFree;
        break;
      default:
        break;
    }
    if (stat_[j] == kLower) x_[j] = lb_[j];
    else if (stat_[j] == kUpper) x_[j] = ub_[j];
    else if (stat_[j] == kFree) x_[j] = 0.0;
  }
}

void Simplex::scatter_column(int col, std::vector<double>& row_vec) const {
  if (col < n_) {
    for (int k = col_start_[col]; k < col_start_[col + 1]; ++k) {
      row_vec[col_row_[k]] += col_val_[k];
    }
  } else {
    row_vec[col - n_] += 1.0;
  }
}

double Simplex::column_dot(int col, const std::vector<double>& row_vec) const {
  if (col < n_) {
    double s = 0.0;
    for (int k = col_start_[col]; k < col_start_[col + 1]; ++k) {
      s += col_val_[k] * row_vec[col_row_[k]];
    }
    return s;
  }
  return row_vec[col - n_];
}

bool Simplex::factorize() {
  etas_.clear();
  lu_pivot_row_.assign(m_, -1);
  lu_step_of_pos_.assign(m_, -1);
  lu_pos_of_step_.assign(m_, -1);
  lu_lcol_.assign(m_, {});
  lu_ucol_.assign(m_, {});
  lu_udiag_.assign(m_, 0.0);
  if (m_ == 0) return true;

  // Cheap fill heuristic: eliminate sparse columns first.
  std::vector<int> order(m_);
  std::iota(order.begin(), order.end(), 0);
  auto col_nnz = [&](int pos) {
    int c = basic_[pos];
    return c < n_ ? col_start_[c + 1] - col_start_[c] : 1;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return col_nnz(a) < col_nnz(b); });

  std::vector<int> row_step(m_, -1);  // row -> elimination step
  std::vector<double>& w = work_row_;

  for (int k = 0; k < m_; ++k) {
    int pos = order[k];
    std::fill(w.begin(), w.end(), 0.0);
    scatter_column(basic_[pos], w);

    // Apply the previous elimination steps (left-looking).
    for (int j = 0; j < k; ++j) {
      double v = w[lu_pivot_row_[j]];
      if (v == 0.0) continue;
      for (const auto& [row, mult] : lu_lcol_[j]) w[row] -= mult * v;
    }

    // Entries in already-pivotal rows belong to U.
    for (int j = 0; j < k; ++j) {
      double v = w[lu_pivot_row_[j]];
      if (v != 0.0) lu_ucol_[k].emplace_back(j, v);
    }

    // Partial pivoting among the remaining rows.
    int piv = -1;
    double piv_abs = 0.0;
    for (int r = 0; r < m_; ++r) {
      if (row_step[r] >= 0) continue;
      double a = std::abs(w[r]);
      if (a > piv_abs) {
        piv_abs = a;
        piv = r;
      }
    }
    if (piv < 0 || piv_abs < 1e-12) return false;

    lu_pivot_row_[k] = piv;
    lu_udiag_[k] = w[piv];
    row_step[piv] = k;
    lu_step_of_pos_[pos] = k;
    lu_pos_of_step_[k] = pos;
    for (int r = 0; r < m_; ++r) {
      if (row_step[r] >= 0 || w[r] == 0.0) continue;
      lu_lcol_[k].emplace_back(r, w[r] / lu_udiag_[k]);
    }
  }
  return true;
}

void Simplex::ftran(std::vector<double>& row_vec, std::vector<double>& pos_out) {
  std::vector<double>& w = row_vec;
  // L solve (forward over elimination steps).
  for (int k = 0; k < m_; ++k) {
    double v = w[lu_pivot_row_[k]];
    if (v == 0.0) continue;
    for (const auto& [row, mult] : lu_lcol_[k]) w[row] -= mult * v;
  }
  // U solve (backward, column oriented).
  std::vector<double>& z = work_step_;
  for (int k = 0; k < m_; ++k) z[k] = w[lu_pivot_row_[k]];
  for (int k = m_ - 1; k >= 0; --k) {
    double zk = z[k] / lu_udiag_[k];
    z[k] = zk;
    if (zk == 0.0) continue;
    for (const auto& [j, val] : lu_ucol_[k]) z[j] -= val * zk;
  }
  for (int k = 0; k < m_; ++k) pos_out[lu_pos_of_step_[k]] = z[k];
  // Eta file, oldest first.
  for (const Eta& e : etas_) {
    double piv = pos_out[e.pivot_pos] / e.diag;
    if (piv != 0.0) {
      for (const auto& [pos, val] : e.entries) pos_out[pos] -= val * piv;
    }
    pos_out[e.pivot_pos] = piv;
  }
}

void Simplex::btran(const std::vector<double>& pos_vec,
                    std::vector<double>& row_out) {
  std::vector<double>& c = work_pos_;
  c.assign(pos_vec.begin(), pos_vec.end());
  // Eta file transposed, newest first.
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double acc = c[it->pivot_pos];
    for (const auto& [pos, val] : it->entries) acc -= val * c[pos];
    c[it->pivot_pos] = acc / it->diag;
  }
  // U^T solve (forward over steps).
  std::vector<double>& g = work_step_;
  for (int k = 0; k < m_; ++k) {
    double acc = c[lu_pos_of_step_[k]];
    for (const auto& [j, val] : lu_ucol_[k]) acc -= val * g[j];
    g[k] = acc / lu_udiag_[k];
  }
  // L^T solve (backward).
  for (int k = m_ - 1; k >= 0; --k) {
    double acc = g[k];
    for (const auto& [row, mult] : lu_lcol_[k]) acc -= mult * row_out[row];
    row_out[lu_pivot_row_[k]] = acc;
  }
}

void Simplex::compute_basic_values() {
  std::vector<double> r(rhs_);
  for (int j = 0; j < ntot_; ++j) {
    if (stat_[j] == kBasic || x_[j] == 0.0) continue;
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) {
        r[col_row_[k]] -= col_val_[k] * x_[j];
      }
    } else {
      r[j - n_] -= x_[j];
    }
  }
  std::vector<double> xb(m_, 0.0);
  if (m_ > 0) ftran(r, xb);
  for (int p = 0; p < m_; ++p) x_[basic_[p]] = xb[p];
}

double Simplex::bound_violation(int col, double v) const {
  if (v < lb_[col]) return lb_[col] - v;
  if (v > ub_[col]) return v - ub_[col];
  return 0.0;
}

double Simplex::total_infeasibility() const {
  double sum = 0.0;
  for (int p = 0; p < m_; ++p) {
    double viol = bound_violation(basic_[p], x_[basic_[p]]);
    if (viol > opt_.feas_tol) sum += viol;
  }
  return sum;
}

std::vector<double> Simplex::structural_values() const {
  return std::vector<double>(x_.begin(), x_.begin() + n_);
}

void Simplex::finalize() {
  // Fresh factorization to shed eta drift, then snap near-bound values.
  if (m_ > 0 && !etas_.empty()) {
    if (factorize()) compute_basic_values();
  }
  for (int j = 0; j < ntot_; ++j) {
    if (stat_[j] != kBasic) continue;
    if (lb_[j] > -kInf && std::abs(x_[j] - lb_[j]) <= 1e-9) x_[j] = lb_[j];
    else if (ub_[j] < kInf && std::abs(x_[j] - ub_[j]) <= 1e-9) x_[j] = ub_[j];
  }
  objective_ = p_.objective_constant;
  for (int j = 0; j < n_; ++j) objective_ += cost_[j] * x_[j];

  max_residual_ = 0.0;
  for (int r = 0; r < m_; ++r) {
    double ax = 0.0;
    double scale = std::max(1.0, std::abs(rhs_[r]));
    for (const RowEntry& e : p_.rows[r].entries) {
      double term = e.coef * x_[e.col];
      ax += term;
      scale = std::max(scale, std::abs(term));
    }
    double viol = 0.0;
    switch (p_.rows[r].sense) {
      case RowSense::LE: viol = std::max(0.0, ax - rhs_[r]); break;
      case RowSense::GE: viol = std::max(0.0, rhs_[r] - ax); break;
      case RowSense::EQ: viol = std::abs(ax - rhs_[r]); break;
    }
    max_residual_ = std::max(max_residual_, viol / scale);
  }
}

LpStatus Simplex::solve() {
  iterations_ = 0;
  infeasibility_ = 0.0;
  if (!basis_loaded_) cold_basis();
  snap_nonbasic_values();
  if (m_ > 0 && !factorize()) {
    // Singular start (can only come from a stale warm basis): repair with
    // the all-logical basis and retry.
    cold_basis();
    snap_nonbasic_values();
    if (!factorize()) throw SolveError("lp: singular logical basis");
  }
  if (m_ > 0) compute_basic_values();

  const long iter_limit = opt_.iteration_limit > 0
                              ? opt_.iteration_limit
                              : 200L * (ntot_ + 1) + 10000L;
  const double dual_tol = std::max(opt_.dual_tol, 1e-12) * cost_scale_;
  const double feas_threshold = opt_.feas_tol;

  std::vector<double> y(m_, 0.0);
  std::vector<double> cb(m_, 0.0);
  std::vector<double> d(m_, 0.0);
  std::vector<double> acol(m_, 0.0);
  int pivots_since_refactor = 0;
  long degen_streak = 0;
  bool bland = false;

  while (true) {
    if (iterations_ >= iter_limit) {
      infeasibility_ = total_infeasibility();
      finalize();
      return LpStatus::IterationLimit;
    }

    double infeas = m_ > 0 ? total_infeasibility() : 0.0;
    bool phase1 = infeas > feas_threshold;

    // Pricing. Phase 1 prices the composite infeasibility gradient: basic
    // columns below their bound get cost -1, above +1.
    if (m_ > 0) {
      for (int p = 0; p < m_; ++p) {
        int c = basic_[p];
        if (phase1) {
          if (x_[c] < lb_[c] - feas_threshold) cb[p] = -1.0;
          else if (x_[c] > ub_[c] + feas_threshold) cb[p] = 1.0;
          else cb[p] = 0.0;
        } else {
          cb[p] = cost_[c];
        }
      }
      btran(cb, y);
    }

    int enter = -1;
    int enter_dir = 0;
    double best_score = phase1 ? 1e-9 : dual_tol;
    for (int j = 0; j < ntot_; ++j) {
      std::uint8_t st = stat_[j];
      if (st == kBasic) continue;
      if (lb_[j] == ub_[j]) continue;  // fixed
      double red = (phase1 ? 0.0 : cost_[j]) - column_dot(j, y);
      int dir = 0;
      if (st == kLower) {
        if (red < -best_score) dir = 1;
      } else if (st == kUpper) {
        if (red > best_score) dir = -1;
      } else {  // free
        if (red < -best_score) dir = 1;
        else if (red > best_score) dir = -1;
      }
      if (dir != 0) {
        if (bland) {
          enter = j;
          enter_dir = dir;
          break;
        }
        best_score = std::abs(red);
        enter = j;
        enter_dir = dir;
      }
    }

    if (enter < 0) {
      if (phase1) {
        infeasibility_ = infeas;
        finalize();
        return LpStatus::Infeasible;
      }
      infeasibility_ = 0.0;
      finalize();
      return LpStatus::Optimal;
    }

    ++iterations_;

    std::fill(acol.begin(), acol.end(), 0.0);
    scatter_column(enter, acol);
    ftran(acol, d);

    // Ratio test. The entering column moves by enter_dir * step; basic
    // position p moves by -enter_dir * d[p] * step. Strictly smaller steps
    // win; near-ties (1e-12) go to the smallest leaving column index.
    const double sigma = static_cast<double>(enter_dir);
    const double piv_tol = 1e-9;
    double best_step = kInf;
    int leave_pos = -1;
    int leave_side = 0;  // bound the leaving variable lands on
    int leave_col = -1;
    bool flip = false;
    double range = ub_[enter] - lb_[enter];
    if (range < kInf) {
      best_step = range;
      leave_col = enter;
      flip = true;
    }
    for (int p = 0; p < m_; ++p) {
      double g = sigma * d[p];
      if (std::abs(g) <= piv_tol) continue;
      int c = basic_[p];
      double xv = x_[c];
      double step = kInf;
      int side = 0;
      if (phase1 && xv < lb_[c] - feas_threshold) {
        if (g < 0.0) {  // moving up toward its violated lower bound
          step = (lb_[c] - xv) / (-g);
          side = 0;
        }
      } else if (phase1 && xv > ub_[c] + feas_threshold) {
        if (g > 0.0) {
          step = (xv - ub_[c]) / g;
          side = 1;
        }
      } else if (g > 0.0) {
        if (lb_[c] > -kInf) {
          step = (xv - lb_[c]) / g;
          side = 0;
        }
      } else {
        if (ub_[c] < kInf) {
          step = (ub_[c] - xv) / (-g);
          side = 1;
        }
      }
      if (step == kInf) continue;
      if (step < 0.0) step = 0.0;
      bool better = step < best_step - 1e-12 ||
                    (step <= best_step + 1e-12 && c < leave_col);
      if (leave_col < 0) better = step < best_step;
      if (better) {
        best_step = step;
        leave_pos = p;
        leave_side = side;
        leave_col = c;
        flip = false;
      }
    }

    if (best_step == kInf) {
      if (phase1) {
        // Cannot happen: a negative phase-1 gradient always moves some
        // violated basic toward its bound.
        throw SolveError("lp: unbounded phase-1 direction");
      }
      infeasibility_ = 0.0;
      finalize();
      return LpStatus::Unbounded;
    }

    if (best_step <= 1e-12) {
      if (++degen_streak >= 1000) bland = true;
    } else {
      degen_streak = 0;
      bland = false;
    }

    // Apply the step.
    x_[enter] += sigma * best_step;
    for (int p = 0; p < m_; ++p) {
      if (d[p] != 0.0) x_[basic_[p]] -= sigma * d[p] * best_step;
    }

    if (flip) {
      stat_[enter] = stat_[enter] == kLower ? kUpper : kLower;
      x_[enter] = stat_[enter] == kLower ? lb_[enter] : ub_[enter];
      continue;
    }

    // Basis change.
    stat_[leave_col] = leave_side == 0 ? kLower : kUpper;
    x_[leave_col] = leave_side == 0 ? lb_[leave_col] : ub_[leave_col];
    stat_[enter] = kBasic;
    basic_[leave_pos] = enter;

    Eta eta;
    eta.pivot_pos = leave_pos;
    eta.diag = d[leave_pos];
    for (int p = 0; p < m_; ++p) {
      if (p != leave_pos && d[p] != 0.0) eta.entries.emplace_back(p, d[p]);
    }
    if (std::abs(eta.diag) < 1e-11) {
      // Numerically unusable pivot: rebuild the factorization instead of
      // stacking an ill-conditioned eta.
      if (!factorize()) {
        cold_basis();
        snap_nonbasic_values();
        if (!factorize()) throw SolveError("lp: singular basis after pivot");
      }
      compute_basic_values();
      pivots_since_refactor = 0;
      continue;
    }
    etas_.push_back(std::move(eta));

    if (++pivots_since_refactor >= opt_.refactor_every) {
      if (!factorize()) {
        cold_basis();
        snap_nonbasic_values();
        if (!factorize()) throw SolveError("lp: singular basis at refactorization");
      }
      compute_basic_values();
      pivots_since_refactor = 0;
    }
  }
}

}  // namespace shipopt::detail
