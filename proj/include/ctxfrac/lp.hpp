#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "ctxfrac/errors.hpp"
#include "ctxfrac/rational.hpp"

namespace ctxfrac {

enum class Sense { Le, Ge };

// maximize objective . x  subject to  lhs.row(i) . x  (<= or >=)  rhs[i],
// with x >= 0 when nonnegative, otherwise x free.
template <class Scalar>
struct LinearProgram {
  Eigen::Vector<Scalar, Eigen::Dynamic> objective;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> lhs;
  Eigen::Vector<Scalar, Eigen::Dynamic> rhs;
  std::vector<Sense> senses;
  bool nonnegative = true;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

// Dual sign convention under maximization: dual[i] >= 0 for <= rows and
// dual[i] <= 0 for >= rows, so objective . x <= dual . rhs for any feasible x.
template <class Scalar>
struct LpSolution {
  LpStatus status = LpStatus::Optimal;
  Scalar objective_value = Scalar(0);
  Eigen::Vector<Scalar, Eigen::Dynamic> primal;
  Eigen::Vector<Scalar, Eigen::Dynamic> dual;
  long long iterations = 0;
};

namespace detail {

template <class Scalar>
struct SimplexTableau {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;
  using RowVector = Eigen::RowVector<Scalar, Eigen::Dynamic>;

  Matrix body;              // active constraint rows over all columns
  Vector rhs;               // kept nonnegative throughout
  RowVector reduced;        // reduced costs of the current objective
  Scalar objective{0};
  std::vector<int> basis;   // basic column per row
  std::vector<char> row_active;
  std::vector<char> col_blocked;
  long long iterations = 0;

  int rows() const { return static_cast<int>(basis.size()); }
  int cols() const { return static_cast<int>(body.cols()); }

  void pivot(int r, int c) {
    const Scalar p = body(r, c);
    body.row(r) /= p;
    rhs[r] /= p;
    for (int i = 0; i < rows(); ++i) {
      if (i == r || !row_active[i]) continue;
      const Scalar f = body(i, c);
      if (f == Scalar(0)) continue;
      body.row(i) -= f * body.row(r);
      rhs[i] -= f * rhs[r];
    }
    const Scalar f = reduced[c];
    if (f != Scalar(0)) {
      reduced -= f * body.row(r);
      objective += f * rhs[r];
    }
    basis[r] = c;
    ++iterations;
  }

  // Runs simplex iterations until optimality; returns false on unboundedness.
  // Dantzig pricing with a permanent switch to Bland's rule when the
  // objective stalls, which guarantees termination.  Under Dantzig pricing
  // the leaving row is chosen among (near-)minimal ratios by largest pivot
  // element: dividing a row by a near-threshold pivot multiplies rounding
  // error by its reciprocal and can corrupt the whole tableau.  With exact
  // arithmetic ratio_slack is zero and the pass only breaks exact ties.
  bool optimize(const Scalar& pivot_tol, const Scalar& ratio_slack) {
    using std::abs;
    bool bland = false;
    long long stall = 0;
    Scalar last = objective;
    const long long stall_limit = 4LL * (rows() + cols()) + 64;
    const long long hard_limit = 400000;
    for (;;) {
      int enter = -1;
      if (bland) {
        for (int j = 0; j < cols(); ++j)
          if (!col_blocked[j] && reduced[j] > pivot_tol) {
            enter = j;
            break;
          }
      } else {
        Scalar best = pivot_tol;
        for (int j = 0; j < cols(); ++j)
          if (!col_blocked[j] && reduced[j] > best) {
            best = reduced[j];
            enter = j;
          }
      }
      if (enter < 0) return true;
      int leave = -1;
      Scalar best_ratio(0);
      for (int i = 0; i < rows(); ++i) {
        if (!row_active[i] || !(body(i, enter) > pivot_tol)) continue;
        const Scalar ratio = rhs[i] / body(i, enter);
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis[i] < basis[leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (leave < 0) return false;
      if (!bland) {
        const Scalar cutoff = best_ratio + ratio_slack;
        for (int i = 0; i < rows(); ++i) {
          if (i == leave || !row_active[i] || !(body(i, enter) > pivot_tol))
            continue;
          if (rhs[i] / body(i, enter) <= cutoff &&
              body(i, enter) > body(leave, enter))
            leave = i;
        }
      }
      pivot(leave, enter);
      if (iterations > hard_limit)
        raise(ErrorCode::NumericalFailure, "simplex iteration limit exceeded");
      if (!bland) {
        if (objective > last) {
          last = objective;
          stall = 0;
        } else if (++stall > stall_limit) {
          bland = true;
        }
      }
    }
  }
};

}  // namespace detail

// Dense two-phase simplex.  One implementation serves both scalar types:
// with double it uses the tolerances from numeric_policy<double>, with
// Rational every comparison is exact and the result is a true vertex.
template <class Scalar>
LpSolution<Scalar> solve_lp(const LinearProgram<Scalar>& lp) {
  using Policy = numeric_policy<Scalar>;
  using Vector = Eigen::Vector<Scalar, Eigen::Dynamic>;
  using std::abs;

  const int m = static_cast<int>(lp.lhs.rows());
  const int n = static_cast<int>(lp.lhs.cols());
  if (lp.objective.size() != n || lp.rhs.size() != m ||
      static_cast<int>(lp.senses.size()) != m)
    raise(ErrorCode::ShapeMismatch, "linear program dimensions disagree");

  // Columns: original variables (split into u - w when free), then one
  // slack/surplus per row, then artificials for >= rows.
  const int nc = lp.nonnegative ? n : 2 * n;
  std::vector<int> sign(m, 1);
  std::vector<Sense> sense(lp.senses);
  for (int i = 0; i < m; ++i)
    if (lp.rhs[i] < Scalar(0)) {
      sign[i] = -1;
      sense[i] = sense[i] == Sense::Le ? Sense::Ge : Sense::Le;
    }
  int n_art = 0;
  std::vector<int> art_col(m, -1);
  for (int i = 0; i < m; ++i)
    if (sense[i] == Sense::Ge) art_col[i] = nc + m + n_art++;
  const int total = nc + m + n_art;

  detail::SimplexTableau<Scalar> tab;
  tab.body.setZero(m, total);
  tab.rhs.resize(m);
  tab.reduced.setZero(total);
  tab.basis.assign(m, -1);
  tab.row_active.assign(m, 1);
  tab.col_blocked.assign(total, 0);

  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const Scalar a = Scalar(sign[i]) * lp.lhs(i, j);
      tab.body(i, j) = a;
      if (!lp.nonnegative) tab.body(i, n + j) = -a;
    }
    tab.rhs[i] = Scalar(sign[i]) * lp.rhs[i];
    tab.body(i, nc + i) = sense[i] == Sense::Le ? Scalar(1) : Scalar(-1);
    if (sense[i] == Sense::Le) {
      tab.basis[i] = nc + i;
    } else {
      tab.body(i, art_col[i]) = Scalar(1);
      tab.basis[i] = art_col[i];
    }
  }

  LpSolution<Scalar> out;
  const Scalar pivot_tol = Policy::pivot();

  if (n_art > 0) {
    // Phase 1: maximize minus the sum of artificials, starting value
    // -sum(rhs of >= rows); feasible iff the optimum reaches 0.
    for (int i = 0; i < m; ++i) {
      if (art_col[i] < 0) continue;
      tab.reduced += tab.body.row(i);
      tab.objective -= tab.rhs[i];
    }
    for (int i = 0; i < m; ++i)
      if (art_col[i] >= 0) tab.reduced[art_col[i]] = Scalar(0);
    if (!tab.optimize(pivot_tol, Policy::feasibility()))
      raise(ErrorCode::NumericalFailure, "phase-1 objective diverged");
    if (tab.objective < -Policy::feasibility()) {
      out.status = LpStatus::Infeasible;
      out.iterations = tab.iterations;
      return out;
    }
    // The phase-1 objective is minus the sum of the artificials, which is
    // nonpositive by construction; a value above tolerance means the
    // tableau has lost numerical integrity.
    if (tab.objective > Policy::feasibility())
      raise(ErrorCode::NumericalFailure, "phase-1 tableau corrupted");
    // Remove leftover basic artificials: pivot them out where possible
    // (on the largest-magnitude column, for stability), otherwise the row
    // is redundant and gets deactivated.
    for (int i = 0; i < m; ++i) {
      if (tab.basis[i] < nc + m) continue;
      int col = -1;
      for (int j = 0; j < nc + m; ++j)
        if (col < 0 || abs(tab.body(i, j)) > abs(tab.body(i, col))) col = j;
      if (col >= 0 && abs(tab.body(i, col)) > pivot_tol)
        tab.pivot(i, col);
      else
        tab.row_active[i] = 0;
    }
    for (int j = nc + m; j < total; ++j) tab.col_blocked[j] = 1;
  }

  // Phase 2: rebuild reduced costs for the real objective from scratch.
  Vector ext_cost = Vector::Zero(total);
  for (int j = 0; j < n; ++j) {
    ext_cost[j] = lp.objective[j];
    if (!lp.nonnegative) ext_cost[n + j] = -lp.objective[j];
  }
  for (int j = 0; j < total; ++j) tab.reduced[j] = ext_cost[j];
  tab.objective = Scalar(0);
  for (int i = 0; i < m; ++i) {
    if (!tab.row_active[i]) continue;
    const Scalar cb = ext_cost[tab.basis[i]];
    if (cb == Scalar(0)) continue;
    tab.reduced -= cb * tab.body.row(i);
    tab.objective += cb * tab.rhs[i];
  }
  if (!tab.optimize(pivot_tol, Policy::feasibility())) {
    out.status = LpStatus::Unbounded;
    out.iterations = tab.iterations;
    return out;
  }

  // Recover the primal point and, from the reduced costs of the logical
  // columns, the dual multipliers for the original row orientation.
  Vector x = Vector::Zero(nc);
  for (int i = 0; i < m; ++i)
    if (tab.row_active[i] && tab.basis[i] < nc) x[tab.basis[i]] = tab.rhs[i];
  out.primal.resize(n);
  for (int j = 0; j < n; ++j)
    out.primal[j] = lp.nonnegative ? x[j] : Scalar(x[j] - x[n + j]);
  out.dual.resize(m);
  for (int i = 0; i < m; ++i) {
    if (!tab.row_active[i]) {
      // A deactivated row is implied by the others, so weight zero keeps
      // the dual certificate valid.
      out.dual[i] = Scalar(0);
      continue;
    }
    const Scalar red = tab.reduced[nc + i];
    const Scalar y_hat = sense[i] == Sense::Le ? Scalar(-red) : Scalar(red);
    out.dual[i] = Scalar(sign[i]) * y_hat;
  }
  out.objective_value = tab.objective;
  out.iterations = tab.iterations;
  out.status = LpStatus::Optimal;

  // Certify before returning: primal feasibility, dual sign and
  // feasibility, and the strong-duality gap must all hold within policy.
  const Scalar ftol = Policy::feasibility();
  if (lp.nonnegative)
    for (int j = 0; j < n; ++j)
      if (out.primal[j] < -ftol)
        raise(ErrorCode::NumericalFailure, "solver returned negative variable");
  Vector row_val = lp.lhs * out.primal;
  for (int i = 0; i < m; ++i) {
    const bool ok = lp.senses[i] == Sense::Le ? row_val[i] <= lp.rhs[i] + ftol
                                              : row_val[i] >= lp.rhs[i] - ftol;
    if (!ok)
      raise(ErrorCode::NumericalFailure,
            "solver returned infeasible point at row " + std::to_string(i));
    const bool sign_ok = lp.senses[i] == Sense::Le ? out.dual[i] >= -ftol
                                                   : out.dual[i] <= ftol;
    if (!sign_ok)
      raise(ErrorCode::NumericalFailure, "dual multiplier has wrong sign");
  }
  Vector slack = lp.lhs.transpose() * out.dual - lp.objective;
  for (int j = 0; j < n; ++j) {
    const bool ok = lp.nonnegative ? slack[j] >= -ftol : abs(slack[j]) <= ftol;
    if (!ok)
      raise(ErrorCode::NumericalFailure, "dual point is infeasible");
  }
  const Scalar gap = out.objective_value - out.dual.dot(lp.rhs);
  if (abs(gap) > Policy::gap())
    raise(ErrorCode::NumericalFailure, "strong duality gap exceeds tolerance");
  return out;
}

}  // namespace ctxfrac
