#include "gmmsq/simplex.hpp"

#include <cmath>
#include <string>

namespace gmmsq::simplex {

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kFeasTol = 1e-10;

}  // namespace

Result find_feasible(const Problem& problem, int max_iterations) {
  const int rows = static_cast<int>(problem.a.rows());
  const int vars = static_cast<int>(problem.a.cols());
  if (rows != static_cast<int>(problem.relations.size()) || rows != problem.rhs.size()) {
    throw ParameterError("simplex: inconsistent problem dimensions");
  }

  // Normalize so every right-hand side is non-negative; remember flips so the
  // returned multipliers refer to the original rows.
  Matrix a = problem.a;
  Vector b = problem.rhs;
  std::vector<Relation> rel = problem.relations;
  std::vector<int> flip(rows, 1);
  for (int i = 0; i < rows; ++i) {
    if (b[i] < 0.0) {
      a.row(i) *= -1.0;
      b[i] = -b[i];
      flip[i] = -1;
      if (rel[i] == Relation::LessEq) rel[i] = Relation::GreaterEq;
      else if (rel[i] == Relation::GreaterEq) rel[i] = Relation::LessEq;
    }
  }

  // Column layout: vars | one slack/surplus per inequality | artificials | rhs.
  int n_slack = 0, n_art = 0;
  for (int i = 0; i < rows; ++i) {
    if (rel[i] != Relation::Equal) ++n_slack;
    if (rel[i] != Relation::LessEq) ++n_art;
  }
  const int ncols = vars + n_slack + n_art;
  Matrix t = Matrix::Zero(rows, ncols + 1);
  t.block(0, 0, rows, vars) = a;
  t.col(ncols) = b;

  std::vector<int> basis(rows, -1);
  std::vector<int> slack_col(rows, -1), art_col(rows, -1);
  int next_slack = vars, next_art = vars + n_slack;
  for (int i = 0; i < rows; ++i) {
    switch (rel[i]) {
      case Relation::LessEq:
        slack_col[i] = next_slack;
        t(i, next_slack) = 1.0;
        basis[i] = next_slack++;
        break;
      case Relation::GreaterEq:
        slack_col[i] = next_slack;
        t(i, next_slack++) = -1.0;
        art_col[i] = next_art;
        t(i, next_art) = 1.0;
        basis[i] = next_art++;
        break;
      case Relation::Equal:
        art_col[i] = next_art;
        t(i, next_art) = 1.0;
        basis[i] = next_art++;
        break;
    }
  }

  // Phase-1 objective row: reduced costs for minimizing the artificial sum.
  Eigen::RowVectorXd obj = Eigen::RowVectorXd::Zero(ncols + 1);
  for (int i = 0; i < rows; ++i) {
    if (art_col[i] >= 0) obj += t.row(i);
  }
  for (int i = 0; i < rows; ++i) {
    if (art_col[i] >= 0) obj[art_col[i]] = 0.0;
  }

  if (max_iterations <= 0) max_iterations = 50 * (rows + ncols);
  Result res;

  for (res.iterations = 0; res.iterations < max_iterations; ++res.iterations) {
    // Bland: entering column is the lowest index with positive reduced cost.
    int enter = -1;
    for (int j = 0; j < ncols; ++j) {
      if (obj[j] > kPivotTol) {
        enter = j;
        break;
      }
    }
    if (enter < 0) break;

    // Ratio test; ties broken by the smallest basic variable index.
    int leave = -1;
    double best_ratio = 0.0;
    for (int i = 0; i < rows; ++i) {
      if (t(i, enter) > kPivotTol) {
        const double ratio = t(i, ncols) / t(i, enter);
        if (leave < 0 || ratio < best_ratio - kFeasTol ||
            (ratio < best_ratio + kFeasTol && basis[i] < basis[leave])) {
          leave = i;
          best_ratio = ratio;
        }
      }
    }
    if (leave < 0) {
      // Cannot happen for an exact phase-1 (objective bounded below by 0);
      // reaching it means the tableau degraded numerically.
      res.status = Status::IterationLimit;
      res.infeasibility = obj[ncols];
      return res;
    }

    t.row(leave) /= t(leave, enter);
    for (int i = 0; i < rows; ++i) {
      if (i != leave && std::abs(t(i, enter)) > 0.0) {
        t.row(i) -= t(i, enter) * t.row(leave);
      }
    }
    obj -= obj[enter] * t.row(leave);
    basis[leave] = enter;
  }

  res.infeasibility = std::abs(obj[ncols]);

  // Multipliers w.r.t. original rows, read off the per-row auxiliary column.
  res.row_multipliers = Vector::Zero(rows);
  for (int i = 0; i < rows; ++i) {
    double y;
    if (art_col[i] >= 0) y = obj[art_col[i]] + 1.0;
    else y = rel[i] == Relation::LessEq ? obj[slack_col[i]] : -obj[slack_col[i]];
    res.row_multipliers[i] = flip[i] * y;
  }

  if (res.iterations >= max_iterations) {
    res.status = Status::IterationLimit;
    return res;
  }
  if (res.infeasibility > kFeasTol * (1.0 + b.lpNorm<1>())) {
    res.status = Status::Infeasible;
    return res;
  }

  // Pivot any leftover zero-valued artificials out of the basis when the row
  // has a usable structural column; all-zero rows are redundant and stay.
  for (int i = 0; i < rows; ++i) {
    if (basis[i] >= vars + n_slack) {
      for (int j = 0; j < vars + n_slack; ++j) {
        if (std::abs(t(i, j)) > kPivotTol) {
          t.row(i) /= t(i, j);
          for (int r = 0; r < rows; ++r) {
            if (r != i && std::abs(t(r, j)) > 0.0) t.row(r) -= t(r, j) * t.row(i);
          }
          basis[i] = j;
          break;
        }
      }
    }
  }

  res.status = Status::Feasible;
  res.x = Vector::Zero(vars);
  for (int i = 0; i < rows; ++i) {
    if (basis[i] < vars) res.x[basis[i]] = t(i, ncols);
  }
  return res;
}

}  // namespace gmmsq::simplex
