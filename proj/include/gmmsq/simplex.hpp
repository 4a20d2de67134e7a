#pragma once

#include <vector>

#include "gmmsq/common.hpp"

namespace gmmsq::simplex {

enum class Relation { LessEq, GreaterEq, Equal };

/// Feasibility problem: find x >= 0 with (A x)_i rel_i b_i for every row.
struct Problem {
  Matrix a;                         // rows x vars
  std::vector<Relation> relations;  // one per row
  Vector rhs;                       // one per row
};

enum class Status { Feasible, Infeasible, IterationLimit };

struct Result {
  Status status = Status::Infeasible;
  Vector x;               // variable values when feasible
  double infeasibility = 0.0;  // phase-1 objective at exit (0 when feasible)
  Vector row_multipliers;      // simplex multipliers; Farkas certificate when infeasible
  int iterations = 0;
};

/// Dense tableau phase-1 simplex with Bland's rule (deterministic,
/// anti-cycling). max_iterations <= 0 picks 50 * (rows + cols).
Result find_feasible(const Problem& problem, int max_iterations = 0);

}  // namespace gmmsq::simplex
