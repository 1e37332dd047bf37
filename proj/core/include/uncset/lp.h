// Copyright 2026 The uncset Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef UNCSET_LP_H_
#define UNCSET_LP_H_

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

#include "uncset/numlin.h"

namespace uncset {

inline constexpr double kLpInfinity = std::numeric_limits<double>::infinity();

enum class Sense { kMinimize, kMaximize };
enum class RowType { kLessEqual, kEqual, kGreaterEqual };

struct LpRow {
  Vector coeffs;
  RowType type = RowType::kLessEqual;
  double rhs = 0.0;
};

// Dense LP: optimize objectiveᵀx subject to rows and lower <= x <= upper.
// Variables are free unless bounded explicitly.
struct LinearProgram {
  LinearProgram() = default;
  explicit LinearProgram(std::size_t num_vars, Sense s = Sense::kMinimize);

  Sense sense = Sense::kMinimize;
  Vector objective;
  Vector lower;
  Vector upper;
  std::vector<LpRow> rows;

  std::size_t num_vars() const { return objective.size(); }
  void AddRow(std::span<const double> coeffs, RowType type, double rhs);
  void SetBounds(std::size_t j, double lo, double hi);
  // Throws kDimensionMismatch / kInvalidArgument on malformed input.
  void Validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded };

const char* LpStatusName(LpStatus status);

struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Vector x;
  double objective = 0.0;
  std::int64_t iterations = 0;
  // Multipliers with objective = Σ row_duals[i] * rows[i].coeffs + reduced
  // costs. For a minimization, <= rows get non-positive and >= rows
  // non-negative multipliers; signs flip for a maximization.
  Vector row_duals;
  Vector reduced_costs;
};

struct LpOptions {
  double feasibility_tol = 1e-9;
  double optimality_tol = 1e-9;
  std::int64_t max_iterations = 1'000'000;
  // Consecutive degenerate pivots before switching to Bland's rule.
  std::int64_t bland_after = 1000;
};

// Two-phase bounded-variable primal simplex on a dense tableau. Throws
// kIterationLimit when max_iterations pivots do not reach a verdict.
LpSolution SolveLp(const LinearProgram& lp, const LpOptions& options = {});

// Solves the LP by running the simplex on its dual, which is much cheaper
// when there are many more rows than variables. Requires finite bounds on
// every variable.
LpSolution SolveLpViaDual(const LinearProgram& lp,
                          const LpOptions& options = {});

// Lower bound (minimize) or upper bound (maximize) on the optimum proved by
// the multipliers of a solution; equals the objective at an optimum.
double DualBound(const LinearProgram& lp, const LpSolution& solution);

// Largest constraint or bound violation of x.
double MaxViolation(const LinearProgram& lp, std::span<const double> x);

// Human-readable dump, one row per line. Debug aid only.
void DumpLp(std::ostream& out, const LinearProgram& lp);

}  // namespace uncset

#endif  // UNCSET_LP_H_
