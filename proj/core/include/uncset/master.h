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

#ifndef UNCSET_MASTER_H_
#define UNCSET_MASTER_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "uncset/lp.h"
#include "uncset/numlin.h"
#include "uncset/uncertainty_set.h"

namespace uncset {

enum class ProblemKind { kObjectiveUncertain, kConstraintUncertain };

// Objective-uncertain: min d^T x + max_{c in U} c^T x over X.
// Constraint-uncertain: optimize d^T x over X subject to c^T x <= rhs for
// all c in U. `domain` holds X (rows and bounds) and d with its sense.
struct RobustProblem {
  ProblemKind kind = ProblemKind::kObjectiveUncertain;
  LinearProgram domain;
  double rhs = 0.0;

  std::size_t dim() const { return domain.num_vars(); }
  // Throws kMasterInfeasible if X is empty.
  void CheckFeasible() const;
};

// Sum x = N/2, x in [-1,1]^N, uncertain objective.
RobustProblem BuildObjProblem(std::size_t n);
// max sum x subject to c^T x <= 50 N, x in [-1,1]^N.
RobustProblem BuildFeasProblem(std::size_t n);

struct Graph {
  std::size_t num_nodes = 0;
  std::vector<std::pair<std::size_t, std::size_t>> arcs;  // (tail, head)
};

// Unit flow from source to sink on x in [0,1]^arcs with uncertain arc
// costs. Only meaningful for nonnegative costs. Throws kUnreachable.
RobustProblem BuildShortestPath(const Graph& graph, std::size_t source,
                                std::size_t sink);

struct PathResult {
  std::vector<std::size_t> arcs;
  bool loop_removed = false;
};
// Follows arcs with flow > 0.5 from source to sink; cycles on the way are
// cut out and flagged.
PathResult ExtractPath(const Graph& graph, std::span<const double> flow,
                       std::size_t source, std::size_t sink);

// Finite scenario list. Membership means membership in the convex hull,
// which gives the same robust counterpart.
class DiscreteUncertaintySet : public UncertaintySet {
 public:
  explicit DiscreteUncertaintySet(Matrix scenarios);

  std::size_t dim() const override { return scenarios_.cols(); }
  // Linear scan; ties go to the first row.
  AdversarialResult Adversarial(std::span<const double> x) const override;
  bool Contains(std::span<const double> c, double tol) const override;
  Vector SeedScenario() const override { return ColumnMeans(scenarios_); }

  const Matrix& scenarios() const { return scenarios_; }

 private:
  Matrix scenarios_;
};

struct SolveOptions {
  double tol = 1e-6;
  int max_iterations = 200;
};

struct IterationLog {
  int iteration = 0;
  double master_objective = 0.0;
  double violation = 0.0;
  double oracle_seconds = 0.0;
};

enum class SolveStatus { kConverged, kIterationLimit };
const char* SolveStatusName(SolveStatus status);

struct MasterState {
  Matrix scenarios;  // U'
  Vector x;
  double objective = 0.0;  // master objective (z* for the objective form)
  int iterations = 0;
  double last_violation = 0.0;
  SolveStatus status = SolveStatus::kConverged;
  std::vector<IterationLog> log;
};

// Scenario generation: solve the master over U', ask the oracle for the
// worst case at x*, add it while it violates by more than tol. Throws
// kMasterInfeasible if a master LP is infeasible.
MasterState SolveRobust(const RobustProblem& problem, const UncertaintySet& set,
                        const SolveOptions& options = {});

// Solves the master LP for a fixed scenario list (used for enumeration).
LpSolution SolveMaster(const RobustProblem& problem, const Matrix& scenarios);

struct EvalReport {
  double mean = 0.0;
  double quantile = 0.0;
  double feasible_fraction = 1.0;
  std::size_t count = 0;
};

// Statistics of c^T x over the rows of `scenarios`; the quantile is the
// ceil(q n)-th smallest value.
EvalReport Evaluate(std::span<const double> x, const Matrix& scenarios,
                    double q, std::optional<double> rhs = std::nullopt);

// "solution v1", N, x, objective, status, iterations.
void WriteSolution(std::ostream& out, const MasterState& state);
MasterState ReadSolution(std::istream& in);

}  // namespace uncset

#endif  // UNCSET_MASTER_H_
