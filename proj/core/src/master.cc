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

#include "uncset/master.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <istream>
#include <ostream>
#include <queue>
#include <string>

#include "uncset/error.h"
#include "uncset/text_io.h"

namespace uncset {

void RobustProblem::CheckFeasible() const {
  LinearProgram probe = domain;
  std::fill(probe.objective.begin(), probe.objective.end(), 0.0);
  if (SolveLp(probe).status == LpStatus::kInfeasible) {
    throw Error(ErrorCode::kMasterInfeasible, "domain X is empty");
  }
}

RobustProblem BuildObjProblem(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "N must be positive");
  RobustProblem p;
  p.kind = ProblemKind::kObjectiveUncertain;
  p.domain = LinearProgram(n, Sense::kMinimize);
  for (std::size_t j = 0; j < n; ++j) p.domain.SetBounds(j, -1.0, 1.0);
  p.domain.AddRow(Vector(n, 1.0), RowType::kEqual,
                  static_cast<double>(n) / 2.0);
  return p;
}

RobustProblem BuildFeasProblem(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "N must be positive");
  RobustProblem p;
  p.kind = ProblemKind::kConstraintUncertain;
  p.domain = LinearProgram(n, Sense::kMaximize);
  p.domain.objective.assign(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) p.domain.SetBounds(j, -1.0, 1.0);
  p.rhs = 50.0 * static_cast<double>(n);
  return p;
}

RobustProblem BuildShortestPath(const Graph& graph, std::size_t source,
                                std::size_t sink) {
  const std::size_t v = graph.num_nodes;
  if (source >= v || sink >= v) {
    throw Error(ErrorCode::kIndexOutOfRange, "source or sink not a node");
  }
  std::vector<std::vector<std::size_t>> out(v);
  for (const auto& [tail, head] : graph.arcs) {
    if (tail >= v || head >= v) {
      throw Error(ErrorCode::kIndexOutOfRange, "arc endpoint not a node");
    }
    out[tail].push_back(head);
  }
  std::vector<char> seen(v, 0);
  std::queue<std::size_t> frontier;
  frontier.push(source);
  seen[source] = 1;
  while (!frontier.empty()) {
    const std::size_t u = frontier.front();
    frontier.pop();
    for (std::size_t w : out[u]) {
      if (!seen[w]) {
        seen[w] = 1;
        frontier.push(w);
      }
    }
  }
  if (!seen[sink]) {
    throw Error(ErrorCode::kUnreachable, "node " + std::to_string(sink) +
                                             " is not reachable from " +
                                             std::to_string(source));
  }
  const std::size_t a = graph.arcs.size();
  RobustProblem p;
  p.kind = ProblemKind::kObjectiveUncertain;
  p.domain = LinearProgram(a, Sense::kMinimize);
  for (std::size_t j = 0; j < a; ++j) p.domain.SetBounds(j, 0.0, 1.0);
  for (std::size_t node = 0; node < v; ++node) {
    Vector row(a, 0.0);
    for (std::size_t j = 0; j < a; ++j) {
      if (graph.arcs[j].first == node) row[j] += 1.0;
      if (graph.arcs[j].second == node) row[j] -= 1.0;
    }
    const double supply = node == source ? 1.0 : node == sink ? -1.0 : 0.0;
    if (source == sink && node == source) continue;
    p.domain.AddRow(row, RowType::kEqual, supply);
  }
  return p;
}

PathResult ExtractPath(const Graph& graph, std::span<const double> flow,
                       std::size_t source, std::size_t sink) {
  PathResult result;
  std::vector<char> used(graph.arcs.size(), 0);
  std::vector<std::size_t> nodes{source};
  std::size_t at = source;
  while (at != sink) {
    std::size_t next_arc = graph.arcs.size();
    for (std::size_t j = 0; j < graph.arcs.size(); ++j) {
      if (!used[j] && flow[j] > 0.5 && graph.arcs[j].first == at) {
        next_arc = j;
        break;
      }
    }
    if (next_arc == graph.arcs.size()) {
      throw Error(ErrorCode::kUnreachable, "flow does not reach the sink");
    }
    used[next_arc] = 1;
    at = graph.arcs[next_arc].second;
    // Revisiting a node closes a cycle: drop it.
    auto seen = std::find(nodes.begin(), nodes.end(), at);
    if (seen != nodes.end()) {
      const auto keep = static_cast<std::size_t>(seen - nodes.begin());
      nodes.resize(keep + 1);
      result.arcs.resize(keep);
      result.loop_removed = true;
      continue;
    }
    nodes.push_back(at);
    result.arcs.push_back(next_arc);
  }
  return result;
}

DiscreteUncertaintySet::DiscreteUncertaintySet(Matrix scenarios)
    : scenarios_(std::move(scenarios)) {
  if (scenarios_.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "empty scenario list");
  }
}

AdversarialResult DiscreteUncertaintySet::Adversarial(
    std::span<const double> x) const {
  AdversarialResult out;
  std::size_t best = 0;
  double best_value = Dot(x, scenarios_.row(0));
  for (std::size_t i = 1; i < scenarios_.rows(); ++i) {
    const double v = Dot(x, scenarios_.row(i));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  out.status = AdversarialStatus::kOptimal;
  out.scenario = scenarios_.RowVector(best);
  out.value = best_value;
  out.subproblems = 1;
  return out;
}

bool DiscreteUncertaintySet::Contains(std::span<const double> c,
                                      double tol) const {
  // min sum |r| s.t. sum lambda_i c^i + r = c, lambda in the simplex.
  const std::size_t m = scenarios_.rows();
  const std::size_t n = scenarios_.cols();
  LinearProgram lp(m + 2 * n, Sense::kMinimize);
  for (std::size_t i = 0; i < m; ++i) lp.SetBounds(i, 0.0, 1.0);
  for (std::size_t j = 0; j < 2 * n; ++j) {
    lp.SetBounds(m + j, 0.0, kLpInfinity);
    lp.objective[m + j] = 1.0;
  }
  Vector simplex(m + 2 * n, 0.0);
  std::fill(simplex.begin(), simplex.begin() + static_cast<std::ptrdiff_t>(m),
            1.0);
  lp.AddRow(simplex, RowType::kEqual, 1.0);
  for (std::size_t j = 0; j < n; ++j) {
    Vector row(m + 2 * n, 0.0);
    for (std::size_t i = 0; i < m; ++i) row[i] = scenarios_(i, j);
    row[m + j] = 1.0;
    row[m + n + j] = -1.0;
    lp.AddRow(row, RowType::kEqual, c[j]);
  }
  const LpSolution sol = SolveLp(lp);
  return sol.status == LpStatus::kOptimal && sol.objective <= tol;
}

const char* SolveStatusName(SolveStatus status) {
  return status == SolveStatus::kConverged ? "Converged" : "IterationLimit";
}

LpSolution SolveMaster(const RobustProblem& problem, const Matrix& scenarios) {
  const std::size_t n = problem.dim();
  if (scenarios.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "scenario dimension differs from the problem");
  }
  if (problem.kind == ProblemKind::kConstraintUncertain) {
    LinearProgram lp = problem.domain;
    for (std::size_t i = 0; i < scenarios.rows(); ++i) {
      lp.AddRow(scenarios.row(i), RowType::kLessEqual, problem.rhs);
    }
    return SolveLp(lp);
  }
  if (problem.domain.sense != Sense::kMinimize) {
    throw Error(ErrorCode::kInvalidArgument,
                "objective-uncertain problems are minimized");
  }
  // Variables x, z: min d^T x + z, c^T x - z <= 0.
  LinearProgram lp(n + 1, Sense::kMinimize);
  std::copy(problem.domain.objective.begin(), problem.domain.objective.end(),
            lp.objective.begin());
  lp.objective[n] = 1.0;
  std::copy(problem.domain.lower.begin(), problem.domain.lower.end(),
            lp.lower.begin());
  std::copy(problem.domain.upper.begin(), problem.domain.upper.end(),
            lp.upper.begin());
  Vector row(n + 1);
  for (const LpRow& r : problem.domain.rows) {
    std::copy(r.coeffs.begin(), r.coeffs.end(), row.begin());
    row[n] = 0.0;
    lp.AddRow(row, r.type, r.rhs);
  }
  for (std::size_t i = 0; i < scenarios.rows(); ++i) {
    std::copy(scenarios.row(i).begin(), scenarios.row(i).end(), row.begin());
    row[n] = -1.0;
    lp.AddRow(row, RowType::kLessEqual, 0.0);
  }
  LpSolution sol = SolveLp(lp);
  if (sol.status == LpStatus::kOptimal) sol.x.resize(n);
  return sol;
}

MasterState SolveRobust(const RobustProblem& problem, const UncertaintySet& set,
                        const SolveOptions& options) {
  const std::size_t n = problem.dim();
  if (set.dim() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "uncertainty set dimension differs from the problem");
  }
  MasterState state;
  state.scenarios.AppendRow(set.SeedScenario());
  while (true) {
    const LpSolution sol = SolveMaster(problem, state.scenarios);
    if (sol.status == LpStatus::kInfeasible) {
      throw Error(ErrorCode::kMasterInfeasible,
                  "master LP infeasible with " +
                      std::to_string(state.scenarios.rows()) + " scenarios");
    }
    if (sol.status == LpStatus::kUnbounded) {
      throw Error(ErrorCode::kMasterInfeasible, "master LP is unbounded");
    }
    ++state.iterations;
    state.x = sol.x;
    state.objective = sol.objective;
    const auto start = std::chrono::steady_clock::now();
    const AdversarialResult worst = set.Adversarial(state.x);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (worst.status != AdversarialStatus::kOptimal) {
      throw Error(ErrorCode::kMasterInfeasible,
                  "uncertainty set oracle found no scenario");
    }
    const double threshold =
        problem.kind == ProblemKind::kConstraintUncertain
            ? problem.rhs
            : sol.objective - Dot(problem.domain.objective, state.x);
    state.last_violation = worst.value - threshold;
    state.log.push_back(IterationLog{state.iterations, state.objective,
                                     state.last_violation, seconds});
    if (state.last_violation <= options.tol) {
      state.status = SolveStatus::kConverged;
      return state;
    }
    if (state.iterations >= options.max_iterations) {
      state.status = SolveStatus::kIterationLimit;
      return state;
    }
    state.scenarios.AppendRow(worst.scenario);
  }
}

EvalReport Evaluate(std::span<const double> x, const Matrix& scenarios,
                    double q, std::optional<double> rhs) {
  if (scenarios.cols() != x.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "scenario dimension differs from the solution");
  }
  if (!(q > 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "quantile must lie in (0, 1]");
  }
  EvalReport report;
  report.count = scenarios.rows();
  if (report.count == 0) return report;
  Vector values(report.count);
  std::size_t feasible = 0;
  double total = 0.0;
  for (std::size_t i = 0; i < report.count; ++i) {
    values[i] = Dot(x, scenarios.row(i));
    total += values[i];
    if (rhs && values[i] <= *rhs) ++feasible;
  }
  report.mean = total / static_cast<double>(report.count);
  std::sort(values.begin(), values.end());
  auto index = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(report.count) - 1e-9));
  index = std::clamp<std::size_t>(index, 1, report.count);
  report.quantile = values[index - 1];
  if (rhs) {
    report.feasible_fraction =
        static_cast<double>(feasible) / static_cast<double>(report.count);
  }
  return report;
}

void WriteSolution(std::ostream& out, const MasterState& state) {
  out << "solution v1\n" << state.x.size() << '\n';
  for (std::size_t j = 0; j < state.x.size(); ++j) {
    out << (j ? " " : "") << FormatDouble(state.x[j]);
  }
  out << "\nobjective " << FormatDouble(state.objective) << "\nstatus "
      << SolveStatusName(state.status) << "\niterations " << state.iterations
      << '\n';
}

MasterState ReadSolution(std::istream& in) {
  TokenReader reader(in);
  reader.Expect("solution");
  reader.Expect("v1");
  const std::int64_t n = reader.NextInt();
  if (n < 1) throw Error(ErrorCode::kParseError, "bad solution dimension");
  MasterState state;
  state.x.resize(static_cast<std::size_t>(n));
  for (double& v : state.x) v = reader.NextDouble();
  reader.Expect("objective");
  state.objective = reader.NextDouble();
  reader.Expect("status");
  const std::string status = reader.Next();
  if (status == "Converged") {
    state.status = SolveStatus::kConverged;
  } else if (status == "IterationLimit") {
    state.status = SolveStatus::kIterationLimit;
  } else {
    throw Error(ErrorCode::kParseError, "unknown status '" + status + "'");
  }
  reader.Expect("iterations");
  state.iterations = static_cast<int>(reader.NextInt());
  return state;
}

}  // namespace uncset
