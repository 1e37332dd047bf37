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
#include <cmath>
#include <functional>
#include <sstream>

#include "gtest/gtest.h"
#include "test_util.h"
#include "uncset/datagen.h"
#include "uncset/nn_adversarial.h"
#include "uncset/svdd_train.h"

namespace uncset {
namespace {

using testing::RandomMatrix;
using testing::RandomVector;
using testing::ThrownCode;

TEST(ProblemTest, Builders) {
  const RobustProblem obj = BuildObjProblem(10);
  ASSERT_EQ(obj.domain.rows.size(), 1u);
  EXPECT_EQ(obj.domain.rows[0].type, RowType::kEqual);
  EXPECT_EQ(obj.domain.rows[0].rhs, 5.0);
  EXPECT_NO_THROW(BuildObjProblem(20).CheckFeasible());
  EXPECT_EQ(BuildFeasProblem(20).rhs, 1000.0);
  EXPECT_EQ(ThrownCode([] { BuildObjProblem(0); }),
            ErrorCode::kInvalidArgument);

  RobustProblem empty = BuildObjProblem(2);
  empty.domain.AddRow(Vector{1, 1}, RowType::kGreaterEqual, 3);
  EXPECT_EQ(ThrownCode([&] { empty.CheckFeasible(); }),
            ErrorCode::kMasterInfeasible);
  EXPECT_EQ(ThrownCode([&] {
              SolveRobust(empty, DiscreteUncertaintySet(Matrix{{1, 1}}));
            }),
            ErrorCode::kMasterInfeasible);
}

TEST(SolveRobustTest, SingletonSets) {
  const MasterState obj =
      SolveRobust(BuildObjProblem(2), DiscreteUncertaintySet(Matrix{{1, 1}}));
  EXPECT_EQ(obj.status, SolveStatus::kConverged);
  EXPECT_NEAR(obj.objective, 1.0, 1e-9);
  EXPECT_NEAR(obj.x[0] + obj.x[1], 1.0, 1e-9);

  const MasterState zero = SolveRobust(
      BuildFeasProblem(20), DiscreteUncertaintySet(Matrix(1, 20, 0.0)));
  EXPECT_NEAR(zero.objective, 20.0, 1e-9);
  const MasterState flat = SolveRobust(
      BuildFeasProblem(20), DiscreteUncertaintySet(Matrix(1, 20, 100.0)));
  EXPECT_NEAR(flat.objective, 10.0, 1e-9);
}

void CheckAgainstEnumeration(const RobustProblem& problem, Rng& rng, double lo,
                             double hi) {
  const std::size_t n = problem.dim();
  const std::size_t count = 1 + rng.UniformIndex(50);
  const Matrix scenarios = RandomMatrix(rng, count, n, lo, hi);
  const DiscreteUncertaintySet set(scenarios);
  const MasterState state = SolveRobust(problem, set);
  ASSERT_EQ(state.status, SolveStatus::kConverged);
  const LpSolution all = SolveMaster(problem, scenarios);
  ASSERT_EQ(all.status, LpStatus::kOptimal);
  EXPECT_NEAR(state.objective, all.objective,
              1e-6 * std::max(1.0, std::abs(all.objective)));
  // Fresh oracle call at the final point.
  const AdversarialResult worst = set.Adversarial(state.x);
  const double threshold = problem.kind == ProblemKind::kObjectiveUncertain
                               ? state.objective
                               : problem.rhs;
  EXPECT_LE(worst.value - threshold, 1e-6);
  for (std::size_t i = 0; i < state.scenarios.rows(); ++i) {
    EXPECT_TRUE(set.Contains(state.scenarios.row(i), 1e-6));
  }
  for (std::size_t k = 1; k < state.log.size(); ++k) {
    if (problem.kind == ProblemKind::kObjectiveUncertain) {
      EXPECT_GE(state.log[k].master_objective,
                state.log[k - 1].master_objective - 1e-9);
    } else {
      EXPECT_LE(state.log[k].master_objective,
                state.log[k - 1].master_objective + 1e-9);
    }
  }
}

TEST(SolveRobustTest, DiscreteObjMatchesEnumeration) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    CheckAgainstEnumeration(BuildObjProblem(1 + rng.UniformIndex(10)), rng, 50,
                            150);
  }
}

TEST(SolveRobustTest, DiscreteFeasMatchesEnumeration) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    CheckAgainstEnumeration(BuildFeasProblem(1 + rng.UniformIndex(10)), rng,
                            -20, 150);
  }
}

TEST(SolveRobustTest, IterationLimitKeepsIncumbent) {
  Rng rng(3);
  const DiscreteUncertaintySet set(RandomMatrix(rng, 40, 8, 50, 150));
  SolveOptions options;
  options.max_iterations = 1;
  const MasterState state = SolveRobust(BuildObjProblem(8), set, options);
  EXPECT_EQ(state.status, SolveStatus::kIterationLimit);
  EXPECT_EQ(state.x.size(), 8u);
  EXPECT_GT(state.last_violation, options.tol);
}

TEST(SolveRobustTest, NetworkSetConvergesSoundly) {
  DatasetSpec spec;
  spec.dim = 4;
  spec.train_size = 120;
  spec.test_size = 500;
  spec.seed = 5;
  const Dataset d = Generate(spec);
  TrainConfig cfg;
  cfg.epochs = 100;
  cfg.seed = 5;
  Architecture arch{{12, 12, 6},
                    {PwaActivation::Relu(), PwaActivation::Relu(),
                     PwaActivation::Identity()}};
  const TrainedModel model = Train(d.train, arch, cfg);
  const NnUncertaintySet set(model.set, d.train);
  for (const RobustProblem& p : {BuildObjProblem(4), BuildFeasProblem(4)}) {
    const MasterState state = SolveRobust(p, set);
    ASSERT_EQ(state.status, SolveStatus::kConverged);
    const AdversarialResult worst = set.Adversarial(state.x);
    const double threshold =
        p.kind == ProblemKind::kObjectiveUncertain ? state.objective : p.rhs;
    EXPECT_LE(worst.value - threshold, 1e-6);
    for (std::size_t i = 0; i < state.scenarios.rows(); ++i) {
      EXPECT_TRUE(set.Contains(state.scenarios.row(i), 1e-6));
    }
  }
}

TEST(DiscreteSetTest, ConvexHullMembership) {
  const DiscreteUncertaintySet set(Matrix{{0, 0}, {2, 0}, {0, 2}});
  EXPECT_TRUE(set.Contains(Vector{0.5, 0.5}, 0));
  EXPECT_TRUE(set.Contains(Vector{2, 0}, 0));
  EXPECT_FALSE(set.Contains(Vector{1.5, 1.5}, 1e-9));
  const AdversarialResult r = set.Adversarial(Vector{1, 1});
  EXPECT_EQ(r.scenario, (Vector{2, 0}));  // tie goes to the first row
  EXPECT_EQ(set.SeedScenario(), (Vector{2.0 / 3, 2.0 / 3}));
}

TEST(ShortestPathTest, ParallelArcsAndChain) {
  const Graph parallel{2, {{0, 1}, {0, 1}}};
  const RobustProblem p = BuildShortestPath(parallel, 0, 1);
  const MasterState s = SolveRobust(p, DiscreteUncertaintySet(Matrix{{1, 2}}));
  EXPECT_NEAR(s.objective, 1.0, 1e-9);
  EXPECT_NEAR(s.x[0], 1.0, 1e-9);

  const Graph chain{4, {{0, 1}, {1, 2}, {2, 3}}};
  Rng rng(4);
  for (int k = 0; k < 5; ++k) {
    const MasterState c =
        SolveRobust(BuildShortestPath(chain, 0, 3),
                    DiscreteUncertaintySet(RandomMatrix(rng, 3, 3, 0, 10)));
    for (double f : c.x) EXPECT_NEAR(f, 1.0, 1e-9);
    EXPECT_EQ(ExtractPath(chain, c.x, 0, 3).arcs,
              (std::vector<std::size_t>{0, 1, 2}));
  }
  EXPECT_EQ(ThrownCode([&] { BuildShortestPath(chain, 3, 0); }),
            ErrorCode::kUnreachable);
}

Graph Grid(std::size_t side) {
  Graph g{side * side, {}};
  for (std::size_t r = 0; r < side; ++r) {
    for (std::size_t c = 0; c < side; ++c) {
      const std::size_t v = r * side + c;
      if (c + 1 < side) g.arcs.push_back({v, v + 1});
      if (r + 1 < side) g.arcs.push_back({v, v + side});
    }
  }
  return g;
}

// Arc index sets of every simple source-sink path.
std::vector<std::vector<std::size_t>> AllPaths(const Graph& g, std::size_t s,
                                               std::size_t t) {
  std::vector<std::vector<std::size_t>> paths;
  std::vector<std::size_t> current;
  std::vector<char> visited(g.num_nodes, 0);
  std::function<void(std::size_t)> dfs = [&](std::size_t at) {
    if (at == t) {
      paths.push_back(current);
      return;
    }
    visited[at] = 1;
    for (std::size_t j = 0; j < g.arcs.size(); ++j) {
      if (g.arcs[j].first != at || visited[g.arcs[j].second]) continue;
      current.push_back(j);
      dfs(g.arcs[j].second);
      current.pop_back();
    }
    visited[at] = 0;
  };
  dfs(s);
  return paths;
}

TEST(ShortestPathTest, GridAgainstPathEnumeration) {
  const Graph g = Grid(3);
  const auto paths = AllPaths(g, 0, 8);
  ASSERT_EQ(paths.size(), 6u);
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t count = trial < 5 ? 1 : 1 + rng.UniformIndex(6);
    const Matrix costs = RandomMatrix(rng, count, g.arcs.size(), 0, 10);
    double best_path = kLpInfinity;
    for (const auto& path : paths) {
      double worst = 0.0;
      for (std::size_t i = 0; i < count; ++i) {
        double len = 0.0;
        for (std::size_t j : path) len += costs(i, j);
        worst = std::max(worst, len);
      }
      best_path = std::min(best_path, worst);
    }
    const MasterState s =
        SolveRobust(BuildShortestPath(g, 0, 8), DiscreteUncertaintySet(costs));
    // Flow may split across paths once several scenarios compete.
    EXPECT_LE(s.objective, best_path + 1e-7);
    if (count == 1) EXPECT_NEAR(s.objective, best_path, 1e-7);
  }
}

TEST(ShortestPathTest, ExtractPathRemovesLoops) {
  // 0 -> 1 -> 2 -> 1 -> 3 with the cycle 1 -> 2 -> 1.
  const Graph g{4, {{0, 1}, {1, 2}, {2, 1}, {1, 3}}};
  const PathResult r = ExtractPath(g, Vector{1, 1, 1, 1}, 0, 3);
  EXPECT_TRUE(r.loop_removed);
  EXPECT_EQ(r.arcs, (std::vector<std::size_t>{0, 3}));
  const PathResult plain = ExtractPath(g, Vector{1, 0, 0, 1}, 0, 3);
  EXPECT_FALSE(plain.loop_removed);
}

TEST(EvaluateTest, Statistics) {
  const EvalReport one = Evaluate(Vector{1, 2}, Matrix{{3, 4}}, 0.9);
  EXPECT_EQ(one.mean, 11.0);
  EXPECT_EQ(one.quantile, 11.0);
  Rng rng(6);
  const Matrix scenarios = RandomMatrix(rng, 1000, 3, 0, 10);
  const EvalReport zero = Evaluate(Vector(3, 0.0), scenarios, 0.9, 1.0);
  EXPECT_EQ(zero.mean, 0.0);
  EXPECT_EQ(zero.quantile, 0.0);
  EXPECT_EQ(zero.feasible_fraction, 1.0);

  const Vector x{0.3, -1, 2};
  Vector values;
  for (std::size_t i = 0; i < scenarios.rows(); ++i) {
    values.push_back(Dot(x, scenarios.row(i)));
  }
  std::sort(values.begin(), values.end());
  const EvalReport r = Evaluate(x, scenarios, 0.9, values[499]);
  EXPECT_EQ(r.quantile, values[899]);
  EXPECT_EQ(r.count, 1000u);
  EXPECT_EQ(r.feasible_fraction, 0.5);
  EXPECT_EQ(Evaluate(x, scenarios, 0.9001).quantile, values[900]);
}

TEST(SolutionIoTest, RoundTrip) {
  const MasterState s = SolveRobust(
      BuildObjProblem(3), DiscreteUncertaintySet(Matrix{{1, 2, 3}, {3, 1, 2}}));
  std::stringstream out;
  WriteSolution(out, s);
  const MasterState back = ReadSolution(out);
  EXPECT_EQ(back.x, s.x);
  EXPECT_EQ(back.objective, s.objective);
  EXPECT_EQ(back.status, s.status);
  EXPECT_EQ(back.iterations, s.iterations);
  std::stringstream bad("solution v1\n3\n1 2\n");
  EXPECT_EQ(ThrownCode([&] { ReadSolution(bad); }), ErrorCode::kParseError);
}

}  // namespace
}  // namespace uncset
