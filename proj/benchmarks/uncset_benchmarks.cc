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

#include <benchmark/benchmark.h>

#include <cstdint>

#include "uncset/datagen.h"
#include "uncset/lp.h"
#include "uncset/master.h"
#include "uncset/nn_adversarial.h"
#include "uncset/svc_baseline.h"
#include "uncset/svdd_train.h"

namespace uncset {
namespace {

Matrix GaussianTrain(std::size_t dim, std::size_t m, std::uint64_t seed) {
  DatasetSpec spec;
  spec.dim = dim;
  spec.train_size = m;
  spec.test_size = 1;
  spec.seed = seed;
  return Generate(spec).train;
}

// Dense random LP: max 1^T x, A x <= b, 0 <= x <= 1, sized n x n.
void BM_SolveLp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  LinearProgram lp(n, Sense::kMaximize);
  lp.objective.assign(n, 1.0);
  for (std::size_t j = 0; j < n; ++j) lp.SetBounds(j, 0, 1);
  for (std::size_t i = 0; i < n; ++i) {
    Vector row(n);
    for (double& v : row) v = rng.Uniform(0, 1);
    lp.AddRow(row, RowType::kLessEqual, 0.25 * static_cast<double>(n));
  }
  for (auto _ : state) benchmark::DoNotOptimize(SolveLp(lp));
}
BENCHMARK(BM_SolveLp)->Arg(10)->Arg(40)->Arg(160);

void BM_TrainEpochs(benchmark::State& state) {
  const Matrix data = GaussianTrain(10, 250, 2);
  TrainConfig cfg;
  cfg.epochs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(Train(data, DefaultArchitecture(), cfg));
  }
}
BENCHMARK(BM_TrainEpochs)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_AdversarialDecomposed(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Matrix data = GaussianTrain(n, 250, 3);
  TrainConfig cfg;
  cfg.epochs = 50;
  const NnUncertaintySet set(Train(data, DefaultArchitecture(), cfg).set, data);
  const Vector x(n, 1.0 / static_cast<double>(n));
  state.counters["patterns"] = static_cast<double>(set.patterns().size());
  for (auto _ : state) benchmark::DoNotOptimize(set.Adversarial(x));
}
BENCHMARK(BM_AdversarialDecomposed)
    ->Arg(5)
    ->Arg(10)
    ->Unit(benchmark::kMillisecond);

void BM_AdversarialExactEllipsoid(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Matrix sigma = Matrix::Identity(n);
  for (std::size_t i = 0; i + 1 < n; ++i)
    sigma(i, i + 1) = sigma(i + 1, i) = 0.2;
  const NetworkSet set = EncodeEllipsoid(sigma, Vector(n, 0.0));
  const Box box{Vector(n, -10.0), Vector(n, 10.0)};
  const Vector x(n, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(AdversarialExact(x, set, box));
}
BENCHMARK(BM_AdversarialExactEllipsoid)->Arg(2)->Arg(4)->Arg(6);

void BM_SvcDual(benchmark::State& state) {
  const Matrix data =
      GaussianTrain(10, static_cast<std::size_t>(state.range(0)), 4);
  const Matrix q = WeightingMatrix(data);
  for (auto _ : state) benchmark::DoNotOptimize(SolveDual(data, q, 0.1));
}
BENCHMARK(BM_SvcDual)->Arg(100)->Arg(250)->Unit(benchmark::kMillisecond);

void BM_SolveRobustSvc(benchmark::State& state) {
  const Matrix data = GaussianTrain(10, 250, 5);
  const SvcUncertaintySet set =
      BuildSet(SolveDual(data, WeightingMatrix(data), 0.1));
  const RobustProblem problem = BuildObjProblem(10);
  for (auto _ : state) benchmark::DoNotOptimize(SolveRobust(problem, set));
}
BENCHMARK(BM_SolveRobustSvc)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace uncset

BENCHMARK_MAIN();
