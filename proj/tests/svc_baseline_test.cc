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

#include "uncset/svc_baseline.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.h"
#include "test_util.h"
#include "uncset/datagen.h"

namespace uncset {
namespace {

using testing::ActiveSetMinimum;
using testing::GridMinimum;
using testing::RandomMatrix;
using testing::RandomVector;
using testing::ThrownCode;

Matrix GaussianData(std::uint64_t seed, std::size_t m = 250) {
  DatasetSpec spec;
  spec.seed = seed;
  spec.train_size = m;
  spec.test_size = 1;
  return Generate(spec).train;
}

TEST(WeightingMatrixTest, WhitensData) {
  Rng rng(1);
  Matrix data(20000, 3);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    data(i, 0) = 10 * rng.Normal();
    data(i, 1) = rng.Normal();
    data(i, 2) = rng.Normal();
  }
  const Matrix q = WeightingMatrix(data);
  EXPECT_NEAR(q(0, 0), 0.1, 0.005);
  for (std::size_t i = 1; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      EXPECT_NEAR(q(i, j), i == j ? 1.0 : 0.0, 0.05);
    }
  }
  EXPECT_NEAR(q(0, 0) / q(1, 1), 0.1, 0.01);
}

TEST(WeightingMatrixTest, DegenerateInputs) {
  Rng rng(2);
  Matrix dup = RandomMatrix(rng, 30, 2, 0, 1);
  for (std::size_t i = 0; i < dup.rows(); ++i) dup(i, 1) = dup(i, 0);
  const Matrix q = WeightingMatrix(dup);
  EXPECT_TRUE(AllFinite(q.data()));
  EXPECT_EQ(ThrownCode([] { WeightingMatrix(Matrix(5, 2, 3.0)); }),
            ErrorCode::kDegenerateData);
}

TEST(KernelTest, Examples) {
  const Matrix eye = Matrix::Identity(2);
  EXPECT_EQ(KernelEval(Vector{1, 2}, Vector{1, 2}, eye, 7.5), 7.5);
  EXPECT_EQ(KernelEval(Vector{1, 0}, Vector{0, 1}, eye, 10), 8);
  Rng rng(3);
  const Matrix q = RandomMatrix(rng, 4, 4, -1, 1);
  for (int k = 0; k < 50; ++k) {
    const Vector u = RandomVector(rng, 4, -5, 5);
    const Vector v = RandomVector(rng, 4, -5, 5);
    EXPECT_EQ(KernelEval(u, v, q, 3), KernelEval(v, u, q, 3));
  }
}

TEST(SolveDualTest, TwoPointsSplitEvenly) {
  const SvcModel model =
      SolveDual(Matrix{{0, 0}, {1, 2}}, Matrix::Identity(2), 1.0);
  EXPECT_NEAR(model.alpha[0], 0.5, 1e-9);
  EXPECT_NEAR(model.alpha[1], 0.5, 1e-9);
}

TEST(SolveDualTest, NoWorseThanSingleVertex) {
  Rng rng(4);
  const Matrix data = RandomMatrix(rng, 10, 2, 0, 1);
  const SvcModel model = SolveDual(data, Matrix::Identity(2), 0.05);
  EXPECT_GE(model.box_bound(), 1.0);
  // alpha = e_i gives K_ii - K_ii = 0.
  EXPECT_LE(model.objective, 1e-12);
}

TEST(SolveDualTest, MatchesOraclesOnSmallInstances) {
  Rng rng(5);
  for (int trial = 0; trial < 12; ++trial) {
    const std::size_t m = 2 + rng.UniformIndex(7);
    const Matrix data = RandomMatrix(rng, m, 2, -3, 3);
    const double nu = rng.Uniform(1.0 / m, 1.0);
    const SvcModel model = SolveDual(data, Matrix::Identity(2), nu);
    EXPECT_NEAR(model.objective, ActiveSetMinimum(model), 1e-6) << "m " << m;
    if (m <= 5) {
      EXPECT_LE(model.objective, GridMinimum(model, 40) + 1e-9);
    }
  }
}

TEST(SolveDualTest, KktAndCoverageOnGaussianData) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix data = GaussianData(seed);
    const double nu = 0.1;
    const SvcModel model = SolveDual(data, WeightingMatrix(data), nu);
    EXPECT_LE(model.kkt_violation, 1e-6);
    EXPECT_NEAR(std::accumulate(model.alpha.begin(), model.alpha.end(), 0.0),
                1.0, 1e-8);
    for (double a : model.alpha) {
      EXPECT_GE(a, 0.0);
      EXPECT_LE(a, model.box_bound() + 1e-10);
    }
    EXPECT_NEAR(model.objective, DualObjective(model, model.alpha), 1e-9);
    const SvcUncertaintySet set = BuildSet(model);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      inside += set.Contains(data.row(i), 1e-9);
    }
    EXPECT_GE(inside / 250.0, 1 - nu - 2 / std::sqrt(250.0));
    for (std::size_t i : model.bsv) {
      EXPECT_NEAR(set.Score(data.row(i)), set.theta(),
                  1e-6 * std::max(1.0, set.theta()))
          << "BSV scores must not drop below theta by more than round-off";
      EXPECT_GE(set.Score(data.row(i)), set.theta() - 1e-9);
    }
    EXPECT_TRUE(set.Contains(set.SeedScenario(), 1e-9));
    EXPECT_TRUE(set.Contains(ColumnMeans(data), 0));
  }
}

TEST(BuildSetTest, EmptyBoundary) {
  Rng rng(6);
  const Matrix data = RandomMatrix(rng, 20, 2, 0, 1);
  const SvcModel model = SolveDual(data, Matrix::Identity(2), 1.0);
  EXPECT_EQ(ThrownCode([&] { BuildSet(model); }), ErrorCode::kEmptyBoundary);
}

SvcUncertaintySet SingleSv(const Vector& c1, double theta, const Box& box) {
  return SvcUncertaintySet(Matrix::Identity(c1.size()), Matrix::FromRows({c1}),
                           Vector{1.0}, theta, 0.1, box, c1);
}

TEST(SvcAdversarialTest, L1BallSupportFunction) {
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 1 + rng.UniformIndex(8);
    const Vector c1 = RandomVector(rng, n, -5, 5);
    const double theta = rng.Uniform(0.1, 2);
    const Box box{Vector(n, -20), Vector(n, 20)};
    const SvcUncertaintySet set = SingleSv(c1, theta, box);
    const Vector x = RandomVector(rng, n, -2, 2);
    const AdversarialResult r = set.Adversarial(x);
    ASSERT_EQ(r.status, AdversarialStatus::kOptimal);
    EXPECT_NEAR(r.value, Dot(x, c1) + theta * MaxAbs(x), 1e-7);
    EXPECT_LE(set.Score(r.scenario), theta + 1e-6);
    EXPECT_NEAR(set.Adversarial(Vector(n, 0.0)).value, 0.0, 1e-12);
  }
}

TEST(SvcAdversarialTest, DominatesSampledMembers) {
  Rng rng(8);
  const Matrix data = RandomMatrix(rng, 40, 3, 0, 10);
  const SvcUncertaintySet set =
      BuildSet(SolveDual(data, WeightingMatrix(data), 0.2));
  const Vector x{1, -2, 0.5};
  const AdversarialResult r = set.Adversarial(x);
  ASSERT_EQ(r.status, AdversarialStatus::kOptimal);
  EXPECT_LE(set.Score(r.scenario), set.theta() + 1e-6);
  EXPECT_TRUE(set.box().Contains(r.scenario, 1e-9));
  std::size_t members = 0;
  for (int k = 0; k < 100000; ++k) {
    Vector c(3);
    for (std::size_t j = 0; j < 3; ++j) {
      c[j] = rng.Uniform(set.box().lower[j], set.box().upper[j]);
    }
    if (!set.Contains(c, 0)) continue;
    ++members;
    EXPECT_GE(r.value, Dot(x, c) - 1e-9);
  }
  EXPECT_GT(members, 100u);
}

TEST(SvcAdversarialTest, ScalesWithData) {
  const Matrix data = GaussianData(3, 60);
  Matrix scaled = data;
  for (double& v : scaled.data()) v *= 3.0;
  const SvcUncertaintySet a =
      BuildSet(SolveDual(data, WeightingMatrix(data), 0.1));
  const SvcUncertaintySet b =
      BuildSet(SolveDual(scaled, WeightingMatrix(scaled), 0.1));
  // Q absorbs the scale, so theta is unchanged and support values scale.
  EXPECT_NEAR(a.theta(), b.theta(), 1e-6 * a.theta());
  Rng rng(9);
  const Vector x = RandomVector(rng, 10, -1, 1);
  EXPECT_NEAR(3 * a.Adversarial(x).value, b.Adversarial(x).value,
              1e-6 * std::abs(b.Adversarial(x).value));
}

TEST(NonnegVariantTest, CutsNegativeScenarios) {
  const Box box{Vector(2, -10), Vector(2, 10)};
  const SvcUncertaintySet set = SingleSv({0, 0}, 2, box);
  const SvcUncertaintySet pos = NonnegVariant(set);
  EXPECT_TRUE(set.Contains(Vector{-1, 0}, 0));
  EXPECT_FALSE(pos.Contains(Vector{-1, 0}, 0));
  EXPECT_NEAR(pos.Adversarial(Vector{-1, -1}).value, 0.0, 1e-9);
  for (double v : pos.Adversarial(Vector{-1, 2}).scenario) EXPECT_GE(v, -1e-9);

  const SvcUncertaintySet far = SingleSv({5, 5}, 1, box);
  const Vector x{-1, 0.5};
  EXPECT_NEAR(far.Adversarial(x).value, NonnegVariant(far).Adversarial(x).value,
              1e-9);
}

TEST(SvcModelIoTest, RoundTrip) {
  const Matrix data = GaussianData(4, 80);
  const SvcModel model = SolveDual(data, WeightingMatrix(data), 0.1);
  const SvcUncertaintySet set = BuildSet(model);
  std::stringstream s;
  WriteSvcModel(s, model, set.theta());
  const SvcModelFile file = ReadSvcModel(s);
  EXPECT_EQ(file.nu, 0.1);
  EXPECT_EQ(file.theta, set.theta());
  EXPECT_EQ(file.q, model.q);
  EXPECT_EQ(file.indices, model.sv);
  const SvcUncertaintySet back = SetFromFile(file, set.box());
  Rng rng(10);
  const Vector x = RandomVector(rng, 10, -1, 1);
  EXPECT_EQ(back.Adversarial(x).value, set.Adversarial(x).value);
  std::stringstream bad("svcmodel v2 3 1\n");
  EXPECT_EQ(ThrownCode([&] { ReadSvcModel(bad); }), ErrorCode::kParseError);
}

}  // namespace
}  // namespace uncset
