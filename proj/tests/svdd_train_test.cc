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

#include "uncset/svdd_train.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "gtest/gtest.h"
#include "oracles.h"
#include "test_util.h"
#include "uncset/datagen.h"

namespace uncset {
namespace {

using testing::IdentityNet;
using testing::RandomNet;
using testing::RandomVector;
using testing::ThrownCode;
using testing::WorstGradientError;

// 1-D identity net with c̄ = 0: radii are |data|.
Matrix Column(const Vector& values) {
  Matrix m(values.size(), 1);
  for (std::size_t i = 0; i < values.size(); ++i) m(i, 0) = values[i];
  return m;
}

TEST(QuantileParamsTest, DefaultCoefficients) {
  QuantileParams p;
  EXPECT_EQ(p.CoefficientsA(), (Vector{5, 10, 15, 20, 25}));
  EXPECT_EQ(p.CoefficientsB(), (Vector{1, 2, 3, 4, 5}));
  EXPECT_EQ(p.QuantileIndex(250), 225u);
  EXPECT_EQ(ThrownCode([&] { p.QuantileIndex(40); }),
            ErrorCode::kIndexOutOfRange);
}

TEST(InitCenterTest, Examples) {
  const PwaNetwork id = IdentityNet(2);
  EXPECT_EQ(InitCenter(id, Matrix{{0, 0}, {2, 2}}), (Vector{1, 1}));
  Rng rng(3);
  const PwaNetwork net = RandomNet(rng, 3, {4, 2});
  const Matrix one{{0.3, -1.0, 2.0}};
  EXPECT_EQ(InitCenter(net, one), Evaluate(net, one.row(0)));
  const Matrix data = testing::RandomMatrix(rng, 17, 3, -2, 2);
  Vector sum(2, 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    Axpy(1.0, Evaluate(net, data.row(i)), sum);
  }
  const Vector c = InitCenter(net, data);
  for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(c[j], sum[j] / 17, 1e-12);
}

TEST(SvddLossTest, Examples) {
  Rng rng(5);
  PwaNetwork net = RandomNet(rng, 2, {3, 2});
  const PwaNetwork zero =
      net.WithWeights({Matrix(3, 2, 0.0), Matrix(2, 3, 0.0)});
  EXPECT_EQ(SvddLoss(zero, Matrix{{1, 2}, {3, 4}}, Vector{0, 0}, 0.0), 0.0);
  EXPECT_EQ(SvddLoss(IdentityNet(2), Matrix{{1, 0}}, Vector{0, 0}, 0.0), 1.0);

  const Matrix data = testing::RandomMatrix(rng, 11, 2, -3, 3);
  const Vector center = RandomVector(rng, 2, -1, 1);
  const double lambda = 0.3;
  double expected = 0.0;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const Vector d = Subtract(Evaluate(net, data.row(i)), center);
    expected += Dot(d, d) / 11.0;
  }
  for (const Layer& layer : net.layers()) {
    for (double w : layer.weights.data()) expected += lambda / 2 * w * w;
  }
  EXPECT_NEAR(SvddLoss(net, data, center, lambda), expected, 1e-12);
}

TEST(QuantileLossTest, SinglePairExample) {
  // Radii 1..20 shuffled; q = 18 picks r_(17) and r_(19).
  Vector r(20);
  for (int i = 0; i < 20; ++i) r[i] = (i * 7) % 20 + 1;
  QuantileParams p;
  p.k = 1;
  EXPECT_DOUBLE_EQ(QuantileLoss(IdentityNet(1), Column(r), Vector{0}, p),
                   5 * 17.0 - 19.0);
}

TEST(QuantileLossTest, EqualRadii) {
  QuantileParams p;
  const Matrix data = Column(Vector(60, -2.5));
  EXPECT_DOUBLE_EQ(QuantileLoss(IdentityNet(1), data, Vector{0}, p),
                   2.5 * (75 - 15));
}

TEST(QuantileLossTest, MatchesFullSort) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    QuantileParams p;
    p.epsilon = rng.Uniform(0.15, 0.5);
    p.k = 1 + static_cast<int>(rng.UniformIndex(4));
    p.a = RandomVector(rng, p.k, 0, 3);
    p.b = RandomVector(rng, p.k, 0, 3);
    const Vector values = RandomVector(rng, 40, -10, 10);
    Vector sorted = values;
    for (double& v : sorted) v = std::abs(v);
    std::sort(sorted.begin(), sorted.end());
    const auto q = static_cast<std::size_t>(std::floor((1 - p.epsilon) * 40));
    double expected = 0.0;
    for (int i = 1; i <= p.k; ++i) {
      expected +=
          p.a[i - 1] * sorted[q - i - 1] - p.b[i - 1] * sorted[q + i - 1];
    }
    EXPECT_NEAR(QuantileLoss(IdentityNet(1), Column(values), Vector{0}, p),
                expected, 1e-12);
  }
}

TEST(LossGradientTest, ZeroNetworkHasZeroGradient) {
  Rng rng(1);
  const PwaNetwork net = RandomNet(rng, 3, {4, 2});
  const PwaNetwork zero =
      net.WithWeights({Matrix(4, 3, 0.0), Matrix(2, 4, 0.0)});
  TrainConfig cfg;
  cfg.loss = LossKind::kSvdd;
  cfg.weight_decay = 0.0;
  const Matrix data = testing::RandomMatrix(rng, 10, 3, -1, 1);
  for (const Matrix& g : LossGradient(zero, data, Vector{0, 0}, cfg)) {
    EXPECT_EQ(MaxAbs(g.data()), 0.0);
  }
}

TEST(LossGradientTest, WeightDecayAddsLambdaW) {
  Rng rng(2);
  const PwaNetwork net = RandomNet(rng, 3, {5, 2});
  const Matrix data = testing::RandomMatrix(rng, 10, 3, -1, 1);
  const Vector center = InitCenter(net, data);
  TrainConfig cfg;
  cfg.loss = LossKind::kSvdd;
  cfg.weight_decay = 0.0;
  const auto g0 = LossGradient(net, data, center, cfg);
  cfg.weight_decay = 0.25;
  const auto g1 = LossGradient(net, data, center, cfg);
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const auto& w = net.layer(l).weights.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      EXPECT_NEAR(g1[l].data()[i] - g0[l].data()[i], 0.25 * w[i], 1e-12);
    }
  }
}

TEST(LossGradientTest, SvddMatchesFiniteDifferences) {
  EXPECT_LE(WorstGradientError(LossKind::kSvdd, 20, 21), 1e-4);
}

TEST(LossGradientTest, QuantileMatchesFiniteDifferences) {
  EXPECT_LE(WorstGradientError(LossKind::kQuantile, 20, 22), 1e-4);
}

TEST(CalibrateRadiusTest, OrderStatistics) {
  Rng rng(4);
  const PwaNetwork net = RandomNet(rng, 4, {8, 3});
  const Matrix data = testing::RandomMatrix(rng, 250, 4, -1, 1);
  const Vector center = InitCenter(net, data);
  Vector r = Radii(net, data, center);
  std::sort(r.begin(), r.end());
  EXPECT_EQ(CalibrateRadius(net, center, data, 1.0), r.back());
  EXPECT_EQ(CalibrateRadius(net, center, data, 0.9), r[224]);
  double prev = 0.0;
  for (double q : {0.05, 0.3, 0.31, 0.5, 0.77, 0.9, 1.0}) {
    const double radius = CalibrateRadius(net, center, data, q);
    EXPECT_GE(radius, prev);
    prev = radius;
    std::size_t members = 0;
    for (std::size_t i = 0; i < data.rows(); ++i) {
      members += IsMember(net, center, radius, NormKind::kL2, data.row(i));
    }
    EXPECT_EQ(members, static_cast<std::size_t>(std::ceil(q * 250 - 1e-9)));
  }
}

TEST(CalibrateRadiusTest, ScalesWithFirstLayer) {
  Rng rng(6);
  const PwaNetwork net = RandomNet(rng, 3, {4, 3}, PwaActivation::Identity());
  const Matrix data = testing::RandomMatrix(rng, 50, 3, -1, 1);
  const Vector zero(3, 0.0);
  const double t = 2.5;
  Matrix w1 = net.layer(0).weights;
  for (double& w : w1.data()) w *= t;
  const PwaNetwork scaled = net.WithWeights({w1, net.layer(1).weights});
  const double r = CalibrateRadius(net, zero, data, 0.8);
  const double rs = CalibrateRadius(scaled, zero, data, 0.8);
  EXPECT_NEAR(rs, t * r, 1e-12 * rs);
  Rng probe(7);
  for (int i = 0; i < 200; ++i) {
    const Vector c = RandomVector(probe, 3, -1.5, 1.5);
    if (std::abs(RadiusOf(net, zero, NormKind::kL2, c) - r) < 1e-9) continue;
    EXPECT_EQ(IsMember(net, zero, r, NormKind::kL2, c),
              IsMember(scaled, zero, rs, NormKind::kL2, c));
  }
}

Matrix TwoClusters(std::uint64_t seed) {
  DatasetSpec spec;
  spec.family = DataFamily::kMixedGaussian;
  spec.dim = 2;
  spec.train_size = 200;
  spec.test_size = 1;
  spec.seed = seed;
  return Generate(spec).train;
}

TEST(TrainTest, ZeroEpochsKeepsInitialNetwork) {
  const Matrix data = TwoClusters(1);
  TrainConfig cfg;
  cfg.epochs = 0;
  cfg.seed = 12;
  const TrainedModel m = Train(data, DefaultArchitecture(), cfg);
  EXPECT_EQ(m.set.center, InitCenter(m.set.network, data));
  EXPECT_EQ(m.final_loss, Loss(m.set.network, data, m.set.center, cfg));
  EXPECT_EQ(m.restart_losses.size(), 3u);
  EXPECT_EQ(m.final_loss, *std::min_element(m.restart_losses.begin(),
                                            m.restart_losses.end()));
  EXPECT_FALSE(m.set.network.has_bias());
}

TEST(TrainTest, QuantileLossDecreases) {
  int improved = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Matrix data = TwoClusters(seed);
    TrainConfig cfg;
    cfg.restarts = 1;
    cfg.seed = seed;
    cfg.epochs = 0;
    const double before = Train(data, DefaultArchitecture(), cfg).final_loss;
    cfg.epochs = 300;
    const double after = Train(data, DefaultArchitecture(), cfg).final_loss;
    improved += after <= before;
  }
  EXPECT_GE(improved, 9);
}

TEST(TrainTest, Deterministic) {
  const Matrix data = TwoClusters(3);
  TrainConfig cfg;
  cfg.epochs = 50;
  cfg.seed = 99;
  const TrainedModel a = Train(data, DefaultArchitecture(), cfg);
  const TrainedModel b = Train(data, DefaultArchitecture(), cfg);
  EXPECT_EQ(a.set.network, b.set.network);
  EXPECT_EQ(a.set.center, b.set.center);
  EXPECT_EQ(a.set.radius, b.set.radius);
  EXPECT_EQ(a.restart_losses, b.restart_losses);
}

TEST(TrainTest, Errors) {
  EXPECT_EQ(ThrownCode([] {
              Train(Matrix(40, 2, 7.0), DefaultArchitecture(), TrainConfig{});
            }),
            ErrorCode::kDegenerateData);
  EXPECT_EQ(ThrownCode([] {
              Train(Matrix{{1, 2}, {3, 4}}, DefaultArchitecture(),
                    TrainConfig{});
            }),
            ErrorCode::kIndexOutOfRange);
}

TEST(ModelIoTest, RoundTrip) {
  const Matrix data = TwoClusters(2);
  TrainConfig cfg;
  cfg.epochs = 5;
  const TrainedModel m = Train(data, DefaultArchitecture(), cfg);
  std::stringstream s;
  WriteModel(s, m.set);
  const NetworkSet back = ReadModel(s);
  EXPECT_EQ(back.network, m.set.network);
  EXPECT_EQ(back.center, m.set.center);
  EXPECT_EQ(back.radius, m.set.radius);
  EXPECT_EQ(back.norm, m.set.norm);
  std::stringstream bad("pwanet v1 2 1\nnonsense\n");
  EXPECT_EQ(ThrownCode([&] { ReadModel(bad); }), ErrorCode::kParseError);
}

}  // namespace
}  // namespace uncset
