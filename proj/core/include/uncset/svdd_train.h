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

#ifndef UNCSET_SVDD_TRAIN_H_
#define UNCSET_SVDD_TRAIN_H_

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "uncset/numlin.h"
#include "uncset/pwa_network.h"

namespace uncset {

enum class LossKind { kSvdd, kQuantile };

// Quantile loss  sum_i a_i r_(q-i) - sum_i b_i r_(q+i)  with q =
// floor((1-epsilon) m) and r_(j) the j-th smallest training radius.
struct QuantileParams {
  double epsilon = 0.1;
  int k = 5;
  // Empty vectors mean a_i = 5 i and b_i = i.
  Vector a;
  Vector b;

  Vector CoefficientsA() const;
  Vector CoefficientsB() const;
  // 1-based order-statistic index q for a sample of size m. Throws
  // kIndexOutOfRange when q - k < 1 or q + k > m.
  std::size_t QuantileIndex(std::size_t m) const;
};

struct TrainConfig {
  int epochs = 1000;
  double learning_rate = 1e-6;
  double weight_decay = 1e-6;
  // The quantile loss ignores weight_decay unless this is set.
  bool regularize_quantile = false;
  LossKind loss = LossKind::kQuantile;
  QuantileParams quantile;
  int restarts = 3;
  std::uint64_t seed = 0;
  // Quantile of the training radii used for the returned set.
  double radius_quantile = 0.9;
};

// Hidden widths plus the output width, and one activation per layer.
struct Architecture {
  std::vector<std::size_t> widths;
  std::vector<PwaActivation> activations;
};

// N x 50, 50 x 50, 50 x 50 with ReLU, ReLU, identity.
Architecture DefaultArchitecture();

struct TrainedModel {
  NetworkSet set;
  double final_loss = 0.0;
  Vector restart_losses;
};

// Bias-free network with weights uniform in +-1/sqrt(fan_in).
PwaNetwork InitNetwork(std::size_t input_dim, const Architecture& arch,
                       Rng& rng);

Vector InitCenter(const PwaNetwork& net, const Matrix& data);
// ||f(c^i) - center||_2 for every row.
Vector Radii(const PwaNetwork& net, const Matrix& data,
             std::span<const double> center);

double SvddLoss(const PwaNetwork& net, const Matrix& data,
                std::span<const double> center, double lambda);
double QuantileLoss(const PwaNetwork& net, const Matrix& data,
                    std::span<const double> center,
                    const QuantileParams& params);
// The loss selected by cfg (including the optional regularizer).
double Loss(const PwaNetwork& net, const Matrix& data,
            std::span<const double> center, const TrainConfig& cfg);

// d Loss / d W^l for every layer. At breakpoints the piece chosen by
// PatternOf supplies the derivative.
std::vector<Matrix> LossGradient(const PwaNetwork& net, const Matrix& data,
                                 std::span<const double> center,
                                 const TrainConfig& cfg);

// Throws kDegenerateData when all rows coincide and kNoConvergence when
// every restart diverged.
TrainedModel Train(const Matrix& data, const Architecture& arch,
                   const TrainConfig& cfg);

// ceil(q m)-th smallest training radius.
double CalibrateRadius(const PwaNetwork& net, std::span<const double> center,
                       const Matrix& data, double q);

// Network format followed by "center", "radius" and "norm" lines.
void WriteModel(std::ostream& out, const NetworkSet& set);
NetworkSet ReadModel(std::istream& in);

}  // namespace uncset

#endif  // UNCSET_SVDD_TRAIN_H_
