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
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>

#include "uncset/error.h"
#include "uncset/text_io.h"
#include "uncset/thread_pool.h"

namespace uncset {

Vector QuantileParams::CoefficientsA() const {
  if (!a.empty()) return a;
  Vector out(k);
  for (int i = 0; i < k; ++i) out[i] = 5.0 * (i + 1);
  return out;
}

Vector QuantileParams::CoefficientsB() const {
  if (!b.empty()) return b;
  Vector out(k);
  for (int i = 0; i < k; ++i) out[i] = i + 1.0;
  return out;
}

std::size_t QuantileParams::QuantileIndex(std::size_t m) const {
  if (!(epsilon > 0.0 && epsilon < 1.0) || k < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "quantile loss needs 0 < epsilon < 1 and k >= 1");
  }
  if ((!a.empty() && a.size() != static_cast<std::size_t>(k)) ||
      (!b.empty() && b.size() != static_cast<std::size_t>(k))) {
    throw Error(ErrorCode::kDimensionMismatch, "need k coefficients a and b");
  }
  const auto q = static_cast<std::int64_t>(
      std::floor((1.0 - epsilon) * static_cast<double>(m) + 1e-9));
  if (q - k < 1 || q + k > static_cast<std::int64_t>(m)) {
    throw Error(ErrorCode::kIndexOutOfRange,
                "order statistics " + std::to_string(q - k) + ".." +
                    std::to_string(q + k) +
                    " do not exist for m = " + std::to_string(m));
  }
  return static_cast<std::size_t>(q);
}

Architecture DefaultArchitecture() {
  return Architecture{{50, 50, 50},
                      {PwaActivation::Relu(), PwaActivation::Relu(),
                       PwaActivation::Identity()}};
}

PwaNetwork InitNetwork(std::size_t input_dim, const Architecture& arch,
                       Rng& rng) {
  if (arch.widths.empty() || arch.widths.size() != arch.activations.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "architecture needs one activation per layer");
  }
  std::vector<Layer> layers;
  std::size_t fan_in = input_dim;
  for (std::size_t l = 0; l < arch.widths.size(); ++l) {
    const double s = 1.0 / std::sqrt(static_cast<double>(fan_in));
    Layer layer;
    layer.weights = Matrix(arch.widths[l], fan_in);
    for (double& w : layer.weights.data()) w = rng.Uniform(-s, s);
    layer.activation = arch.activations[l];
    layers.push_back(std::move(layer));
    fan_in = arch.widths[l];
  }
  return PwaNetwork(std::move(layers));
}

Vector InitCenter(const PwaNetwork& net, const Matrix& data) {
  if (data.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "no data for the center");
  }
  Vector center(net.output_dim(), 0.0);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    Axpy(1.0, Evaluate(net, data.row(i)), center);
  }
  for (double& c : center) c /= static_cast<double>(data.rows());
  return center;
}

Vector Radii(const PwaNetwork& net, const Matrix& data,
             std::span<const double> center) {
  Vector r(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    r[i] = RadiusOf(net, center, NormKind::kL2, data.row(i));
  }
  return r;
}

namespace {

double FrobeniusSquared(const PwaNetwork& net) {
  double s = 0.0;
  for (const Layer& layer : net.layers()) {
    for (double w : layer.weights.data()) s += w * w;
  }
  return s;
}

// Row indices ordered by radius; ties by index keep this deterministic.
std::vector<std::size_t> SortedOrder(const Vector& radii) {
  std::vector<std::size_t> order(radii.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(
      order.begin(), order.end(),
      [&](std::size_t x, std::size_t y) { return radii[x] < radii[y]; });
  return order;
}

// dLoss/dr_i for the quantile loss; zero except at the 2k order statistics.
Vector QuantileWeights(const Vector& radii, const QuantileParams& params) {
  const std::size_t q = params.QuantileIndex(radii.size());
  const Vector a = params.CoefficientsA();
  const Vector b = params.CoefficientsB();
  const std::vector<std::size_t> order = SortedOrder(radii);
  Vector w(radii.size(), 0.0);
  for (int i = 1; i <= params.k; ++i) {
    w[order[q - i - 1]] += a[i - 1];
    w[order[q + i - 1]] -= b[i - 1];
  }
  return w;
}

// Adds d(sum_i g_i . f(c^i))/dW to grads, for output-space weights g_i.
void Backpropagate(const PwaNetwork& net, std::span<const double> c,
                   std::span<const double> output_grad,
                   std::vector<Matrix>& grads) {
  const std::size_t depth = net.depth();
  std::vector<Vector> inputs(depth);
  std::vector<Vector> slopes(depth);
  Vector y(c.begin(), c.end());
  for (std::size_t l = 0; l < depth; ++l) {
    const Layer& layer = net.layer(l);
    inputs[l] = y;
    Vector z = MatVec(layer.weights, y);
    if (layer.bias) Axpy(1.0, *layer.bias, z);
    slopes[l].resize(z.size());
    for (std::size_t j = 0; j < z.size(); ++j) {
      const int piece = layer.activation.PieceOf(z[j]);
      slopes[l][j] = layer.activation.slope(piece);
      z[j] = slopes[l][j] * z[j] + layer.activation.intercept(piece);
    }
    y = std::move(z);
  }
  Vector delta(output_grad.begin(), output_grad.end());
  for (std::size_t l = depth; l-- > 0;) {
    for (std::size_t j = 0; j < delta.size(); ++j) delta[j] *= slopes[l][j];
    Matrix& g = grads[l];
    const Vector& in = inputs[l];
    for (std::size_t j = 0; j < delta.size(); ++j) {
      if (delta[j] == 0.0) continue;
      std::span<double> row = g.row(j);
      for (std::size_t t = 0; t < in.size(); ++t) row[t] += delta[j] * in[t];
    }
    if (l > 0) delta = TransposeMatVec(net.layer(l).weights, delta);
  }
}

bool UsesRegularizer(const TrainConfig& cfg) {
  return cfg.loss == LossKind::kSvdd || cfg.regularize_quantile;
}

}  // namespace

double SvddLoss(const PwaNetwork& net, const Matrix& data,
                std::span<const double> center, double lambda) {
  double s = 0.0;
  for (double r : Radii(net, data, center)) s += r * r;
  return s / static_cast<double>(data.rows()) +
         0.5 * lambda * FrobeniusSquared(net);
}

double QuantileLoss(const PwaNetwork& net, const Matrix& data,
                    std::span<const double> center,
                    const QuantileParams& params) {
  const Vector radii = Radii(net, data, center);
  const Vector w = QuantileWeights(radii, params);
  return Dot(w, radii);
}

double Loss(const PwaNetwork& net, const Matrix& data,
            std::span<const double> center, const TrainConfig& cfg) {
  if (cfg.loss == LossKind::kSvdd) {
    return SvddLoss(net, data, center, cfg.weight_decay);
  }
  double loss = QuantileLoss(net, data, center, cfg.quantile);
  if (cfg.regularize_quantile) {
    loss += 0.5 * cfg.weight_decay * FrobeniusSquared(net);
  }
  return loss;
}

std::vector<Matrix> LossGradient(const PwaNetwork& net, const Matrix& data,
                                 std::span<const double> center,
                                 const TrainConfig& cfg) {
  std::vector<Matrix> grads;
  for (const Layer& layer : net.layers()) {
    grads.emplace_back(layer.weights.rows(), layer.weights.cols());
  }
  const std::size_t m = data.rows();
  const std::size_t out_dim = net.output_dim();
  Vector point_weight;  // dLoss/dr_i
  std::vector<Vector> outputs(m);
  for (std::size_t i = 0; i < m; ++i) outputs[i] = Evaluate(net, data.row(i));
  if (cfg.loss == LossKind::kQuantile) {
    Vector radii(m);
    for (std::size_t i = 0; i < m; ++i) {
      radii[i] = Norm(Subtract(outputs[i], center), NormKind::kL2);
    }
    point_weight = QuantileWeights(radii, cfg.quantile);
    for (std::size_t i = 0; i < m; ++i) {
      if (point_weight[i] == 0.0 || radii[i] == 0.0) continue;
      Vector g = Subtract(outputs[i], center);
      for (double& v : g) v *= point_weight[i] / radii[i];
      Backpropagate(net, data.row(i), g, grads);
    }
  } else {
    const double scale = 2.0 / static_cast<double>(m);
    Vector g(out_dim);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < out_dim; ++j) {
        g[j] = scale * (outputs[i][j] - center[j]);
      }
      Backpropagate(net, data.row(i), g, grads);
    }
  }
  if (UsesRegularizer(cfg) && cfg.weight_decay != 0.0) {
    for (std::size_t l = 0; l < grads.size(); ++l) {
      Axpy(cfg.weight_decay, net.layer(l).weights.data(), grads[l].data());
    }
  }
  return grads;
}

namespace {

struct RestartResult {
  PwaNetwork net;
  Vector center;
  double loss;
};

RestartResult RunRestart(const Matrix& data, const Architecture& arch,
                         const TrainConfig& cfg, std::size_t restart) {
  Rng rng = Rng(cfg.seed).Fork(restart);
  PwaNetwork net = InitNetwork(data.cols(), arch, rng);
  const Vector center = InitCenter(net, data);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::vector<Matrix> grads = LossGradient(net, data, center, cfg);
    std::vector<Matrix> weights;
    bool finite = true;
    for (std::size_t l = 0; l < grads.size(); ++l) {
      Matrix w = net.layer(l).weights;
      Axpy(-cfg.learning_rate, grads[l].data(), w.data());
      finite = finite && AllFinite(w.data());
      weights.push_back(std::move(w));
    }
    if (!finite) {
      return {net, center, std::numeric_limits<double>::infinity()};
    }
    net = net.WithWeights(std::move(weights));
  }
  double loss = Loss(net, data, center, cfg);
  if (!std::isfinite(loss)) loss = std::numeric_limits<double>::infinity();
  return {std::move(net), center, loss};
}

}  // namespace

TrainedModel Train(const Matrix& data, const Architecture& arch,
                   const TrainConfig& cfg) {
  if (data.rows() < 2) {
    throw Error(ErrorCode::kDegenerateData, "need at least two scenarios");
  }
  bool all_equal = true;
  for (std::size_t i = 1; i < data.rows() && all_equal; ++i) {
    all_equal =
        std::equal(data.row(i).begin(), data.row(i).end(), data.row(0).begin());
  }
  if (all_equal) {
    throw Error(ErrorCode::kDegenerateData, "all scenarios are identical");
  }
  if (cfg.restarts < 1 || cfg.epochs < 0 || !(cfg.learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "restarts >= 1, epochs >= 0 and a positive learning rate");
  }
  if (cfg.loss == LossKind::kQuantile) cfg.quantile.QuantileIndex(data.rows());

  std::vector<std::optional<RestartResult>> results(cfg.restarts);
  ParallelFor(results.size(), [&](std::size_t r) {
    results[r] = RunRestart(data, arch, cfg, r);
  });
  TrainedModel model{
      NetworkSet{results[0]->net, {}, 0.0, NormKind::kL2}, 0.0, {}};
  std::size_t best = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    model.restart_losses.push_back(results[r]->loss);
    if (results[r]->loss < results[best]->loss) best = r;
  }
  if (!std::isfinite(results[best]->loss)) {
    throw Error(ErrorCode::kNoConvergence, "every training restart diverged");
  }
  model.set.network = results[best]->net;
  model.set.center = results[best]->center;
  model.final_loss = results[best]->loss;
  model.set.radius = CalibrateRadius(model.set.network, model.set.center, data,
                                     cfg.radius_quantile);
  return model;
}

double CalibrateRadius(const PwaNetwork& net, std::span<const double> center,
                       const Matrix& data, double q) {
  if (data.rows() == 0 || !(q > 0.0 && q <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "radius calibration needs data and 0 < q <= 1");
  }
  Vector radii = Radii(net, data, center);
  std::sort(radii.begin(), radii.end());
  const double m = static_cast<double>(radii.size());
  auto index = static_cast<std::size_t>(std::ceil(q * m - 1e-9));
  index = std::clamp<std::size_t>(index, 1, radii.size());
  return radii[index - 1];
}

void WriteModel(std::ostream& out, const NetworkSet& set) {
  WriteNetwork(out, set.network);
  out << "center";
  for (double c : set.center) out << ' ' << FormatDouble(c);
  out << "\nradius " << FormatDouble(set.radius) << "\nnorm "
      << static_cast<int>(set.norm) << '\n';
}

NetworkSet ReadModel(std::istream& in) {
  PwaNetwork net = ReadNetwork(in);
  TokenReader reader(in);
  reader.Expect("center");
  Vector center(net.output_dim());
  for (double& c : center) c = reader.NextDouble();
  reader.Expect("radius");
  const double radius = reader.NextDouble();
  reader.Expect("norm");
  const std::int64_t norm = reader.NextInt();
  if (!(radius >= 0.0) || !std::isfinite(radius) || (norm != 1 && norm != 2) ||
      !AllFinite(center)) {
    throw Error(ErrorCode::kParseError, "bad center, radius or norm in model");
  }
  return NetworkSet{std::move(net), std::move(center), radius,
                    static_cast<NormKind>(norm)};
}

}  // namespace uncset
