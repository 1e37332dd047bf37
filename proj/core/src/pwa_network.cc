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

#include "uncset/pwa_network.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "uncset/error.h"
#include "uncset/text_io.h"

namespace uncset {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kContinuityTol = 1e-9;

}  // namespace

PwaActivation::PwaActivation(std::vector<Piece> pieces,
                             std::vector<double> breakpoints)
    : pieces_(std::move(pieces)), breakpoints_(std::move(breakpoints)) {
  if (pieces_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "activation needs a piece");
  }
  if (breakpoints_.size() + 1 != pieces_.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "activation with " + std::to_string(pieces_.size()) +
                    " pieces needs " + std::to_string(pieces_.size() - 1) +
                    " breakpoints");
  }
  for (const Piece& p : pieces_) {
    if (!std::isfinite(p.slope) || !std::isfinite(p.intercept)) {
      throw Error(ErrorCode::kInvalidArgument, "non-finite activation piece");
    }
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    const double beta = breakpoints_[i];
    if (!std::isfinite(beta)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "interior breakpoint not finite");
    }
    if (i > 0 && !(breakpoints_[i - 1] < beta)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "breakpoints must be strictly increasing");
    }
    const double left = pieces_[i].slope * beta + pieces_[i].intercept;
    const double right = pieces_[i + 1].slope * beta + pieces_[i + 1].intercept;
    if (std::abs(left - right) > kContinuityTol) {
      throw Error(ErrorCode::kDiscontinuousActivation,
                  "jump of " + FormatDouble(right - left) + " at breakpoint " +
                      FormatDouble(beta));
    }
  }
}

PwaActivation PwaActivation::Identity() {
  return PwaActivation({{1.0, 0.0}}, {});
}

PwaActivation PwaActivation::Relu() {
  return PwaActivation({{0.0, 0.0}, {1.0, 0.0}}, {0.0});
}

PwaActivation PwaActivation::BinaryHat() {
  return PwaActivation({{-1.0, 0.0}, {1.0, 0.0}, {-1.0, 1.0}, {1.0, -1.0}},
                       {0.0, 0.5, 1.0});
}

double PwaActivation::lower(int i) const {
  return i == 0 ? -kInf : breakpoints_[i - 1];
}

double PwaActivation::upper(int i) const {
  return i + 1 == num_pieces() ? kInf : breakpoints_[i];
}

int PwaActivation::PieceOf(double w) const {
  return static_cast<int>(
      std::upper_bound(breakpoints_.begin(), breakpoints_.end(), w) -
      breakpoints_.begin());
}

double PwaActivation::Apply(double w) const {
  const Piece& p = pieces_[PieceOf(w)];
  return p.slope * w + p.intercept;
}

PwaNetwork::PwaNetwork(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "network needs at least one layer");
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    if (layer.weights.empty()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "layer " + std::to_string(l) + " has an empty weight matrix");
    }
    if (l > 0 && layer.weights.cols() != layers_[l - 1].weights.rows()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "layer " + std::to_string(l) + " expects " +
                      std::to_string(layer.weights.cols()) +
                      " inputs, previous layer has " +
                      std::to_string(layers_[l - 1].weights.rows()));
    }
    if (layer.bias && layer.bias->size() != layer.weights.rows()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "bias of layer " + std::to_string(l) + " has wrong size");
    }
  }
}

bool PwaNetwork::has_bias() const {
  return std::any_of(layers_.begin(), layers_.end(),
                     [](const Layer& l) { return l.bias.has_value(); });
}

std::size_t PwaNetwork::num_neurons() const {
  std::size_t n = 0;
  for (const Layer& l : layers_) n += l.weights.rows();
  return n;
}

PwaNetwork PwaNetwork::WithWeights(std::vector<Matrix> weights) const {
  if (weights.size() != layers_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "wrong number of weight matrices");
  }
  std::vector<Layer> layers = layers_;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    if (weights[l].rows() != layers[l].weights.rows() ||
        weights[l].cols() != layers[l].weights.cols()) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "replacement weights of layer " + std::to_string(l) +
                      " have the wrong shape");
    }
    layers[l].weights = std::move(weights[l]);
  }
  return PwaNetwork(std::move(layers));
}

namespace {

void CheckInput(const PwaNetwork& net, std::span<const double> c) {
  if (c.size() != net.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "network expects " + std::to_string(net.input_dim()) +
                    " inputs, got " + std::to_string(c.size()));
  }
}

Vector Preactivate(const Layer& layer, std::span<const double> y) {
  Vector w = MatVec(layer.weights, y);
  if (layer.bias) Axpy(1.0, *layer.bias, w);
  return w;
}

}  // namespace

ForwardResult Forward(const PwaNetwork& net, std::span<const double> c) {
  CheckInput(net, c);
  ForwardResult result;
  result.preactivations.reserve(net.depth());
  Vector y(c.begin(), c.end());
  for (const Layer& layer : net.layers()) {
    Vector w = Preactivate(layer, y);
    y.resize(w.size());
    for (std::size_t j = 0; j < w.size(); ++j)
      y[j] = layer.activation.Apply(w[j]);
    result.preactivations.push_back(std::move(w));
  }
  result.output = std::move(y);
  return result;
}

Vector Evaluate(const PwaNetwork& net, std::span<const double> c) {
  CheckInput(net, c);
  Vector y(c.begin(), c.end());
  for (const Layer& layer : net.layers()) {
    Vector w = Preactivate(layer, y);
    for (double& v : w) v = layer.activation.Apply(v);
    y = std::move(w);
  }
  return y;
}

std::string PatternToString(const ActivationPattern& pattern) {
  std::string s;
  for (std::size_t l = 0; l < pattern.pieces.size(); ++l) {
    if (l > 0) s += '|';
    for (int p : pattern.pieces[l]) s += std::to_string(p);
  }
  return s;
}

ActivationPattern PatternOf(const PwaNetwork& net, std::span<const double> c) {
  const ForwardResult fwd = Forward(net, c);
  ActivationPattern pattern;
  pattern.pieces.resize(net.depth());
  for (std::size_t l = 0; l < net.depth(); ++l) {
    const PwaActivation& act = net.layer(l).activation;
    auto& pieces = pattern.pieces[l];
    pieces.reserve(fwd.preactivations[l].size());
    for (double w : fwd.preactivations[l]) pieces.push_back(act.PieceOf(w));
  }
  return pattern;
}

Vector AffineRegion::Apply(std::span<const double> c) const {
  Vector out = MatVec(output_map(), c);
  Axpy(1.0, output_offset(), out);
  return out;
}

double AffineRegion::MaxViolation(std::span<const double> c) const {
  double worst = -kInf;
  for (const LinearRow& row : rows) {
    worst = std::max(worst, Dot(row.coeffs, c) - row.rhs);
  }
  return worst;
}

AffineRegion PartialRegionOf(const PwaNetwork& net,
                             const ActivationPattern& prefix) {
  const std::size_t depth = net.depth();
  const std::size_t fixed = prefix.pieces.size();
  if (fixed > depth) {
    throw Error(ErrorCode::kInvalidArgument, "pattern has too many layers");
  }
  AffineRegion region;
  region.pattern = prefix;
  const std::size_t n = net.input_dim();

  Matrix map = net.layer(0).weights;
  Vector offset = net.layer(0).bias.value_or(Vector(map.rows(), 0.0));
  for (std::size_t l = 0; l < fixed; ++l) {
    const Layer& layer = net.layer(l);
    const PwaActivation& act = layer.activation;
    const auto& pieces = prefix.pieces[l];
    if (pieces.size() != layer.weights.rows()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "pattern layer " + std::to_string(l) + " has " +
                      std::to_string(pieces.size()) + " entries, expected " +
                      std::to_string(layer.weights.rows()));
    }
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      const int p = pieces[j];
      if (p < 0 || p >= act.num_pieces()) {
        throw Error(ErrorCode::kInvalidArgument, "piece index out of range");
      }
      const double lo = act.lower(p);
      const double hi = act.upper(p);
      if (std::isfinite(lo)) {
        LinearRow row{Vector(n), offset[j] - lo, l, j, false};
        for (std::size_t k = 0; k < n; ++k) row.coeffs[k] = -map(j, k);
        region.rows.push_back(std::move(row));
      }
      if (std::isfinite(hi)) {
        auto r = map.row(j);
        region.rows.push_back(
            LinearRow{Vector(r.begin(), r.end()), hi - offset[j], l, j, true});
      }
    }
    region.maps.push_back(map);
    region.offsets.push_back(offset);

    // Post-activation affine map of this layer.
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      const double slope = act.slope(pieces[j]);
      for (double& v : map.row(j)) v *= slope;
      offset[j] = slope * offset[j] + act.intercept(pieces[j]);
    }
    if (l + 1 < depth) {
      const Layer& next = net.layer(l + 1);
      Vector next_offset = MatVec(next.weights, offset);
      if (next.bias) Axpy(1.0, *next.bias, next_offset);
      map = Multiply(next.weights, map);
      offset = std::move(next_offset);
    }
  }
  region.maps.push_back(std::move(map));
  region.offsets.push_back(std::move(offset));
  return region;
}

AffineRegion RegionOf(const PwaNetwork& net, const ActivationPattern& pattern) {
  if (pattern.pieces.size() != net.depth()) {
    throw Error(ErrorCode::kInvalidArgument,
                "pattern covers " + std::to_string(pattern.pieces.size()) +
                    " layers, network has " + std::to_string(net.depth()));
  }
  return PartialRegionOf(net, pattern);
}

double RadiusOf(const PwaNetwork& net, std::span<const double> center,
                NormKind norm, std::span<const double> c) {
  const Vector out = Evaluate(net, c);
  return Norm(Subtract(out, center), norm);
}

bool IsMember(const PwaNetwork& net, std::span<const double> center,
              double radius, NormKind norm, std::span<const double> c) {
  if (center.size() != net.output_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "center has wrong dimension");
  }
  return RadiusOf(net, center, norm, c) <= radius + 1e-12;
}

NetworkSet EncodeEllipsoid(const Matrix& sigma, std::span<const double> a) {
  const std::size_t n = sigma.rows();
  if (a.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "ellipsoid center mismatch");
  }
  const Matrix l = Cholesky(sigma);
  Vector shift(a.size());
  for (std::size_t i = 0; i < n; ++i) shift[i] = -a[i];
  std::vector<Layer> layers;
  layers.push_back(
      Layer{Matrix::Identity(n), shift, PwaActivation::Identity()});
  layers.push_back(
      Layer{l.Transposed(), std::nullopt, PwaActivation::Identity()});
  return NetworkSet{PwaNetwork(std::move(layers)), Vector(n, 0.0), 1.0,
                    NormKind::kL2};
}

NetworkSet EncodePolyhedron(const Matrix& a, std::span<const double> b,
                            std::size_t input_dim) {
  if (a.rows() != b.size() || (a.rows() > 0 && a.cols() != input_dim)) {
    throw Error(ErrorCode::kDimensionMismatch, "polyhedron shape mismatch");
  }
  std::vector<Layer> layers;
  if (a.rows() == 0) {
    // No constraints: a single always-zero neuron keeps the network valid.
    layers.push_back(
        Layer{Matrix(1, input_dim), std::nullopt, PwaActivation::Relu()});
  } else {
    Vector shift(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) shift[i] = -b[i];
    layers.push_back(Layer{a, shift, PwaActivation::Relu()});
  }
  const std::size_t out = layers.front().weights.rows();
  return NetworkSet{PwaNetwork(std::move(layers)), Vector(out, 0.0), 0.0,
                    NormKind::kL2};
}

NetworkSet EncodeBinaryAffine(const Matrix& a, std::span<const double> b,
                              std::size_t input_dim) {
  if (a.rows() != b.size() || (a.rows() > 0 && a.cols() != input_dim)) {
    throw Error(ErrorCode::kDimensionMismatch, "binary system shape mismatch");
  }
  const std::size_t p = a.rows();
  Matrix w(input_dim + 2 * p, input_dim);
  Vector bias(input_dim + 2 * p, 0.0);
  for (std::size_t i = 0; i < input_dim; ++i) w(i, i) = 1.0;
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t k = 0; k < input_dim; ++k) {
      w(input_dim + r, k) = a(r, k);
      w(input_dim + p + r, k) = a(r, k);
    }
    bias[input_dim + r] = -b[r];
    bias[input_dim + p + r] = -b[r] + 1.0;
  }
  std::vector<Layer> layers;
  layers.push_back(
      Layer{std::move(w), std::move(bias), PwaActivation::BinaryHat()});
  return NetworkSet{PwaNetwork(std::move(layers)),
                    Vector(input_dim + 2 * p, 0.0), 0.0, NormKind::kL2};
}

std::uint64_t RegionCountBound(const PwaNetwork& net) {
  std::uint64_t d = 0;
  std::uint64_t k = 0;
  for (const Layer& layer : net.layers()) {
    d = std::max<std::uint64_t>(d, layer.weights.rows());
    k = std::max<std::uint64_t>(k, layer.activation.num_pieces());
  }
  const std::uint64_t base = d * (k - 1);
  if (base == 0) return 1;
  const std::uint64_t exponent = net.input_dim() * net.depth();
  std::uint64_t result = 1;
  for (std::uint64_t e = 0; e < exponent; ++e) {
    if (result > kRegionBoundCap / base) return kRegionBoundCap;
    result *= base;
  }
  return result;
}

void WriteNetwork(std::ostream& out, const PwaNetwork& net) {
  out << "pwanet v1 " << net.input_dim() << ' ' << net.depth() << '\n';
  for (const Layer& layer : net.layers()) {
    const Matrix& w = layer.weights;
    out << "layer " << w.rows() << ' ' << w.cols() << ' '
        << (layer.bias ? 1 : 0) << '\n';
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < w.cols(); ++j) {
        if (j > 0) out << ' ';
        out << FormatDouble(w(i, j));
      }
      out << '\n';
    }
    if (layer.bias) {
      for (std::size_t i = 0; i < layer.bias->size(); ++i) {
        if (i > 0) out << ' ';
        out << FormatDouble((*layer.bias)[i]);
      }
      out << '\n';
    }
    const PwaActivation& act = layer.activation;
    out << "act " << act.num_pieces() << '\n';
    for (int i = 0; i < act.num_pieces(); ++i) {
      out << FormatDouble(act.slope(i)) << ' ' << FormatDouble(act.intercept(i))
          << ' ' << FormatDouble(act.upper(i)) << '\n';
    }
  }
}

PwaNetwork ReadNetwork(std::istream& in) {
  TokenReader reader(in);
  reader.Expect("pwanet");
  reader.Expect("v1");
  const std::int64_t n = reader.NextInt();
  const std::int64_t depth = reader.NextInt();
  if (n <= 0 || depth <= 0) {
    throw Error(ErrorCode::kParseError, "bad network header");
  }
  std::vector<Layer> layers;
  for (std::int64_t l = 0; l < depth; ++l) {
    reader.Expect("layer");
    const std::int64_t rows = reader.NextInt();
    const std::int64_t cols = reader.NextInt();
    const std::int64_t has_bias = reader.NextInt();
    if (rows <= 0 || cols <= 0 || (has_bias != 0 && has_bias != 1)) {
      throw Error(ErrorCode::kParseError, "bad layer header");
    }
    std::vector<double> data(static_cast<std::size_t>(rows * cols));
    for (double& v : data) v = reader.NextDouble();
    Layer layer{Matrix(rows, cols, std::move(data)), std::nullopt,
                PwaActivation::Identity()};
    if (has_bias == 1) {
      Vector bias(static_cast<std::size_t>(rows));
      for (double& v : bias) v = reader.NextDouble();
      layer.bias = std::move(bias);
    }
    reader.Expect("act");
    const std::int64_t k = reader.NextInt();
    if (k <= 0) throw Error(ErrorCode::kParseError, "bad piece count");
    std::vector<PwaActivation::Piece> pieces;
    std::vector<double> breakpoints;
    for (std::int64_t i = 0; i < k; ++i) {
      const double slope = reader.NextDouble();
      const double intercept = reader.NextDouble();
      const double upper = reader.NextDouble();
      pieces.push_back({slope, intercept});
      if (i + 1 < k) {
        breakpoints.push_back(upper);
      } else if (!std::isinf(upper) || upper < 0) {
        throw Error(ErrorCode::kParseError, "last piece must end at inf");
      }
    }
    layer.activation = PwaActivation(std::move(pieces), std::move(breakpoints));
    layers.push_back(std::move(layer));
  }
  PwaNetwork net(std::move(layers));
  if (static_cast<std::int64_t>(net.input_dim()) != n) {
    throw Error(ErrorCode::kParseError, "header input dimension disagrees");
  }
  return net;
}

}  // namespace uncset
