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

#ifndef UNCSET_PWA_NETWORK_H_
#define UNCSET_PWA_NETWORK_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uncset/numlin.h"

namespace uncset {

// Continuous piecewise-affine scalar activation. Piece i applies
// slope(i) * w + intercept(i) on [lower(i), upper(i)); the first piece starts
// at -inf and the last one ends at +inf.
class PwaActivation {
 public:
  struct Piece {
    double slope = 0.0;
    double intercept = 0.0;

    bool operator==(const Piece& other) const = default;
  };

  // `breakpoints` holds the k-1 interior breakpoints. Throws
  // kInvalidArgument for non-increasing breakpoints and
  // kDiscontinuousActivation when adjacent pieces disagree by more than 1e-9
  // at a breakpoint.
  PwaActivation(std::vector<Piece> pieces, std::vector<double> breakpoints);

  static PwaActivation Identity();
  static PwaActivation Relu();
  // The four-piece hat with zeros exactly at 0 and 1.
  static PwaActivation BinaryHat();

  int num_pieces() const { return static_cast<int>(pieces_.size()); }
  const Piece& piece(int i) const { return pieces_[i]; }
  double slope(int i) const { return pieces_[i].slope; }
  double intercept(int i) const { return pieces_[i].intercept; }
  double lower(int i) const;
  double upper(int i) const;
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  // Index of the piece whose half-open interval contains w.
  int PieceOf(double w) const;
  double Apply(double w) const;

  bool operator==(const PwaActivation& other) const = default;

 private:
  std::vector<Piece> pieces_;
  std::vector<double> breakpoints_;
};

struct Layer {
  Matrix weights;  // d_out x d_in
  std::optional<Vector> bias;
  PwaActivation activation = PwaActivation::Identity();

  bool operator==(const Layer& other) const = default;
};

// Feedforward network c -> sigma^L(W^L ... sigma^1(W^1 c + b^1) ... + b^L).
class PwaNetwork {
 public:
  // Throws kDimensionMismatch when layer shapes do not chain.
  explicit PwaNetwork(std::vector<Layer> layers);

  std::size_t input_dim() const { return layers_.front().weights.cols(); }
  std::size_t output_dim() const { return layers_.back().weights.rows(); }
  std::size_t depth() const { return layers_.size(); }
  std::size_t width(std::size_t l) const { return layers_[l].weights.rows(); }
  const Layer& layer(std::size_t l) const { return layers_[l]; }
  const std::vector<Layer>& layers() const { return layers_; }
  bool has_bias() const;
  std::size_t num_neurons() const;

  // Same architecture and activations with replaced weight matrices.
  PwaNetwork WithWeights(std::vector<Matrix> weights) const;

  bool operator==(const PwaNetwork& other) const = default;

 private:
  std::vector<Layer> layers_;
};

struct ForwardResult {
  Vector output;
  // preactivations[l] = W^l y^{l-1} + b^l, before the activation.
  std::vector<Vector> preactivations;
};

ForwardResult Forward(const PwaNetwork& net, std::span<const double> c);
// Output only; cheaper than Forward.
Vector Evaluate(const PwaNetwork& net, std::span<const double> c);

// One piece index (0-based) per neuron, layer by layer. Ordered
// lexicographically.
struct ActivationPattern {
  std::vector<std::vector<int>> pieces;

  auto operator<=>(const ActivationPattern& other) const = default;
  bool operator==(const ActivationPattern& other) const = default;
};

std::string PatternToString(const ActivationPattern& pattern);

ActivationPattern PatternOf(const PwaNetwork& net, std::span<const double> c);

// Half-space coeffsᵀc <= rhs in input space.
struct LinearRow {
  Vector coeffs;
  double rhs = 0.0;
  std::size_t layer = 0;
  std::size_t neuron = 0;
  bool upper = false;  // true for the breakpoint-above row
};

// Inputs realizing a fixed activation pattern, together with the affine map
// the network applies there. Strict upper bounds are relaxed to <=.
struct AffineRegion {
  ActivationPattern pattern;
  // maps[l], offsets[l] give the layer-(l+1) preactivation as
  // maps[l] c + offsets[l]; the last entry is the network output.
  std::vector<Matrix> maps;
  std::vector<Vector> offsets;
  std::vector<LinearRow> rows;

  const Matrix& output_map() const { return maps.back(); }
  const Vector& output_offset() const { return offsets.back(); }
  Vector Apply(std::span<const double> c) const;
  // Largest violation of any row at c (<= 0 means inside).
  double MaxViolation(std::span<const double> c) const;
};

// Throws kInvalidArgument if the pattern shape does not fit the network.
AffineRegion RegionOf(const PwaNetwork& net, const ActivationPattern& pattern);

// Affine maps for layers [0, upto) only: used when a pattern is known for a
// prefix of the layers. Rows are emitted for those layers.
AffineRegion PartialRegionOf(const PwaNetwork& net,
                             const ActivationPattern& prefix);

// A network level set {c : ||f(c) - center||_norm <= radius}.
struct NetworkSet {
  PwaNetwork network;
  Vector center;
  double radius = 0.0;
  NormKind norm = NormKind::kL2;
};

bool IsMember(const PwaNetwork& net, std::span<const double> center,
              double radius, NormKind norm, std::span<const double> c);
inline bool IsMember(const NetworkSet& set, std::span<const double> c) {
  return IsMember(set.network, set.center, set.radius, set.norm, c);
}
// ||f(c) - center||_norm.
double RadiusOf(const PwaNetwork& net, std::span<const double> center,
                NormKind norm, std::span<const double> c);

// {c : (c - a)ᵀ sigma (c - a) <= 1}.
NetworkSet EncodeEllipsoid(const Matrix& sigma, std::span<const double> a);
// {c : A c <= b}.
NetworkSet EncodePolyhedron(const Matrix& a, std::span<const double> b,
                            std::size_t input_dim);
// {c in {0,1}^N : A c = b}.
NetworkSet EncodeBinaryAffine(const Matrix& a, std::span<const double> b,
                              std::size_t input_dim);

// (d (k-1))^(N L) with d the widest layer and k the most pieces; a base of 0
// reports a single region. Saturates at kRegionBoundCap.
inline constexpr std::uint64_t kRegionBoundCap = UINT64_MAX;
std::uint64_t RegionCountBound(const PwaNetwork& net);

// Text format "pwanet v1 N L" ... (see README).
void WriteNetwork(std::ostream& out, const PwaNetwork& net);
PwaNetwork ReadNetwork(std::istream& in);

}  // namespace uncset

#endif  // UNCSET_PWA_NETWORK_H_
