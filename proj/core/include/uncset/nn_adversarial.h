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

#ifndef UNCSET_NN_ADVERSARIAL_H_
#define UNCSET_NN_ADVERSARIAL_H_

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "uncset/lp.h"
#include "uncset/numlin.h"
#include "uncset/pwa_network.h"
#include "uncset/uncertainty_set.h"

namespace uncset {

struct Box {
  Vector lower;
  Vector upper;

  bool Contains(std::span<const double> c, double tol) const;
};

// Componentwise range of the rows widened by `inflate` times its width
// (half on each side). Zero-width coordinates get `inflate` on each side.
Box DataBox(const Matrix& data, double inflate = 0.5);

struct RegionSolveOptions {
  // Stop cutting once ||f(c) - center|| exceeds the radius by at most this.
  double cut_tol = 1e-7;
  int max_cuts = 500;
  LpOptions lp;
};

struct RegionOptimum {
  enum class Status { kOptimal, kInfeasible, kPruned };
  Status status = Status::kInfeasible;
  Vector c;
  double value = -std::numeric_limits<double>::infinity();
  int cuts = 0;
};

// max x^T c over the region, the box and the norm ball around the center.
// l1 is an exact LP; l2 uses gradient cuts. If an LP relaxation value drops
// below `prune_below` the region is abandoned as kPruned. Throws kCutLimit.
RegionOptimum MaximizeOverRegion(
    std::span<const double> x, const AffineRegion& region,
    const NetworkSet& set, const Box& box,
    const RegionSolveOptions& options = {},
    double prune_below = -std::numeric_limits<double>::infinity());

// Sorted, deduplicated patterns of the rows of `data`.
std::vector<ActivationPattern> CollectPatterns(const PwaNetwork& net,
                                               const Matrix& data);

struct DecomposedOptions {
  RegionSolveOptions region;
  // Regions per batch; the incumbent used for pruning is frozen per batch so
  // results do not depend on the thread count.
  std::size_t batch_size = 16;
  int threads = 0;  // 0 = ConfiguredThreads()
};

// Best region optimum over the given patterns. Equal values (within 1e-9
// relative) go to the smallest pattern.
AdversarialResult AdversarialDecomposed(
    std::span<const double> x, const NetworkSet& set, const Box& box,
    const std::vector<ActivationPattern>& patterns,
    const DecomposedOptions& options = {});

// Upper limit on enumerated patterns for the exact solver.
inline constexpr std::uint64_t kExactPatternLimit = 1000000;

// Global maximum by depth-first search over neuron pieces with LP bounds.
// Throws kTooLarge when min(prod_l k_l^d_l, RegionCountBound) exceeds the
// limit.
AdversarialResult AdversarialExact(std::span<const double> x,
                                   const NetworkSet& set, const Box& box,
                                   const RegionSolveOptions& options = {});

enum class NnOracle { kDecomposed, kExact };

class NnUncertaintySet : public UncertaintySet {
 public:
  // Patterns are collected from `data`; the box defaults to DataBox(data).
  NnUncertaintySet(NetworkSet set, const Matrix& data,
                   NnOracle oracle = NnOracle::kDecomposed);
  NnUncertaintySet(NetworkSet set, Box box,
                   std::vector<ActivationPattern> patterns, Vector seed,
                   NnOracle oracle);

  std::size_t dim() const override { return set_.network.input_dim(); }
  AdversarialResult Adversarial(std::span<const double> x) const override;
  bool Contains(std::span<const double> c, double tol) const override;
  // Training point with the smallest radius among those in the set; the
  // training mean if none is.
  Vector SeedScenario() const override { return seed_; }

  const NetworkSet& set() const { return set_; }
  const Box& box() const { return box_; }
  const std::vector<ActivationPattern>& patterns() const { return patterns_; }
  DecomposedOptions& options() { return options_; }

 private:
  NetworkSet set_;
  Box box_;
  std::vector<ActivationPattern> patterns_;
  Vector seed_;
  NnOracle oracle_;
  DecomposedOptions options_;
};

}  // namespace uncset

#endif  // UNCSET_NN_ADVERSARIAL_H_
