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

#ifndef UNCSET_UNCERTAINTY_SET_H_
#define UNCSET_UNCERTAINTY_SET_H_

#include <cstddef>
#include <span>

#include "uncset/numlin.h"
#include "uncset/pwa_network.h"

namespace uncset {

enum class AdversarialStatus { kOptimal, kEmpty };

struct AdversarialResult {
  AdversarialStatus status = AdversarialStatus::kEmpty;
  Vector scenario;  // maximizer c*
  double value = 0.0;
  // Activation pattern of c* (network sets only).
  ActivationPattern pattern;
  std::size_t subproblems = 0;
  // Regions abandoned after hitting the cut limit.
  std::size_t failed_subproblems = 0;
};

// A set U of scenarios with a separation oracle max_{c in U} x^T c.
class UncertaintySet {
 public:
  virtual ~UncertaintySet() = default;

  virtual std::size_t dim() const = 0;
  virtual AdversarialResult Adversarial(std::span<const double> x) const = 0;
  virtual bool Contains(std::span<const double> c, double tol) const = 0;
  // Scenario used to start the cutting-plane loop.
  virtual Vector SeedScenario() const = 0;
};

}  // namespace uncset

#endif  // UNCSET_UNCERTAINTY_SET_H_
