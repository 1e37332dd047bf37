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

#ifndef UNCSET_SVC_BASELINE_H_
#define UNCSET_SVC_BASELINE_H_

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "uncset/nn_adversarial.h"
#include "uncset/numlin.h"
#include "uncset/uncertainty_set.h"

namespace uncset {

// Q = L^-1 for the lower Cholesky factor L of the sample covariance plus
// 1e-6 tr/N jitter, so Q Sigma Q^T = I. Throws kDegenerateData when the
// covariance trace is zero.
Matrix WeightingMatrix(const Matrix& data);

// lbar - ||Q (u - v)||_1.
double KernelEval(std::span<const double> u, std::span<const double> v,
                  const Matrix& q, double lbar);

struct SmoOptions {
  double tol = 1e-6;                 // maximal KKT violation at convergence
  std::int64_t max_sweeps = 100000;  // one sweep = m pair updates
  double threshold = 1e-8;           // tau for the SV / BSV index sets
};

struct SvcModel {
  double nu = 0.1;
  Matrix q;
  Matrix data;
  Vector offsets;  // l_i
  double lbar = 0.0;
  Vector alpha;
  std::vector<std::size_t> sv;
  std::vector<std::size_t> bsv;
  double objective = 0.0;
  double kkt_violation = 0.0;
  std::int64_t updates = 0;

  double box_bound() const {
    return 1.0 / (static_cast<double>(data.rows()) * nu);
  }
};

// sum_ij a_i a_j K_ij - sum_i a_i K_ii for the kernel of `model`.
double DualObjective(const SvcModel& model, std::span<const double> alpha);

// Pairwise SMO with maximal violating pairs on the box [0, 1/(m nu)] and
// sum(alpha) = 1. Throws kNoConvergence after max_sweeps.
SvcModel SolveDual(const Matrix& data, const Matrix& q, double nu,
                   const SmoOptions& options = {});

// {c : sum_{i in SV} alpha_i ||Q (c - c^i)||_1 <= theta} intersected with a
// box (and c >= 0 for the nonnegative variant).
class SvcUncertaintySet : public UncertaintySet {
 public:
  SvcUncertaintySet(Matrix q, Matrix sv_points, Vector sv_alpha, double theta,
                    double nu, Box box, Vector seed, bool nonneg = false);

  std::size_t dim() const override { return q_.cols(); }
  AdversarialResult Adversarial(std::span<const double> x) const override;
  bool Contains(std::span<const double> c, double tol) const override;
  Vector SeedScenario() const override { return seed_; }

  // sum_i alpha_i ||Q (c - c^i)||_1.
  double Score(std::span<const double> c) const;
  double theta() const { return theta_; }
  double nu() const { return nu_; }
  const Matrix& q() const { return q_; }
  const Matrix& sv_points() const { return sv_points_; }
  const Vector& sv_alpha() const { return sv_alpha_; }
  const Box& box() const { return box_; }
  bool nonneg() const { return nonneg_; }

 private:
  Matrix q_;
  Matrix sv_points_;
  Vector sv_alpha_;
  double theta_;
  double nu_;
  Box box_;
  Vector seed_;
  bool nonneg_;
};

// theta = min over BSV of the score; throws kEmptyBoundary if BSV is empty.
// The seed scenario is the training mean if it is a member, else the
// support vector with the smallest score.
SvcUncertaintySet BuildSet(const SvcModel& model, const Box& box);
SvcUncertaintySet BuildSet(const SvcModel& model);

// Same set with c >= 0 added.
SvcUncertaintySet NonnegVariant(const SvcUncertaintySet& set);

// "svcmodel v1 N count", then nu, theta, Q and one line per support vector
// (index alpha c_1 .. c_N). The box is not stored.
void WriteSvcModel(std::ostream& out, const SvcModel& model, double theta);
struct SvcModelFile {
  double nu = 0.0;
  double theta = 0.0;
  Matrix q;
  std::vector<std::size_t> indices;
  Vector alpha;
  Matrix points;
};
SvcModelFile ReadSvcModel(std::istream& in);
SvcUncertaintySet SetFromFile(const SvcModelFile& file, const Box& box);

}  // namespace uncset

#endif  // UNCSET_SVC_BASELINE_H_
