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

#ifndef UNCSET_DATAGEN_H_
#define UNCSET_DATAGEN_H_

#include <cstdint>
#include <iosfwd>
#include <string_view>
#include <vector>

#include "uncset/numlin.h"

namespace uncset {

enum class DataFamily { kGaussian, kMixedGaussian, kBudgeted };

const char* DataFamilyName(DataFamily family);
// Accepts "gaussian", "mixed" and "budgeted"; throws kInvalidArgument.
DataFamily ParseDataFamily(std::string_view name);

struct DatasetSpec {
  DataFamily family = DataFamily::kGaussian;
  std::size_t dim = 10;
  std::size_t train_size = 250;
  std::size_t test_size = 10000;
  double outlier_fraction = 0.0;
  std::uint64_t seed = 0;
  // Budget for the budgeted family; negative means dim / 2.
  double budget = -1.0;

  void Validate() const;
};

struct Dataset {
  Matrix train;
  Matrix test;
  // Mixture component per row (mixed family only).
  std::vector<int> train_labels;
  std::vector<int> test_labels;
};

struct GaussianParams {
  Vector mean;
  Matrix cov;
};

// Mean uniform in [50,150]^N; covariance from a random correlation matrix
// (M^T M + 0.1 I, normalized) scaled by standard deviations in [5,25].
GaussianParams DrawGaussianParams(std::size_t dim, Rng& rng);
Matrix SampleGaussian(const GaussianParams& params, std::size_t rows, Rng& rng);

// Train and test rows share distribution parameters and use separate
// streams derived from spec.seed. No outliers are injected here.
Dataset GenGaussian(const DatasetSpec& spec);
Dataset GenMixedGaussian(const DatasetSpec& spec);
Dataset GenBudgeted(const DatasetSpec& spec);

// Replaces floor(fraction m) distinct rows by uniform draws in [0,300]^N.
Matrix InjectOutliers(const Matrix& scenarios, double fraction,
                      std::uint64_t seed);

// Family dispatch plus outlier injection into the training rows.
Dataset Generate(const DatasetSpec& spec);

// Header "c_1,...,c_N", one scenario per line.
void WriteScenarioCsv(std::ostream& out, const Matrix& scenarios);
Matrix ReadScenarioCsv(std::istream& in);

}  // namespace uncset

#endif  // UNCSET_DATAGEN_H_
