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

#include "uncset/datagen.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "uncset/error.h"
#include "uncset/text_io.h"

namespace uncset {
namespace {

// Stream ids forked from the dataset seed.
constexpr std::uint64_t kParamStream = 0;
constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kTestStream = 2;
constexpr std::uint64_t kOutlierStream = 3;

constexpr double kGlobalCenter = 100.0;

}  // namespace

const char* DataFamilyName(DataFamily family) {
  switch (family) {
    case DataFamily::kGaussian:
      return "gaussian";
    case DataFamily::kMixedGaussian:
      return "mixed";
    case DataFamily::kBudgeted:
      return "budgeted";
  }
  return "unknown";
}

DataFamily ParseDataFamily(std::string_view name) {
  if (name == "gaussian") return DataFamily::kGaussian;
  if (name == "mixed") return DataFamily::kMixedGaussian;
  if (name == "budgeted") return DataFamily::kBudgeted;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown data family '" + std::string(name) + "'");
}

void DatasetSpec::Validate() const {
  if (dim == 0 || train_size == 0 || test_size == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "dimension, train size and test size must be positive");
  }
  if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "outlier fraction must lie in [0, 1)");
  }
}

GaussianParams DrawGaussianParams(std::size_t dim, Rng& rng) {
  GaussianParams p;
  p.mean.resize(dim);
  for (double& m : p.mean) m = rng.Uniform(50.0, 150.0);
  Matrix m(dim, dim);
  for (double& x : m.data()) x = rng.Uniform(-1.0, 1.0);
  Matrix c = Multiply(m.Transposed(), m);
  for (std::size_t i = 0; i < dim; ++i) c(i, i) += 0.1;
  Vector sd(dim);
  for (double& s : sd) s = rng.Uniform(5.0, 25.0);
  p.cov = Matrix(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      p.cov(i, j) = c(i, j) / std::sqrt(c(i, i) * c(j, j)) * sd[i] * sd[j];
    }
  }
  return p;
}

Matrix SampleGaussian(const GaussianParams& params, std::size_t rows,
                      Rng& rng) {
  const std::size_t dim = params.mean.size();
  const Matrix l = Cholesky(params.cov);
  Matrix out(rows, dim);
  Vector z(dim);
  for (std::size_t r = 0; r < rows; ++r) {
    for (double& v : z) v = rng.Normal();
    std::span<double> row = out.row(r);
    for (std::size_t i = 0; i < dim; ++i) {
      double s = params.mean[i];
      for (std::size_t k = 0; k <= i; ++k) s += l(i, k) * z[k];
      row[i] = s;
    }
  }
  return out;
}

Dataset GenGaussian(const DatasetSpec& spec) {
  spec.Validate();
  const Rng root(spec.seed);
  Rng param_rng = root.Fork(kParamStream);
  const GaussianParams params = DrawGaussianParams(spec.dim, param_rng);
  Rng train_rng = root.Fork(kTrainStream);
  Rng test_rng = root.Fork(kTestStream);
  Dataset d;
  d.train = SampleGaussian(params, spec.train_size, train_rng);
  d.test = SampleGaussian(params, spec.test_size, test_rng);
  return d;
}

namespace {

bool SameQuadrant(const Vector& a, const Vector& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] >= kGlobalCenter) != (b[i] >= kGlobalCenter)) return false;
  }
  return true;
}

void SampleMixture(const GaussianParams (&comp)[2], std::size_t rows, Rng& rng,
                   Matrix& out, std::vector<int>& labels) {
  const std::size_t dim = comp[0].mean.size();
  out = Matrix(rows, dim);
  labels.assign(rows, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    labels[r] = rng.Bernoulli(0.5) ? 1 : 0;
    const Matrix one = SampleGaussian(comp[labels[r]], 1, rng);
    std::copy(one.row(0).begin(), one.row(0).end(), out.row(r).begin());
  }
}

}  // namespace

Dataset GenMixedGaussian(const DatasetSpec& spec) {
  spec.Validate();
  const Rng root(spec.seed);
  Rng param_rng = root.Fork(kParamStream);
  GaussianParams comp[2] = {DrawGaussianParams(spec.dim, param_rng),
                            DrawGaussianParams(spec.dim, param_rng)};
  for (int attempt = 0; SameQuadrant(comp[0].mean, comp[1].mean); ++attempt) {
    if (attempt > 1000) {
      throw Error(ErrorCode::kInvalidArgument, "could not separate means");
    }
    for (double& m : comp[1].mean) m = param_rng.Uniform(50.0, 150.0);
  }
  Rng train_rng = root.Fork(kTrainStream);
  Rng test_rng = root.Fork(kTestStream);
  Dataset d;
  SampleMixture(comp, spec.train_size, train_rng, d.train, d.train_labels);
  SampleMixture(comp, spec.test_size, test_rng, d.test, d.test_labels);
  return d;
}

Dataset GenBudgeted(const DatasetSpec& spec) {
  spec.Validate();
  const Rng root(spec.seed);
  Rng param_rng = root.Fork(kParamStream);
  const std::size_t n = spec.dim;
  const double gamma =
      spec.budget < 0.0 ? static_cast<double>(n) / 2.0 : spec.budget;
  Vector base(n), dev(n);
  for (double& b : base) b = param_rng.Uniform(50.0, 100.0);
  for (double& v : dev) v = param_rng.Uniform(10.0, 50.0);
  auto sample = [&](std::size_t rows, Rng& rng) {
    Matrix out(rows, n);
    Vector delta(n);
    for (std::size_t r = 0; r < rows; ++r) {
      double total = 0.0;
      for (double& x : delta) total += (x = rng.Uniform());
      const double scale = total > gamma ? gamma / total : 1.0;
      std::span<double> row = out.row(r);
      for (std::size_t i = 0; i < n; ++i) {
        row[i] = base[i] + dev[i] * delta[i] * scale;
      }
    }
    return out;
  };
  Rng train_rng = root.Fork(kTrainStream);
  Rng test_rng = root.Fork(kTestStream);
  Dataset d;
  d.train = sample(spec.train_size, train_rng);
  d.test = sample(spec.test_size, test_rng);
  return d;
}

Matrix InjectOutliers(const Matrix& scenarios, double fraction,
                      std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "outlier fraction must lie in [0, 1)");
  }
  const std::size_t m = scenarios.rows();
  const auto count = static_cast<std::size_t>(
      std::floor(fraction * static_cast<double>(m) + 1e-9));
  Matrix out = scenarios;
  if (count == 0) return out;
  Rng rng(seed);
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < count; ++i) {
    std::swap(idx[i], idx[i + rng.UniformIndex(m - i)]);
  }
  std::sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count));
  for (std::size_t i = 0; i < count; ++i) {
    for (double& x : out.row(idx[i])) x = rng.Uniform(0.0, 300.0);
  }
  return out;
}

Dataset Generate(const DatasetSpec& spec) {
  Dataset d;
  switch (spec.family) {
    case DataFamily::kGaussian:
      d = GenGaussian(spec);
      break;
    case DataFamily::kMixedGaussian:
      d = GenMixedGaussian(spec);
      break;
    case DataFamily::kBudgeted:
      d = GenBudgeted(spec);
      break;
  }
  if (spec.outlier_fraction > 0.0) {
    d.train = InjectOutliers(d.train, spec.outlier_fraction,
                             MixSeed(spec.seed, kOutlierStream + 1));
  }
  return d;
}

void WriteScenarioCsv(std::ostream& out, const Matrix& scenarios) {
  for (std::size_t j = 0; j < scenarios.cols(); ++j) {
    out << (j ? ",c_" : "c_") << j + 1;
  }
  out << '\n';
  for (std::size_t i = 0; i < scenarios.rows(); ++i) {
    const std::span<const double> row = scenarios.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      if (j) out << ',';
      out << FormatDouble(row[j]);
    }
    out << '\n';
  }
}

namespace {

std::vector<std::string_view> SplitCommas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

}  // namespace

Matrix ReadScenarioCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kParseError, "scenario CSV is empty");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string_view> header = SplitCommas(line);
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] != "c_" + std::to_string(j + 1)) {
      throw Error(ErrorCode::kParseError,
                  "scenario CSV header must be c_1,...,c_N");
    }
  }
  Matrix out;
  std::size_t line_no = 1;
  Vector row;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string_view> fields = SplitCommas(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorCode::kParseError,
                  "line " + std::to_string(line_no) + " has " +
                      std::to_string(fields.size()) + " fields, expected " +
                      std::to_string(header.size()));
    }
    row.resize(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j) {
      row[j] = ParseDouble(fields[j]);
      if (!std::isfinite(row[j])) {
        throw Error(ErrorCode::kParseError,
                    "non-finite value on line " + std::to_string(line_no));
      }
    }
    out.AppendRow(row);
  }
  if (out.rows() == 0) {
    throw Error(ErrorCode::kParseError, "scenario CSV has no rows");
  }
  return out;
}

}  // namespace uncset
