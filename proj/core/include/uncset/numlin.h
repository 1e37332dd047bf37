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

#ifndef UNCSET_NUMLIN_H_
#define UNCSET_NUMLIN_H_

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace uncset {

using Vector = std::vector<double>;

enum class NormKind { kL1 = 1, kL2 = 2, kInf = 3 };

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  // Throws kDimensionMismatch on ragged input and kInvalidArgument on
  // non-finite entries.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix Identity(std::size_t n);
  static Matrix Diagonal(std::span<const double> diag);
  static Matrix FromRows(const std::vector<Vector>& rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * cols_ + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }

  std::span<double> row(std::size_t i) {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  Vector RowVector(std::size_t i) const;
  Vector Column(std::size_t j) const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  Matrix Transposed() const;
  // Appends one row; the matrix must be empty or have matching width.
  void AppendRow(std::span<const double> values);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

double Dot(std::span<const double> a, std::span<const double> b);
double Norm(std::span<const double> v, NormKind kind);
// Largest absolute entry.
double MaxAbs(std::span<const double> v);
bool AllFinite(std::span<const double> v);

Vector MatVec(const Matrix& a, std::span<const double> x);
// Computes aᵀx.
Vector TransposeMatVec(const Matrix& a, std::span<const double> x);
Matrix Multiply(const Matrix& a, const Matrix& b);
Vector Subtract(std::span<const double> a, std::span<const double> b);
Vector Add(std::span<const double> a, std::span<const double> b);
// y += alpha * x
void Axpy(double alpha, std::span<const double> x, std::span<double> y);

// Lower-triangular L with L·Lᵀ = s, so V = Lᵀ is the upper factor with
// Vᵀ·V = s. Throws kNotPositiveDefinite when a pivot drops to 1e-12 or below.
Matrix Cholesky(const Matrix& s);
// Solves L·y = b for lower-triangular L.
Vector SolveLowerTriangular(const Matrix& l, std::span<const double> b);
// Solves (L Lᵀ) x = b given the Cholesky factor L.
Vector CholeskySolve(const Matrix& l, std::span<const double> b);
Matrix InvertLowerTriangular(const Matrix& l);

// Column means and (unbiased) sample covariance of the rows of `data`.
Vector ColumnMeans(const Matrix& data);
Matrix SampleCovariance(const Matrix& data);

// Seeded pseudorandom stream. Equal seeds give equal streams within one
// build; the algorithm is not part of any file format.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t NextU64() { return engine_(); }
  // Uniform on [0, 1).
  double Uniform();
  double Uniform(double lo, double hi);
  double Normal();
  // Uniform on {0, ..., n-1}; n must be positive.
  std::size_t UniformIndex(std::size_t n);
  bool Bernoulli(double p) { return Uniform() < p; }
  // Independent stream derived from this generator's seed and `stream`.
  Rng Fork(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_;
};

// SplitMix64 finalizer, used to derive independent seeds.
std::uint64_t MixSeed(std::uint64_t seed, std::uint64_t stream);

}  // namespace uncset

#endif  // UNCSET_NUMLIN_H_
