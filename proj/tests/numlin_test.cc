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

#include "uncset/numlin.h"

#include <algorithm>
#include <cmath>

#include "gtest/gtest.h"
#include "uncset/error.h"

namespace uncset {
namespace {

TEST(MatrixTest, ShapeAndAccess) {
  Matrix a{{1, 2, 3}, {4, 5, 6}};
  EXPECT_EQ(a.rows(), 2u);
  EXPECT_EQ(a.cols(), 3u);
  EXPECT_EQ(a(1, 2), 6.0);
  EXPECT_EQ(a.Column(1), (Vector{2, 5}));
  EXPECT_EQ(a.Transposed(), (Matrix{{1, 4}, {2, 5}, {3, 6}}));
}

TEST(MatrixTest, RejectsRaggedAndNonFinite) {
  EXPECT_THROW((Matrix{{1, 2}, {3}}), Error);
  EXPECT_THROW(Matrix(1, 2, std::vector<double>{1.0, NAN}), Error);
  EXPECT_THROW(Matrix(2, 2, std::vector<double>{1.0}), Error);
}

TEST(MatrixTest, AppendRowChecksWidth) {
  Matrix a;
  a.AppendRow(Vector{1, 2});
  a.AppendRow(Vector{3, 4});
  EXPECT_EQ(a, (Matrix{{1, 2}, {3, 4}}));
  EXPECT_THROW(a.AppendRow(Vector{1}), Error);
}

TEST(LinalgTest, ProductsAgreeWithHandComputation) {
  Matrix a{{1, 2}, {3, 4}, {5, 6}};
  EXPECT_EQ(MatVec(a, Vector{1, -1}), (Vector{-1, -1, -1}));
  EXPECT_EQ(TransposeMatVec(a, Vector{1, 0, 1}), (Vector{6, 8}));
  EXPECT_EQ(Multiply(a.Transposed(), a), (Matrix{{35, 44}, {44, 56}}));
  EXPECT_THROW(MatVec(a, Vector{1, 2, 3}), Error);
}

TEST(LinalgTest, Norms) {
  Vector v{3, -4};
  EXPECT_DOUBLE_EQ(Norm(v, NormKind::kL1), 7.0);
  EXPECT_DOUBLE_EQ(Norm(v, NormKind::kL2), 5.0);
  EXPECT_DOUBLE_EQ(Norm(v, NormKind::kInf), 4.0);
  // Scaled l2 must not overflow.
  Vector big{1e200, 1e200};
  EXPECT_NEAR(Norm(big, NormKind::kL2) / 1e200, std::sqrt(2.0), 1e-12);
}

TEST(CholeskyTest, ReconstructsRandomSpdMatrices) {
  Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.UniformIndex(12);
    Matrix m(n, n);
    for (double& x : m.data()) x = rng.Uniform(-1, 1);
    Matrix s = Multiply(m.Transposed(), m);
    for (std::size_t i = 0; i < n; ++i) s(i, i) += 0.1;
    const Matrix l = Cholesky(s);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) EXPECT_EQ(l(i, j), 0.0);
    }
    // V = Lᵀ, so VᵀV = L Lᵀ.
    const Matrix v = l.Transposed();
    const Matrix vtv = Multiply(v.Transposed(), v);
    double scale = 0.0, err = 0.0;
    for (std::size_t k = 0; k < s.data().size(); ++k) {
      scale = std::max(scale, std::abs(s.data()[k]));
      err = std::max(err, std::abs(vtv.data()[k] - s.data()[k]));
    }
    EXPECT_LE(err / scale, 1e-9) << "n " << n;
    const Matrix id = Multiply(InvertLowerTriangular(l), l);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_NEAR(id(i, j), i == j ? 1.0 : 0.0, 1e-8);
      }
    }
    Vector b(n);
    for (double& x : b) x = rng.Uniform(-1, 1);
    const Vector x = CholeskySolve(l, b);
    const Vector sx = MatVec(s, x);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(sx[i], b[i], 1e-8);
  }
}

TEST(CholeskyTest, RejectsIndefiniteAndAsymmetric) {
  try {
    Cholesky(Matrix{{1, 2}, {2, 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotPositiveDefinite);
  }
  EXPECT_THROW(Cholesky(Matrix{{1, 0.5}, {0.2, 1}}), Error);
}

TEST(StatsTest, MeansAndCovariance) {
  Matrix d{{1, 2}, {3, 6}, {5, 4}};
  EXPECT_EQ(ColumnMeans(d), (Vector{3, 4}));
  Matrix c = SampleCovariance(d);
  EXPECT_DOUBLE_EQ(c(0, 0), 4.0);
  EXPECT_DOUBLE_EQ(c(1, 1), 4.0);
  EXPECT_DOUBLE_EQ(c(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(c(1, 0), 2.0);
}

TEST(LinalgTest, NormsMatchDirectSummation) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    Vector v(1 + rng.UniformIndex(30));
    double squares = 0.0, abs_sum = 0.0, peak = 0.0;
    for (double& x : v) {
      x = rng.Uniform(-10, 10);
      squares += x * x;
      abs_sum += std::abs(x);
      peak = std::max(peak, std::abs(x));
    }
    const double l2 = Norm(v, NormKind::kL2);
    EXPECT_NEAR(l2 * l2, squares, 1e-10 * squares);
    EXPECT_NEAR(Norm(v, NormKind::kL1), abs_sum, 1e-10 * abs_sum);
    EXPECT_EQ(Norm(v, NormKind::kInf), peak);
  }
}

TEST(RngTest, DeterministicAndForksDiffer) {
  Rng a(42), b(42);
  int equal = 0;
  for (int i = 0; i < 10000; ++i) {
    equal += a.NextU64() == b.NextU64();
    equal += a.Normal() == b.Normal();
  }
  EXPECT_EQ(equal, 20000);
  Rng f1 = Rng(42).Fork(1), f2 = Rng(42).Fork(2);
  EXPECT_NE(f1.NextU64(), f2.NextU64());
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.Uniform(2.0, 5.0);
    EXPECT_GE(u, 2.0);
    EXPECT_LT(u, 5.0);
    EXPECT_LT(r.UniformIndex(7), 7u);
  }
}

}  // namespace
}  // namespace uncset
