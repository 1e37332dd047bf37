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

#include "uncset/lp.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "gtest/gtest.h"
#include "uncset/error.h"

namespace uncset {
namespace {

// Gaussian elimination with partial pivoting; nullopt when singular.
std::optional<Vector> SolveSquare(std::vector<Vector> a, Vector b) {
  const std::size_t n = b.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a[i][k]) > std::abs(a[p][k])) p = i;
    }
    if (std::abs(a[p][k]) < 1e-10) return std::nullopt;
    std::swap(a[p], a[k]);
    std::swap(b[p], b[k]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = a[i][k] / a[k][k];
      for (std::size_t j = k; j < n; ++j) a[i][j] -= f * a[k][j];
      b[i] -= f * b[k];
    }
  }
  Vector x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= a[k][j] * x[j];
    x[k] = s / a[k][k];
  }
  return x;
}

// Brute-force optimum over all basic solutions of a box-bounded LP.
std::optional<double> VertexOracle(const LinearProgram& lp) {
  const std::size_t n = lp.num_vars();
  std::vector<Vector> hyper;
  Vector rhs;
  for (const LpRow& row : lp.rows) {
    hyper.push_back(row.coeffs);
    rhs.push_back(row.rhs);
  }
  for (std::size_t j = 0; j < n; ++j) {
    Vector e(n, 0.0);
    e[j] = 1.0;
    hyper.push_back(e);
    rhs.push_back(lp.lower[j]);
    hyper.push_back(e);
    rhs.push_back(lp.upper[j]);
  }
  const std::size_t h = hyper.size();
  std::optional<double> best;
  std::vector<std::size_t> pick(n);
  // Enumerate n-subsets.
  std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t start,
                                                          std::size_t depth) {
    if (depth == n) {
      std::vector<Vector> a;
      Vector b;
      for (std::size_t k : pick) {
        a.push_back(hyper[k]);
        b.push_back(rhs[k]);
      }
      auto x = SolveSquare(a, b);
      if (!x || MaxViolation(lp, *x) > 1e-7) return;
      const double v = Dot(lp.objective, *x);
      if (!best || (lp.sense == Sense::kMinimize ? v < *best : v > *best)) {
        best = v;
      }
      return;
    }
    for (std::size_t k = start; k < h; ++k) {
      pick[depth] = k;
      rec(k + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

LinearProgram RandomBoxLp(Rng& rng, std::size_t n, std::size_t m) {
  LinearProgram lp(n, rng.Bernoulli(0.5) ? Sense::kMinimize : Sense::kMaximize);
  for (std::size_t j = 0; j < n; ++j) {
    lp.objective[j] = std::round(rng.Uniform(-5, 5));
    const double lo = std::round(rng.Uniform(-4, 1));
    lp.SetBounds(j, lo, lo + std::round(rng.Uniform(0, 5)));
  }
  for (std::size_t i = 0; i < m; ++i) {
    Vector a(n);
    for (double& x : a) x = std::round(rng.Uniform(-3, 3));
    const double u = rng.Uniform();
    const RowType type = u < 0.45  ? RowType::kLessEqual
                         : u < 0.9 ? RowType::kGreaterEqual
                                   : RowType::kEqual;
    lp.AddRow(a, type, std::round(rng.Uniform(-4, 4)));
  }
  return lp;
}

TEST(LpTest, SmallTextbookProblem) {
  // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18, x, y >= 0 -> 36 at (2, 6).
  LinearProgram lp(2, Sense::kMaximize);
  lp.objective = {3, 5};
  lp.SetBounds(0, 0, kLpInfinity);
  lp.SetBounds(1, 0, kLpInfinity);
  lp.AddRow(Vector{1, 0}, RowType::kLessEqual, 4);
  lp.AddRow(Vector{0, 2}, RowType::kLessEqual, 12);
  lp.AddRow(Vector{3, 2}, RowType::kLessEqual, 18);
  const LpSolution sol = SolveLp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 36.0, 1e-9);
  EXPECT_NEAR(sol.x[0], 2.0, 1e-9);
  EXPECT_NEAR(sol.x[1], 6.0, 1e-9);
  // Known duals (0, 1.5, 1).
  EXPECT_NEAR(sol.row_duals[0], 0.0, 1e-9);
  EXPECT_NEAR(sol.row_duals[1], 1.5, 1e-9);
  EXPECT_NEAR(sol.row_duals[2], 1.0, 1e-9);
  EXPECT_NEAR(DualBound(lp, sol), 36.0, 1e-9);
}

TEST(LpTest, DetectsInfeasibleAndUnbounded) {
  LinearProgram inf(1, Sense::kMinimize);
  inf.AddRow(Vector{1}, RowType::kGreaterEqual, 2);
  inf.AddRow(Vector{1}, RowType::kLessEqual, 1);
  EXPECT_EQ(SolveLp(inf).status, LpStatus::kInfeasible);

  LinearProgram unb(2, Sense::kMaximize);
  unb.objective = {1, 1};
  unb.SetBounds(0, 0, kLpInfinity);
  unb.AddRow(Vector{1, -1}, RowType::kLessEqual, 1);
  EXPECT_EQ(SolveLp(unb).status, LpStatus::kUnbounded);

  LinearProgram crossed(1, Sense::kMinimize);
  crossed.SetBounds(0, 2, 1);
  EXPECT_EQ(SolveLp(crossed).status, LpStatus::kInfeasible);
}

TEST(LpTest, FreeAndUpperOnlyVariables) {
  // min x - y with x free, y <= 3, x + y >= 1, x - y >= -10.
  LinearProgram lp(2, Sense::kMinimize);
  lp.objective = {1, -1};
  lp.SetBounds(1, -kLpInfinity, 3);
  lp.AddRow(Vector{1, 1}, RowType::kGreaterEqual, 1);
  lp.AddRow(Vector{1, -1}, RowType::kGreaterEqual, -10);
  const LpSolution sol = SolveLp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, -5.0, 1e-9);  // x = -2, y = 3
  EXPECT_LE(MaxViolation(lp, sol.x), 1e-9);
}

TEST(LpTest, EqualityRowsAndRedundancy) {
  LinearProgram lp(3, Sense::kMinimize);
  lp.objective = {1, 2, 3};
  for (int j = 0; j < 3; ++j) lp.SetBounds(j, 0, kLpInfinity);
  lp.AddRow(Vector{1, 1, 1}, RowType::kEqual, 6);
  lp.AddRow(Vector{2, 2, 2}, RowType::kEqual, 12);  // redundant copy
  lp.AddRow(Vector{0, 1, 1}, RowType::kGreaterEqual, 2);
  const LpSolution sol = SolveLp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 8.0, 1e-9);
  EXPECT_LE(MaxViolation(lp, sol.x), 1e-9);
}

TEST(LpTest, RejectsMalformedInput) {
  LinearProgram lp(2, Sense::kMinimize);
  EXPECT_THROW(lp.AddRow(Vector{1}, RowType::kEqual, 0), Error);
  lp.objective[0] = NAN;
  EXPECT_THROW(SolveLp(lp), Error);
}

TEST(LpTest, IterationLimitIsReported) {
  Rng rng(2);
  LinearProgram lp = RandomBoxLp(rng, 6, 8);
  LpOptions options;
  options.max_iterations = 0;
  // Either finishes without pivots or reports the limit.
  try {
    SolveLp(lp, options);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIterationLimit);
  }
}

// Random box-bounded LPs against vertex enumeration, plus weak and strong
// duality through DualBound.
TEST(LpTest, MatchesVertexEnumeration) {
  Rng rng(2024);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng.UniformIndex(4);
    const std::size_t m = rng.UniformIndex(5);
    const LinearProgram lp = RandomBoxLp(rng, n, m);
    const auto oracle = VertexOracle(lp);
    const LpSolution sol = SolveLp(lp);
    const LpSolution via_dual = SolveLpViaDual(lp);
    if (!oracle) {
      EXPECT_EQ(sol.status, LpStatus::kInfeasible) << "trial " << trial;
      EXPECT_EQ(via_dual.status, LpStatus::kInfeasible) << "trial " << trial;
      ++infeasible;
      continue;
    }
    ++optimal;
    ASSERT_EQ(sol.status, LpStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(sol.objective, *oracle, 1e-7) << "trial " << trial;
    EXPECT_LE(MaxViolation(lp, sol.x), 1e-8);
    EXPECT_NEAR(DualBound(lp, sol), *oracle, 1e-7) << "trial " << trial;
    ASSERT_EQ(via_dual.status, LpStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(via_dual.objective, *oracle, 1e-7) << "trial " << trial;
    EXPECT_LE(MaxViolation(lp, via_dual.x), 1e-7) << "trial " << trial;
  }
  EXPECT_GT(optimal, 100);
  EXPECT_GT(infeasible, 10);
}

TEST(LpTest, MatchesVertexEnumerationUpToSixVariables) {
  Rng rng(77);
  int optimal = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 1 + rng.UniformIndex(6);
    const std::size_t m = rng.UniformIndex(9);
    const LinearProgram lp = RandomBoxLp(rng, n, m);
    const auto oracle = VertexOracle(lp);
    const LpSolution sol = SolveLp(lp);
    if (!oracle) {
      EXPECT_EQ(sol.status, LpStatus::kInfeasible) << "trial " << trial;
      continue;
    }
    ++optimal;
    ASSERT_EQ(sol.status, LpStatus::kOptimal) << "trial " << trial;
    EXPECT_NEAR(sol.objective, *oracle, 1e-6) << "trial " << trial;
    EXPECT_NEAR(DualBound(lp, sol), *oracle, 1e-6) << "trial " << trial;
  }
  EXPECT_GT(optimal, 20);
}

TEST(LpTest, PermutationInvariance) {
  Rng rng(91);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.UniformIndex(7);
    const std::size_t m = 1 + rng.UniformIndex(8);
    // Non-integral data so the optimum is unique almost surely.
    LinearProgram lp(n, Sense::kMaximize);
    for (std::size_t j = 0; j < n; ++j) {
      lp.objective[j] = rng.Uniform(-1, 1);
      lp.SetBounds(j, -rng.Uniform(0.5, 2), rng.Uniform(0.5, 2));
    }
    for (std::size_t i = 0; i < m; ++i) {
      Vector a(n);
      for (double& x : a) x = rng.Uniform(-1, 1);
      lp.AddRow(a, i % 3 == 2 ? RowType::kGreaterEqual : RowType::kLessEqual,
                i % 3 == 2 ? -rng.Uniform(0.1, 1) : rng.Uniform(0.1, 1));
    }
    std::vector<std::size_t> vars(n), rows(m);
    std::iota(vars.begin(), vars.end(), 0);
    std::iota(rows.begin(), rows.end(), 0);
    std::shuffle(vars.begin(), vars.end(), std::mt19937_64(trial));
    std::shuffle(rows.begin(), rows.end(), std::mt19937_64(trial + 1000));
    LinearProgram permuted(n, Sense::kMaximize);
    for (std::size_t j = 0; j < n; ++j) {
      permuted.objective[j] = lp.objective[vars[j]];
      permuted.SetBounds(j, lp.lower[vars[j]], lp.upper[vars[j]]);
    }
    for (std::size_t i : rows) {
      Vector a(n);
      for (std::size_t j = 0; j < n; ++j) a[j] = lp.rows[i].coeffs[vars[j]];
      permuted.AddRow(a, lp.rows[i].type, lp.rows[i].rhs);
    }
    const LpSolution a = SolveLp(lp);
    const LpSolution b = SolveLp(permuted);
    ASSERT_EQ(a.status, LpStatus::kOptimal);
    ASSERT_EQ(b.status, LpStatus::kOptimal);
    EXPECT_NEAR(a.objective, b.objective, 1e-9) << "trial " << trial;
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_NEAR(b.x[j], a.x[vars[j]], 1e-7) << "trial " << trial;
    }
  }
}

TEST(LpTest, DegenerateProblemTerminates) {
  // Many constraints through the same vertex.
  LinearProgram lp(3, Sense::kMaximize);
  lp.objective = {1, 1, 1};
  for (int j = 0; j < 3; ++j) lp.SetBounds(j, 0, kLpInfinity);
  for (int k = 0; k < 30; ++k) {
    lp.AddRow(Vector{1.0 + k % 3, 1.0 + (k / 3) % 3, 1.0 + k % 5},
              RowType::kLessEqual, 0.0);
  }
  lp.AddRow(Vector{1, 1, 1}, RowType::kLessEqual, 1);
  const LpSolution sol = SolveLp(lp);
  ASSERT_EQ(sol.status, LpStatus::kOptimal);
  EXPECT_NEAR(sol.objective, 0.0, 1e-9);
}

TEST(LpTest, DumpIsReadable) {
  LinearProgram lp(2, Sense::kMaximize);
  lp.objective = {1, 2};
  lp.AddRow(Vector{1, 1}, RowType::kLessEqual, 3);
  std::ostringstream out;
  DumpLp(out, lp);
  EXPECT_EQ(out.str(), "max 1 2\n1 1 <= 3\nbounds [-inf,inf] [-inf,inf]\n");
}

}  // namespace
}  // namespace uncset
