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

#include "uncset/svc_baseline.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "uncset/error.h"
#include "uncset/lp.h"
#include "uncset/text_io.h"

namespace uncset {

Matrix WeightingMatrix(const Matrix& data) {
  if (data.rows() < 2) {
    throw Error(ErrorCode::kDegenerateData, "need two scenarios for Q");
  }
  Matrix cov = SampleCovariance(data);
  const std::size_t n = cov.rows();
  double trace = 0.0;
  for (std::size_t i = 0; i < n; ++i) trace += cov(i, i);
  if (!(trace > 0.0)) {
    throw Error(ErrorCode::kDegenerateData, "covariance trace is zero");
  }
  const double jitter = 1e-6 * trace / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) cov(i, i) += jitter;
  return InvertLowerTriangular(Cholesky(cov));
}

namespace {

double WeightedL1(std::span<const double> u, std::span<const double> v,
                  const Matrix& q) {
  double s = 0.0;
  for (std::size_t r = 0; r < q.rows(); ++r) {
    const auto row = q.row(r);
    double t = 0.0;
    for (std::size_t j = 0; j < row.size(); ++j) t += row[j] * (u[j] - v[j]);
    s += std::abs(t);
  }
  return s;
}

Matrix Distances(const Matrix& data, const Matrix& q) {
  const std::size_t m = data.rows();
  // Rows of Q c^i once, then l1 distances between them.
  std::vector<Vector> mapped(m);
  for (std::size_t i = 0; i < m; ++i) mapped[i] = MatVec(q, data.row(i));
  Matrix d(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < mapped[i].size(); ++k) {
        s += std::abs(mapped[i][k] - mapped[j][k]);
      }
      d(i, j) = d(j, i) = s;
    }
  }
  return d;
}

}  // namespace

double KernelEval(std::span<const double> u, std::span<const double> v,
                  const Matrix& q, double lbar) {
  if (u.size() != v.size() || u.size() != q.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "kernel arguments disagree");
  }
  return lbar - WeightedL1(u, v, q);
}

double DualObjective(const SvcModel& model, std::span<const double> alpha) {
  const std::size_t m = model.data.rows();
  double quad = 0.0, diag = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    if (alpha[i] == 0.0) continue;
    diag += alpha[i] * model.lbar;
    for (std::size_t j = 0; j < m; ++j) {
      if (alpha[j] == 0.0) continue;
      const double k = i == j ? model.lbar
                              : KernelEval(model.data.row(i), model.data.row(j),
                                           model.q, model.lbar);
      quad += alpha[i] * alpha[j] * k;
    }
  }
  return quad - diag;
}

SvcModel SolveDual(const Matrix& data, const Matrix& q, double nu,
                   const SmoOptions& options) {
  if (!(nu > 0.0 && nu <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "nu must lie in (0, 1]");
  }
  const std::size_t m = data.rows();
  if (m == 0 || q.cols() != data.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "data and Q disagree");
  }
  SvcModel model;
  model.nu = nu;
  model.q = q;
  model.data = data;
  const Matrix dist = Distances(data, q);
  model.offsets.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    double row_max = 0.0;
    for (std::size_t j = 0; j < m; ++j) row_max = std::max(row_max, dist(i, j));
    model.offsets[i] = 3.0 * row_max / static_cast<double>(m);
    model.lbar += model.offsets[i];
  }
  if (model.lbar == 0.0) model.lbar = 1.0;  // all points coincide

  const double cap = model.box_bound();
  Vector& alpha = model.alpha;
  alpha.assign(m, 0.0);
  double remaining = 1.0;
  for (std::size_t i = 0; i < m && remaining > 0.0; ++i) {
    alpha[i] = std::min(cap, remaining);
    remaining -= alpha[i];
  }
  // g = 2 K alpha - lbar = lbar - 2 D alpha while sum(alpha) = 1.
  Vector g(m, model.lbar);
  for (std::size_t i = 0; i < m; ++i) {
    if (alpha[i] == 0.0) continue;
    for (std::size_t k = 0; k < m; ++k) g[k] -= 2.0 * alpha[i] * dist(k, i);
  }
  const double slack = 1e-12 * cap;
  const std::int64_t max_updates =
      options.max_sweeps * static_cast<std::int64_t>(m);
  while (true) {
    // i: smallest gradient among those that may grow; j: largest among
    // those that may shrink.
    std::size_t up = m, down = m;
    for (std::size_t k = 0; k < m; ++k) {
      if (alpha[k] < cap - slack && (up == m || g[k] < g[up])) up = k;
      if (alpha[k] > slack && (down == m || g[k] > g[down])) down = k;
    }
    const double violation = up == m || down == m ? 0.0 : g[down] - g[up];
    model.kkt_violation = std::max(0.0, violation);
    if (violation <= options.tol) break;
    if (model.updates >= max_updates) {
      throw Error(ErrorCode::kNoConvergence,
                  "SMO violation " + std::to_string(violation) + " after " +
                      std::to_string(options.max_sweeps) + " sweeps");
    }
    ++model.updates;
    const double eta = 2.0 * dist(up, down);
    const double t_max = std::min(cap - alpha[up], alpha[down]);
    double t = eta > 0.0 ? (g[down] - g[up]) / (2.0 * eta) : t_max;
    t = std::clamp(t, 0.0, t_max);
    if (t <= 0.0) break;
    alpha[up] += t;
    alpha[down] -= t;
    if (alpha[down] < slack) alpha[down] = 0.0;
    if (alpha[up] > cap - slack) alpha[up] = cap;
    for (std::size_t k = 0; k < m; ++k) {
      g[k] += 2.0 * t * (dist(k, down) - dist(k, up));
    }
  }
  // Renormalize away rounding drift in sum(alpha).
  double total = 0.0;
  for (double a : alpha) total += a;
  for (double& a : alpha) a /= total;

  for (std::size_t i = 0; i < m; ++i) {
    if (alpha[i] > options.threshold) {
      model.sv.push_back(i);
      if (alpha[i] < cap - options.threshold) model.bsv.push_back(i);
    }
  }
  model.objective = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double da = 0.0;
    for (std::size_t j = 0; j < m; ++j) da += dist(i, j) * alpha[j];
    // sum_ij a_i a_j (lbar - D_ij) - lbar = -a^T D a
    model.objective -= alpha[i] * da;
  }
  return model;
}

SvcUncertaintySet::SvcUncertaintySet(Matrix q, Matrix sv_points,
                                     Vector sv_alpha, double theta, double nu,
                                     Box box, Vector seed, bool nonneg)
    : q_(std::move(q)),
      sv_points_(std::move(sv_points)),
      sv_alpha_(std::move(sv_alpha)),
      theta_(theta),
      nu_(nu),
      box_(std::move(box)),
      seed_(std::move(seed)),
      nonneg_(nonneg) {
  if (sv_points_.rows() != sv_alpha_.size() || sv_points_.rows() == 0 ||
      sv_points_.cols() != q_.cols() || box_.lower.size() != q_.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "inconsistent SVC set");
  }
}

double SvcUncertaintySet::Score(std::span<const double> c) const {
  double s = 0.0;
  for (std::size_t i = 0; i < sv_points_.rows(); ++i) {
    s += sv_alpha_[i] * WeightedL1(c, sv_points_.row(i), q_);
  }
  return s;
}

bool SvcUncertaintySet::Contains(std::span<const double> c, double tol) const {
  if (!box_.Contains(c, tol)) return false;
  if (nonneg_) {
    for (double v : c) {
      if (v < -tol) return false;
    }
  }
  return Score(c) <= theta_ + tol;
}

AdversarialResult SvcUncertaintySet::Adversarial(
    std::span<const double> x) const {
  const std::size_t n = dim();
  const std::size_t s = sv_points_.rows();
  if (x.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "objective has wrong size");
  }
  // Variables: c (n), then v_i (n each).
  const std::size_t vars = n + s * n;
  LinearProgram lp(vars, Sense::kMaximize);
  for (std::size_t j = 0; j < n; ++j) {
    lp.objective[j] = x[j];
    const double lo = nonneg_ ? std::max(0.0, box_.lower[j]) : box_.lower[j];
    lp.SetBounds(j, lo, std::max(lo, box_.upper[j]));
  }
  Vector budget(vars, 0.0);
  Vector row(vars, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    const Vector qc = MatVec(q_, sv_points_.row(i));
    for (std::size_t r = 0; r < n; ++r) {
      const std::size_t v = n + i * n + r;
      lp.SetBounds(v, 0.0,
                   sv_alpha_[i] > 0.0 ? theta_ / sv_alpha_[i] : kLpInfinity);
      budget[v] = sv_alpha_[i];
      std::fill(row.begin(), row.end(), 0.0);
      for (std::size_t j = 0; j < n; ++j) row[j] = q_(r, j);
      row[v] = -1.0;
      lp.AddRow(row, RowType::kLessEqual, qc[r]);
      for (std::size_t j = 0; j < n; ++j) row[j] = -q_(r, j);
      lp.AddRow(row, RowType::kLessEqual, -qc[r]);
    }
  }
  lp.AddRow(budget, RowType::kLessEqual, theta_);
  const LpSolution sol = SolveLpViaDual(lp);
  AdversarialResult out;
  out.subproblems = 1;
  if (sol.status != LpStatus::kOptimal) return out;
  out.status = AdversarialStatus::kOptimal;
  out.scenario.assign(sol.x.begin(),
                      sol.x.begin() + static_cast<std::ptrdiff_t>(n));
  out.value = Dot(x, out.scenario);
  return out;
}

namespace {

Vector ChooseSeed(const SvcUncertaintySet& set, const Vector& mean) {
  if (!mean.empty() && set.Contains(mean, 0.0)) return mean;
  std::size_t best = 0;
  double best_score = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.sv_points().rows(); ++i) {
    const double s = set.Score(set.sv_points().row(i));
    if (s < best_score) {
      best_score = s;
      best = i;
    }
  }
  return set.sv_points().RowVector(best);
}

}  // namespace

SvcUncertaintySet BuildSet(const SvcModel& model, const Box& box) {
  if (model.bsv.empty()) {
    throw Error(ErrorCode::kEmptyBoundary,
                "no boundary support vectors; nu = " + FormatDouble(model.nu));
  }
  Matrix points;
  Vector alpha;
  for (std::size_t i : model.sv) {
    points.AppendRow(model.data.row(i));
    alpha.push_back(model.alpha[i]);
  }
  SvcUncertaintySet probe(model.q, points, alpha, 0.0, model.nu, box, {});
  double theta = std::numeric_limits<double>::infinity();
  for (std::size_t i : model.bsv) {
    theta = std::min(theta, probe.Score(model.data.row(i)));
  }
  SvcUncertaintySet set(model.q, std::move(points), std::move(alpha), theta,
                        model.nu, box, {});
  Vector seed = ChooseSeed(set, ColumnMeans(model.data));
  return SvcUncertaintySet(set.q(), set.sv_points(), set.sv_alpha(), theta,
                           model.nu, box, std::move(seed));
}

SvcUncertaintySet BuildSet(const SvcModel& model) {
  return BuildSet(model, DataBox(model.data));
}

SvcUncertaintySet NonnegVariant(const SvcUncertaintySet& set) {
  Vector seed = set.SeedScenario();
  for (double& v : seed) v = std::max(0.0, v);
  return SvcUncertaintySet(set.q(), set.sv_points(), set.sv_alpha(),
                           set.theta(), set.nu(), set.box(), std::move(seed),
                           true);
}

void WriteSvcModel(std::ostream& out, const SvcModel& model, double theta) {
  const std::size_t n = model.data.cols();
  out << "svcmodel v1 " << n << ' ' << model.sv.size() << '\n';
  out << "nu " << FormatDouble(model.nu) << '\n';
  out << "theta " << FormatDouble(theta) << '\n';
  out << "q";
  for (double v : model.q.data()) out << ' ' << FormatDouble(v);
  out << '\n';
  for (std::size_t i : model.sv) {
    out << i << ' ' << FormatDouble(model.alpha[i]);
    for (double v : model.data.row(i)) out << ' ' << FormatDouble(v);
    out << '\n';
  }
}

SvcModelFile ReadSvcModel(std::istream& in) {
  TokenReader reader(in);
  reader.Expect("svcmodel");
  reader.Expect("v1");
  const std::int64_t n = reader.NextInt();
  const std::int64_t count = reader.NextInt();
  if (n < 1 || count < 1) {
    throw Error(ErrorCode::kParseError, "bad svcmodel header");
  }
  SvcModelFile file;
  reader.Expect("nu");
  file.nu = reader.NextDouble();
  reader.Expect("theta");
  file.theta = reader.NextDouble();
  reader.Expect("q");
  file.q = Matrix(n, n);
  for (double& v : file.q.data()) v = reader.NextDouble();
  file.points = Matrix(count, n);
  for (std::int64_t i = 0; i < count; ++i) {
    file.indices.push_back(static_cast<std::size_t>(reader.NextInt()));
    file.alpha.push_back(reader.NextDouble());
    for (double& v : file.points.row(i)) v = reader.NextDouble();
  }
  if (!AllFinite(file.q.data()) || !AllFinite(file.points.data()) ||
      !AllFinite(file.alpha) || !std::isfinite(file.theta)) {
    throw Error(ErrorCode::kParseError, "non-finite value in svcmodel");
  }
  return file;
}

SvcUncertaintySet SetFromFile(const SvcModelFile& file, const Box& box) {
  SvcUncertaintySet set(file.q, file.points, file.alpha, file.theta, file.nu,
                        box, {});
  Vector seed = ChooseSeed(set, ColumnMeans(file.points));
  return SvcUncertaintySet(file.q, file.points, file.alpha, file.theta, file.nu,
                           box, std::move(seed));
}

}  // namespace uncset
