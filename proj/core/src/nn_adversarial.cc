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

#include "uncset/nn_adversarial.h"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "uncset/error.h"
#include "uncset/thread_pool.h"

namespace uncset {
namespace {

double TieTolerance(double value) {
  return 1e-9 * std::max(1.0, std::abs(value));
}

// True if (value, pattern) should replace the incumbent.
bool Better(double value, const ActivationPattern& pattern,
            const AdversarialResult& best) {
  if (best.status != AdversarialStatus::kOptimal) return true;
  const double tie = TieTolerance(best.value);
  if (value > best.value + tie) return true;
  return value >= best.value - tie && pattern < best.pattern;
}

Vector PadRow(std::span<const double> coeffs, std::size_t width) {
  Vector row(width, 0.0);
  std::copy(coeffs.begin(), coeffs.end(), row.begin());
  return row;
}

// g^T c <= h in input space.
struct HalfSpace {
  Vector g;
  double h;
};

// Maximizes x^T c over {c : ||A c + a||_2 <= R} with the constraints that are
// tight at `hint` treated as equalities. Constraints whose multipliers come
// out negative are released. Returns the point only if it satisfies every
// constraint and the KKT conditions, i.e. it is the exact optimum.
class BallPolisher {
 public:
  BallPolisher(const Matrix& a, const Vector& shift, double radius) {
    const Matrix h = Multiply(a.Transposed(), a);
    try {
      chol_ = Cholesky(h);
    } catch (const Error&) {
      return;  // rank-deficient map: no polishing
    }
    center_ = CholeskySolve(*chol_, TransposeMatVec(a, shift));
    for (double& v : center_) v = -v;
    Vector r = MatVec(a, center_);
    Axpy(1.0, shift, r);
    rho2_ = radius * radius - Dot(r, r);
  }

  std::optional<Vector> Polish(std::span<const double> x,
                               const std::vector<HalfSpace>& cons,
                               const Vector& hint) const {
    if (!chol_ || rho2_ <= 0.0) return std::nullopt;
    const std::size_t n = x.size();
    const double c_scale = 1.0 + MaxAbs(hint);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < cons.size(); ++i) {
      const double slack = cons[i].h - Dot(cons[i].g, hint);
      if (slack <=
          1e-7 * (1.0 + std::abs(cons[i].h) + MaxAbs(cons[i].g) * c_scale)) {
        active.push_back(i);
      }
    }
    const Vector u = CholeskySolve(*chol_, x);
    while (active.size() < n) {
      const std::size_t k = active.size();
      // Y = H^-1 E^T, S = E Y.
      std::vector<Vector> y(k);
      for (std::size_t i = 0; i < k; ++i) {
        y[i] = CholeskySolve(*chol_, cons[active[i]].g);
      }
      Matrix s(k, k);
      Vector eu(k), rf(k);
      for (std::size_t i = 0; i < k; ++i) {
        const Vector& g = cons[active[i]].g;
        for (std::size_t j = 0; j < k; ++j) s(i, j) = Dot(g, y[j]);
        eu[i] = Dot(g, u);
        rf[i] = cons[active[i]].h - Dot(g, center_);
      }
      Vector t1, t2;
      if (k > 0) {
        Matrix ls;
        try {
          ls = Cholesky(s);
        } catch (const Error&) {
          return std::nullopt;
        }
        t1 = CholeskySolve(ls, eu);
        t2 = CholeskySolve(ls, rf);
      }
      Vector p = u, q(n, 0.0);
      for (std::size_t i = 0; i < k; ++i) {
        Axpy(-t1[i], y[i], p);
        Axpy(t2[i], y[i], q);
      }
      const double php = Dot(x, p);
      const double qhq = k > 0 ? Dot(t2, rf) : 0.0;
      if (!(php > 1e-14 * Dot(x, u)) || !(rho2_ - qhq > 0.0)) {
        return std::nullopt;
      }
      const double step = std::sqrt((rho2_ - qhq) / php);
      std::size_t worst = k;
      double worst_mu = 0.0;
      double mu_scale = 0.0;
      for (std::size_t i = 0; i < k; ++i) {
        const double mu = t1[i] - t2[i] / step;
        mu_scale = std::max(mu_scale, std::abs(mu));
        if (mu < worst_mu) {
          worst_mu = mu;
          worst = i;
        }
      }
      if (worst < k && worst_mu < -1e-9 * (1.0 + mu_scale)) {
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(worst));
        continue;
      }
      Vector c = center_;
      Axpy(step, p, c);
      Axpy(1.0, q, c);
      const double cs = 1.0 + MaxAbs(c);
      for (const HalfSpace& hs : cons) {
        if (Dot(hs.g, c) - hs.h >
            1e-9 * (1.0 + std::abs(hs.h) + MaxAbs(hs.g) * cs)) {
          return std::nullopt;
        }
      }
      return c;
    }
    return std::nullopt;
  }

 private:
  std::optional<Matrix> chol_;
  Vector center_;  // minimizer of ||A c + a||
  double rho2_ = 0.0;
};

}  // namespace

bool Box::Contains(std::span<const double> c, double tol) const {
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] < lower[i] - tol || c[i] > upper[i] + tol) return false;
  }
  return true;
}

Box DataBox(const Matrix& data, double inflate) {
  if (data.rows() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "no data for the box");
  }
  Box box{data.RowVector(0), data.RowVector(0)};
  for (std::size_t i = 1; i < data.rows(); ++i) {
    for (std::size_t j = 0; j < data.cols(); ++j) {
      box.lower[j] = std::min(box.lower[j], data(i, j));
      box.upper[j] = std::max(box.upper[j], data(i, j));
    }
  }
  for (std::size_t j = 0; j < data.cols(); ++j) {
    const double width = box.upper[j] - box.lower[j];
    const double pad = width > 0.0 ? 0.5 * inflate * width : inflate;
    box.lower[j] -= pad;
    box.upper[j] += pad;
  }
  return box;
}

RegionOptimum MaximizeOverRegion(std::span<const double> x,
                                 const AffineRegion& region,
                                 const NetworkSet& set, const Box& box,
                                 const RegionSolveOptions& options,
                                 double prune_below) {
  const std::size_t n = x.size();
  const Matrix& map = region.output_map();
  if (map.cols() != n || box.lower.size() != n || box.upper.size() != n ||
      set.center.size() != map.rows()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "objective, region, box and center disagree in size");
  }
  if (set.norm == NormKind::kInf) {
    throw Error(ErrorCode::kInvalidArgument, "only l1 and l2 sets supported");
  }
  const Vector shift = Subtract(region.output_offset(), set.center);
  const std::size_t d = map.rows();
  const double radius = set.radius;
  const bool exact_l1 = set.norm == NormKind::kL1 && radius > 0.0;
  const std::size_t vars = n + (exact_l1 ? d : 0);

  LinearProgram lp(vars, Sense::kMaximize);
  for (std::size_t j = 0; j < n; ++j) {
    lp.objective[j] = x[j];
    lp.SetBounds(j, box.lower[j], box.upper[j]);
  }
  for (const LinearRow& row : region.rows) {
    lp.AddRow(PadRow(row.coeffs, vars), RowType::kLessEqual, row.rhs);
  }
  if (radius == 0.0) {
    for (std::size_t i = 0; i < d; ++i) {
      lp.AddRow(map.row(i), RowType::kEqual, -shift[i]);
    }
  } else if (exact_l1) {
    // -v <= map c + shift <= v, sum v <= R.
    Vector sum(vars, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      lp.SetBounds(n + i, 0.0, radius);
      sum[n + i] = 1.0;
      Vector row = PadRow(map.row(i), vars);
      row[n + i] = -1.0;
      lp.AddRow(row, RowType::kLessEqual, -shift[i]);
      for (std::size_t j = 0; j < n; ++j) row[j] = -row[j];
      lp.AddRow(row, RowType::kLessEqual, shift[i]);
    }
    lp.AddRow(sum, RowType::kLessEqual, radius);
  }

  std::optional<BallPolisher> polisher;
  std::vector<HalfSpace> cons;
  if (!exact_l1 && radius > 0.0) {
    polisher.emplace(map, shift, radius);
    for (const LinearRow& row : region.rows)
      cons.push_back({row.coeffs, row.rhs});
    for (std::size_t j = 0; j < n; ++j) {
      Vector e(n, 0.0);
      e[j] = 1.0;
      cons.push_back({e, box.upper[j]});
      e[j] = -1.0;
      cons.push_back({e, -box.lower[j]});
    }
  }

  RegionOptimum out;
  while (true) {
    const LpSolution sol = SolveLpViaDual(lp, options.lp);
    if (sol.status != LpStatus::kOptimal) {
      out.status = RegionOptimum::Status::kInfeasible;
      return out;
    }
    out.c.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(n));
    out.value = Dot(x, out.c);
    if (out.value < prune_below) {
      out.status = RegionOptimum::Status::kPruned;
      return out;
    }
    if (radius == 0.0 || exact_l1) break;
    Vector r = MatVec(map, out.c);
    Axpy(1.0, shift, r);
    const double norm = Norm(r, NormKind::kL2);
    if (norm - radius <= options.cut_tol) break;
    if (auto polished = polisher->Polish(x, cons, out.c)) {
      out.c = std::move(*polished);
      out.value = Dot(x, out.c);
      break;
    }
    if (out.cuts >= options.max_cuts) {
      throw Error(ErrorCode::kCutLimit, "ball constraint still violated by " +
                                            std::to_string(norm - radius) +
                                            " after " +
                                            std::to_string(out.cuts) + " cuts");
    }
    // u^T (map c + shift) <= R with u the unit residual.
    for (double& v : r) v /= norm;
    lp.AddRow(TransposeMatVec(map, r), RowType::kLessEqual,
              radius - Dot(r, shift));
    ++out.cuts;
  }
  out.status = RegionOptimum::Status::kOptimal;
  return out;
}

std::vector<ActivationPattern> CollectPatterns(const PwaNetwork& net,
                                               const Matrix& data) {
  std::vector<ActivationPattern> patterns;
  patterns.reserve(data.rows());
  for (std::size_t i = 0; i < data.rows(); ++i) {
    patterns.push_back(PatternOf(net, data.row(i)));
  }
  std::sort(patterns.begin(), patterns.end());
  patterns.erase(std::unique(patterns.begin(), patterns.end()), patterns.end());
  return patterns;
}

AdversarialResult AdversarialDecomposed(
    std::span<const double> x, const NetworkSet& set, const Box& box,
    const std::vector<ActivationPattern>& patterns,
    const DecomposedOptions& options) {
  AdversarialResult best;
  const std::size_t batch = std::max<std::size_t>(1, options.batch_size);
  const int threads =
      options.threads > 0 ? options.threads : ConfiguredThreads();
  std::vector<std::optional<RegionOptimum>> results;
  std::vector<char> failed;
  for (std::size_t start = 0; start < patterns.size(); start += batch) {
    const std::size_t count = std::min(batch, patterns.size() - start);
    const double prune_below = best.status == AdversarialStatus::kOptimal
                                   ? best.value - TieTolerance(best.value)
                                   : -std::numeric_limits<double>::infinity();
    results.assign(count, std::nullopt);
    failed.assign(count, 0);
    ParallelFor(
        count,
        [&](std::size_t k) {
          const AffineRegion region =
              RegionOf(set.network, patterns[start + k]);
          try {
            results[k] = MaximizeOverRegion(x, region, set, box, options.region,
                                            prune_below);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kCutLimit) throw;
            failed[k] = 1;
          }
        },
        threads);
    for (std::size_t k = 0; k < count; ++k) {
      ++best.subproblems;
      if (failed[k]) {
        ++best.failed_subproblems;
        continue;
      }
      const RegionOptimum& r = *results[k];
      if (r.status != RegionOptimum::Status::kOptimal) continue;
      if (Better(r.value, patterns[start + k], best)) {
        best.status = AdversarialStatus::kOptimal;
        best.value = r.value;
        best.scenario = r.c;
        best.pattern = patterns[start + k];
      }
    }
  }
  return best;
}

namespace {

std::uint64_t SaturatingPow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t out = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && out > UINT64_MAX / base) return UINT64_MAX;
    out *= base;
  }
  return out;
}

class ExactSearch {
 public:
  ExactSearch(std::span<const double> x, const NetworkSet& set, const Box& box,
              const RegionSolveOptions& options)
      : x_(x), set_(set), box_(box), options_(options) {}

  AdversarialResult Run() {
    pattern_.pieces.assign(1, {});
    const AffineRegion root =
        PartialRegionOf(set_.network, ActivationPattern{});
    // Unconstrained LP point as the first branching hint.
    LinearProgram lp = BaseLp();
    const LpSolution sol = SolveLpViaDual(lp, options_.lp);
    ++best_.subproblems;
    if (sol.status != LpStatus::kOptimal) return best_;
    Visit(0, 0, root.maps.back(), root.offsets.back(), sol.x);
    return best_;
  }

 private:
  LinearProgram BaseLp() const {
    LinearProgram lp(x_.size(), Sense::kMaximize);
    for (std::size_t j = 0; j < x_.size(); ++j) {
      lp.objective[j] = x_[j];
      lp.SetBounds(j, box_.lower[j], box_.upper[j]);
    }
    for (const LinearRow& row : rows_) {
      lp.AddRow(row.coeffs, RowType::kLessEqual, row.rhs);
    }
    return lp;
  }

  double PruneLevel() const {
    return best_.status == AdversarialStatus::kOptimal
               ? best_.value - TieTolerance(best_.value)
               : -std::numeric_limits<double>::infinity();
  }

  void Leaf() {
    const AffineRegion region = RegionOf(set_.network, pattern_);
    ++best_.subproblems;
    RegionOptimum r;
    try {
      r = MaximizeOverRegion(x_, region, set_, box_, options_, PruneLevel());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kCutLimit) throw;
      ++best_.failed_subproblems;
      return;
    }
    if (r.status != RegionOptimum::Status::kOptimal) return;
    if (Better(r.value, pattern_, best_)) {
      best_.status = AdversarialStatus::kOptimal;
      best_.value = r.value;
      best_.scenario = r.c;
      best_.pattern = pattern_;
    }
  }

  // Layer l, neuron j; `map`/`offset` give layer l's preactivation.
  void Visit(std::size_t l, std::size_t j, const Matrix& map,
             const Vector& offset, const Vector& hint) {
    const PwaNetwork& net = set_.network;
    if (j == net.width(l)) {
      if (l + 1 == net.depth()) {
        Leaf();
        return;
      }
      const AffineRegion next = PartialRegionOf(net, pattern_);
      pattern_.pieces.emplace_back();
      Visit(l + 1, 0, next.maps.back(), next.offsets.back(), hint);
      pattern_.pieces.pop_back();
      return;
    }
    const PwaActivation& act = net.layer(l).activation;
    const int k = act.num_pieces();
    if (k == 1) {
      pattern_.pieces[l].push_back(0);
      Visit(l, j + 1, map, offset, hint);
      pattern_.pieces[l].pop_back();
      return;
    }
    const double pre = Dot(map.row(j), hint) + offset[j];
    const int first = act.PieceOf(pre);
    std::vector<int> order{first};
    for (int p = 0; p < k; ++p) {
      if (p != first) order.push_back(p);
    }
    const auto coeffs = map.row(j);
    for (const int p : order) {
      const std::size_t saved = rows_.size();
      if (std::isfinite(act.lower(p))) {
        Vector neg(coeffs.size());
        for (std::size_t t = 0; t < neg.size(); ++t) neg[t] = -coeffs[t];
        rows_.push_back(
            LinearRow{std::move(neg), offset[j] - act.lower(p), l, j, false});
      }
      if (std::isfinite(act.upper(p))) {
        rows_.push_back(LinearRow{Vector(coeffs.begin(), coeffs.end()),
                                  act.upper(p) - offset[j], l, j, true});
      }
      const LpSolution sol = SolveLpViaDual(BaseLp(), options_.lp);
      ++best_.subproblems;
      if (sol.status == LpStatus::kOptimal && sol.objective >= PruneLevel()) {
        pattern_.pieces[l].push_back(p);
        Visit(l, j + 1, map, offset, sol.x);
        pattern_.pieces[l].pop_back();
      }
      rows_.resize(saved);
    }
  }

  std::span<const double> x_;
  const NetworkSet& set_;
  const Box& box_;
  const RegionSolveOptions& options_;
  ActivationPattern pattern_;
  std::vector<LinearRow> rows_;
  AdversarialResult best_;
};

}  // namespace

AdversarialResult AdversarialExact(std::span<const double> x,
                                   const NetworkSet& set, const Box& box,
                                   const RegionSolveOptions& options) {
  const PwaNetwork& net = set.network;
  if (x.size() != net.input_dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "objective has wrong size");
  }
  std::uint64_t patterns = 1;
  for (const Layer& layer : net.layers()) {
    const std::uint64_t per_layer =
        SaturatingPow(static_cast<std::uint64_t>(layer.activation.num_pieces()),
                      layer.weights.rows());
    patterns = per_layer != 0 && patterns > UINT64_MAX / per_layer
                   ? UINT64_MAX
                   : patterns * per_layer;
  }
  const std::uint64_t estimate = std::min(patterns, RegionCountBound(net));
  if (estimate > kExactPatternLimit) {
    throw Error(ErrorCode::kTooLarge, "exact search would enumerate up to " +
                                          std::to_string(estimate) +
                                          " regions");
  }
  return ExactSearch(x, set, box, options).Run();
}

NnUncertaintySet::NnUncertaintySet(NetworkSet set, const Matrix& data,
                                   NnOracle oracle)
    : set_(std::move(set)),
      box_(DataBox(data)),
      patterns_(CollectPatterns(set_.network, data)),
      oracle_(oracle) {
  double best_radius = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double r =
        RadiusOf(set_.network, set_.center, set_.norm, data.row(i));
    if (r <= set_.radius && r < best_radius) {
      best_radius = r;
      seed_ = data.RowVector(i);
    }
  }
  if (seed_.empty()) seed_ = ColumnMeans(data);
}

NnUncertaintySet::NnUncertaintySet(NetworkSet set, Box box,
                                   std::vector<ActivationPattern> patterns,
                                   Vector seed, NnOracle oracle)
    : set_(std::move(set)),
      box_(std::move(box)),
      patterns_(std::move(patterns)),
      seed_(std::move(seed)),
      oracle_(oracle) {
  std::sort(patterns_.begin(), patterns_.end());
  patterns_.erase(std::unique(patterns_.begin(), patterns_.end()),
                  patterns_.end());
}

AdversarialResult NnUncertaintySet::Adversarial(
    std::span<const double> x) const {
  if (oracle_ == NnOracle::kExact) {
    return AdversarialExact(x, set_, box_, options_.region);
  }
  return AdversarialDecomposed(x, set_, box_, patterns_, options_);
}

bool NnUncertaintySet::Contains(std::span<const double> c, double tol) const {
  return box_.Contains(c, tol) &&
         RadiusOf(set_.network, set_.center, set_.norm, c) <= set_.radius + tol;
}

}  // namespace uncset
