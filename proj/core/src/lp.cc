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
#include <ostream>
#include <string>

#include "uncset/error.h"
#include "uncset/text_io.h"

namespace uncset {

LinearProgram::LinearProgram(std::size_t num_vars, Sense s)
    : sense(s),
      objective(num_vars, 0.0),
      lower(num_vars, -kLpInfinity),
      upper(num_vars, kLpInfinity) {}

void LinearProgram::AddRow(std::span<const double> coeffs, RowType type,
                           double rhs) {
  if (coeffs.size() != num_vars()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "row has " + std::to_string(coeffs.size()) +
                    " coefficients, LP has " + std::to_string(num_vars()) +
                    " variables");
  }
  rows.push_back(LpRow{Vector(coeffs.begin(), coeffs.end()), type, rhs});
}

void LinearProgram::SetBounds(std::size_t j, double lo, double hi) {
  lower.at(j) = lo;
  upper.at(j) = hi;
}

void LinearProgram::Validate() const {
  const std::size_t n = num_vars();
  if (lower.size() != n || upper.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "bound vectors have wrong size");
  }
  if (!AllFinite(objective)) {
    throw Error(ErrorCode::kInvalidArgument, "objective is not finite");
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isnan(lower[j]) || std::isnan(upper[j]) ||
        lower[j] == kLpInfinity || upper[j] == -kLpInfinity) {
      throw Error(ErrorCode::kInvalidArgument,
                  "bad bounds on variable " + std::to_string(j));
    }
  }
  for (const LpRow& row : rows) {
    if (row.coeffs.size() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "row width mismatch");
    }
    if (!AllFinite(row.coeffs) || !std::isfinite(row.rhs)) {
      throw Error(ErrorCode::kInvalidArgument, "row is not finite");
    }
  }
}

const char* LpStatusName(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal:
      return "Optimal";
    case LpStatus::kInfeasible:
      return "Infeasible";
    case LpStatus::kUnbounded:
      return "Unbounded";
  }
  return "Unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kDegenerateStep = 1e-12;

enum class VarState : unsigned char { kBasic, kAtLower, kAtUpper };

// x_j = shift + sign * x'[col] - x'[neg_col] (neg_col only for free vars).
struct VarMap {
  int col = -1;
  int neg_col = -1;
  double shift = 0.0;
  double sign = 1.0;
};

// Internal form: min costᵀx' s.t. A x' = b, 0 <= x' <= upper, with one unit
// column per row forming the starting basis.
class Simplex {
 public:
  Simplex(const LinearProgram& lp, const LpOptions& options)
      : lp_(lp), options_(options) {}

  LpSolution Run();

 private:
  void Build();
  void ComputeReducedCosts();
  // Returns false when the current phase is unbounded.
  bool Iterate(bool phase_one);
  int ChooseEntering(bool phase_one, bool bland) const;
  void Pivot(int r, int q);
  void RecomputeBasicValues();
  double Value(int col) const;

  double& T(int i, int j) { return t_[static_cast<std::size_t>(i) * n_ + j]; }
  double T(int i, int j) const {
    return t_[static_cast<std::size_t>(i) * n_ + j];
  }

  const LinearProgram& lp_;
  const LpOptions& options_;

  std::vector<VarMap> var_map_;
  int num_structural_ = 0;
  int m_ = 0;
  int n_ = 0;
  std::vector<double> a_;  // sign-applied internal matrix, m x n
  std::vector<double> b_;
  std::vector<double> row_sign_;
  std::vector<int> unit_col_;
  std::vector<double> t_;
  std::vector<double> beta_;
  std::vector<double> cost_;
  std::vector<double> phase2_cost_;
  std::vector<double> d_;
  std::vector<double> upper_;
  std::vector<int> basis_;
  std::vector<VarState> state_;
  std::vector<char> artificial_;
  std::int64_t iterations_ = 0;
  bool infeasible_bounds_ = false;
};

void Simplex::Build() {
  const std::size_t n_orig = lp_.num_vars();
  const double obj_sign = lp_.sense == Sense::kMaximize ? -1.0 : 1.0;
  var_map_.resize(n_orig);
  std::vector<double> struct_upper;
  std::vector<double> struct_cost;
  for (std::size_t j = 0; j < n_orig; ++j) {
    const double lo = lp_.lower[j];
    const double hi = lp_.upper[j];
    VarMap& vm = var_map_[j];
    const double c = obj_sign * lp_.objective[j];
    if (std::isfinite(lo)) {
      if (hi < lo - options_.feasibility_tol) infeasible_bounds_ = true;
      vm.col = static_cast<int>(struct_upper.size());
      vm.shift = lo;
      vm.sign = 1.0;
      struct_upper.push_back(std::isfinite(hi) ? std::max(0.0, hi - lo)
                                               : kLpInfinity);
      struct_cost.push_back(c);
    } else if (std::isfinite(hi)) {
      vm.col = static_cast<int>(struct_upper.size());
      vm.shift = hi;
      vm.sign = -1.0;
      struct_upper.push_back(kLpInfinity);
      struct_cost.push_back(-c);
    } else {
      vm.col = static_cast<int>(struct_upper.size());
      vm.neg_col = vm.col + 1;
      struct_upper.push_back(kLpInfinity);
      struct_upper.push_back(kLpInfinity);
      struct_cost.push_back(c);
      struct_cost.push_back(-c);
    }
  }
  num_structural_ = static_cast<int>(struct_upper.size());
  m_ = static_cast<int>(lp_.rows.size());

  // Decide per row: sign and whether a slack or an artificial starts basic.
  std::vector<double> row_coeffs(num_structural_);
  std::vector<std::vector<double>> internal_rows(m_);
  std::vector<double> rhs(m_);
  int num_slacks = 0;
  int num_artificials = 0;
  std::vector<int> slack_kind(m_, 0);  // +1, -1 or 0 (none)
  std::vector<char> needs_artificial(m_, 0);
  row_sign_.assign(m_, 1.0);
  for (int i = 0; i < m_; ++i) {
    const LpRow& row = lp_.rows[i];
    std::fill(row_coeffs.begin(), row_coeffs.end(), 0.0);
    double b = row.rhs;
    for (std::size_t j = 0; j < n_orig; ++j) {
      const double a = row.coeffs[j];
      if (a == 0.0) continue;
      const VarMap& vm = var_map_[j];
      b -= a * vm.shift;
      row_coeffs[vm.col] += a * vm.sign;
      if (vm.neg_col >= 0) row_coeffs[vm.neg_col] -= a;
    }
    internal_rows[i] = row_coeffs;
    rhs[i] = b;
    switch (row.type) {
      case RowType::kLessEqual:
        slack_kind[i] = 1;
        ++num_slacks;
        if (b < 0) {
          row_sign_[i] = -1.0;
          needs_artificial[i] = 1;
        }
        break;
      case RowType::kGreaterEqual:
        slack_kind[i] = -1;
        ++num_slacks;
        if (b <= 0) {
          row_sign_[i] = -1.0;
        } else {
          needs_artificial[i] = 1;
        }
        break;
      case RowType::kEqual:
        needs_artificial[i] = 1;
        if (b < 0) row_sign_[i] = -1.0;
        break;
    }
    if (needs_artificial[i]) ++num_artificials;
  }

  n_ = num_structural_ + num_slacks + num_artificials;
  a_.assign(static_cast<std::size_t>(m_) * n_, 0.0);
  b_.assign(m_, 0.0);
  upper_.assign(n_, kLpInfinity);
  cost_.assign(n_, 0.0);
  phase2_cost_.assign(n_, 0.0);
  artificial_.assign(n_, 0);
  unit_col_.assign(m_, -1);
  for (int j = 0; j < num_structural_; ++j) {
    upper_[j] = struct_upper[j];
    phase2_cost_[j] = struct_cost[j];
  }
  int next_slack = num_structural_;
  int next_art = num_structural_ + num_slacks;
  for (int i = 0; i < m_; ++i) {
    const double s = row_sign_[i];
    double* a = &a_[static_cast<std::size_t>(i) * n_];
    for (int j = 0; j < num_structural_; ++j) a[j] = s * internal_rows[i][j];
    b_[i] = s * rhs[i];
    if (slack_kind[i] != 0) {
      a[next_slack] = s * slack_kind[i];
      if (!needs_artificial[i]) unit_col_[i] = next_slack;
      ++next_slack;
    }
    if (needs_artificial[i]) {
      a[next_art] = 1.0;
      artificial_[next_art] = 1;
      cost_[next_art] = 1.0;
      unit_col_[i] = next_art;
      ++next_art;
    }
  }

  t_ = a_;
  beta_ = b_;
  basis_ = unit_col_;
  state_.assign(n_, VarState::kAtLower);
  for (int i = 0; i < m_; ++i) state_[basis_[i]] = VarState::kBasic;
}

void Simplex::ComputeReducedCosts() {
  d_ = cost_;
  for (int i = 0; i < m_; ++i) {
    const double cb = cost_[basis_[i]];
    if (cb == 0.0) continue;
    const double* row = &t_[static_cast<std::size_t>(i) * n_];
    for (int j = 0; j < n_; ++j) d_[j] -= cb * row[j];
  }
  for (int i = 0; i < m_; ++i) d_[basis_[i]] = 0.0;
}

int Simplex::ChooseEntering(bool phase_one, bool bland) const {
  const double tol = options_.optimality_tol;
  int best = -1;
  double best_score = 0.0;
  for (int j = 0; j < n_; ++j) {
    if (state_[j] == VarState::kBasic) continue;
    if (!phase_one && artificial_[j]) continue;
    if (upper_[j] == 0.0) continue;
    double score = 0.0;
    if (state_[j] == VarState::kAtLower && d_[j] < -tol) {
      score = -d_[j];
    } else if (state_[j] == VarState::kAtUpper && d_[j] > tol) {
      score = d_[j];
    } else {
      continue;
    }
    if (bland) return j;
    if (score > best_score) {
      best_score = score;
      best = j;
    }
  }
  return best;
}

void Simplex::Pivot(int r, int q) {
  double* prow = &t_[static_cast<std::size_t>(r) * n_];
  const double inv = 1.0 / prow[q];
  for (int j = 0; j < n_; ++j) prow[j] *= inv;
  prow[q] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* row = &t_[static_cast<std::size_t>(i) * n_];
    const double f = row[q];
    if (f == 0.0) continue;
    for (int j = 0; j < n_; ++j) row[j] -= f * prow[j];
    row[q] = 0.0;
  }
  const double dq = d_[q];
  if (dq != 0.0) {
    for (int j = 0; j < n_; ++j) d_[j] -= dq * prow[j];
    d_[q] = 0.0;
  }
  basis_[r] = q;
}

bool Simplex::Iterate(bool phase_one) {
  std::int64_t degenerate_run = 0;
  while (true) {
    if (iterations_ >= options_.max_iterations) {
      throw Error(ErrorCode::kIterationLimit,
                  "simplex exceeded " +
                      std::to_string(options_.max_iterations) + " pivots");
    }
    const bool bland = degenerate_run >= options_.bland_after;
    const int q = ChooseEntering(phase_one, bland);
    if (q < 0) return true;
    const double dir = state_[q] == VarState::kAtLower ? 1.0 : -1.0;

    double step = upper_[q];  // bound flip distance
    int leave = -1;
    double leave_alpha = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double alpha = dir * T(i, q);
      double limit;
      if (alpha > kPivotTol) {
        limit = std::max(0.0, beta_[i]) / alpha;
      } else if (alpha < -kPivotTol && std::isfinite(upper_[basis_[i]])) {
        limit = std::max(0.0, upper_[basis_[i]] - beta_[i]) / -alpha;
      } else {
        continue;
      }
      bool take;
      if (limit < step - 1e-12) {
        take = true;
      } else if (limit <= step + 1e-12) {
        take = leave < 0 || (bland ? basis_[i] < basis_[leave]
                                   : std::abs(alpha) > std::abs(leave_alpha));
      } else {
        take = false;
      }
      if (take) {
        step = limit;
        leave = i;
        leave_alpha = alpha;
      }
    }
    if (leave < 0 && !std::isfinite(step)) return false;

    ++iterations_;
    degenerate_run = step <= kDegenerateStep ? degenerate_run + 1 : 0;
    if (step != 0.0) {
      for (int i = 0; i < m_; ++i) beta_[i] -= dir * step * T(i, q);
    }
    if (leave < 0) {
      state_[q] = state_[q] == VarState::kAtLower ? VarState::kAtUpper
                                                  : VarState::kAtLower;
      continue;
    }
    const double entering_value =
        (state_[q] == VarState::kAtLower ? 0.0 : upper_[q]) + dir * step;
    const int out = basis_[leave];
    state_[out] = leave_alpha > 0 ? VarState::kAtLower : VarState::kAtUpper;
    state_[q] = VarState::kBasic;
    Pivot(leave, q);
    beta_[leave] = entering_value;
  }
}

double Simplex::Value(int col) const {
  switch (state_[col]) {
    case VarState::kAtLower:
      return 0.0;
    case VarState::kAtUpper:
      return upper_[col];
    case VarState::kBasic:
      break;
  }
  for (int i = 0; i < m_; ++i) {
    if (basis_[i] == col) return beta_[i];
  }
  return 0.0;
}

void Simplex::RecomputeBasicValues() {
  // Columns unit_col_ started as the identity, so their tableau columns hold
  // the basis inverse.
  std::vector<double> eff = b_;
  for (int j = 0; j < n_; ++j) {
    if (state_[j] != VarState::kAtUpper) continue;
    for (int k = 0; k < m_; ++k) {
      eff[k] -= a_[static_cast<std::size_t>(k) * n_ + j] * upper_[j];
    }
  }
  for (int i = 0; i < m_; ++i) {
    double v = 0.0;
    for (int k = 0; k < m_; ++k) v += T(i, unit_col_[k]) * eff[k];
    beta_[i] = v;
  }
}

LpSolution Simplex::Run() {
  lp_.Validate();
  Build();
  LpSolution sol;
  if (infeasible_bounds_) {
    sol.status = LpStatus::kInfeasible;
    return sol;
  }

  // Phase one: drive the artificials to zero.
  ComputeReducedCosts();
  Iterate(/*phase_one=*/true);
  RecomputeBasicValues();
  double infeasibility = 0.0;
  double scale = 1.0;
  for (double b : b_) scale = std::max(scale, std::abs(b));
  for (int i = 0; i < m_; ++i) {
    if (artificial_[basis_[i]]) infeasibility += std::max(0.0, beta_[i]);
  }
  if (infeasibility > 10.0 * options_.feasibility_tol * scale) {
    sol.status = LpStatus::kInfeasible;
    sol.iterations = iterations_;
    return sol;
  }
  for (int j = 0; j < n_; ++j) {
    if (artificial_[j]) upper_[j] = 0.0;
  }
  // Pivot remaining zero-level artificials out where the row allows it.
  for (int i = 0; i < m_; ++i) {
    if (!artificial_[basis_[i]]) continue;
    int best = -1;
    double best_abs = kPivotTol;
    for (int j = 0; j < n_; ++j) {
      if (artificial_[j] || state_[j] == VarState::kBasic) continue;
      if (std::abs(T(i, j)) > best_abs) {
        best_abs = std::abs(T(i, j));
        best = j;
      }
    }
    if (best < 0) continue;  // redundant row
    const double value = Value(best);
    state_[basis_[i]] = VarState::kAtLower;
    state_[best] = VarState::kBasic;
    Pivot(i, best);
    beta_[i] = value;
  }

  cost_ = phase2_cost_;
  ComputeReducedCosts();
  const bool bounded = Iterate(/*phase_one=*/false);
  sol.iterations = iterations_;
  if (!bounded) {
    sol.status = LpStatus::kUnbounded;
    return sol;
  }
  RecomputeBasicValues();

  std::vector<double> internal(n_);
  for (int j = 0; j < n_; ++j) {
    internal[j] = state_[j] == VarState::kAtUpper ? upper_[j] : 0.0;
  }
  for (int i = 0; i < m_; ++i) internal[basis_[i]] = beta_[i];

  const std::size_t n_orig = lp_.num_vars();
  sol.x.assign(n_orig, 0.0);
  for (std::size_t j = 0; j < n_orig; ++j) {
    const VarMap& vm = var_map_[j];
    double v = vm.shift + vm.sign * std::max(0.0, internal[vm.col]);
    if (vm.neg_col >= 0) v -= std::max(0.0, internal[vm.neg_col]);
    // Clamp tiny excursions outside the box.
    v = std::clamp(v, lp_.lower[j], lp_.upper[j]);
    sol.x[j] = v;
  }
  sol.objective = Dot(lp_.objective, sol.x);
  sol.status = LpStatus::kOptimal;

  // y = c_Bᵀ B⁻¹ on the sign-applied rows, mapped back to the caller's
  // rows and sense.
  const double obj_sign = lp_.sense == Sense::kMaximize ? -1.0 : 1.0;
  sol.row_duals.assign(m_, 0.0);
  for (int k = 0; k < m_; ++k) {
    double y = 0.0;
    for (int i = 0; i < m_; ++i) {
      const double cb = cost_[basis_[i]];
      if (cb != 0.0) y += cb * T(i, unit_col_[k]);
    }
    sol.row_duals[k] = obj_sign * row_sign_[k] * y;
  }
  sol.reduced_costs = lp_.objective;
  for (int k = 0; k < m_; ++k) {
    Axpy(-sol.row_duals[k], lp_.rows[k].coeffs, sol.reduced_costs);
  }
  return sol;
}

}  // namespace

LpSolution SolveLp(const LinearProgram& lp, const LpOptions& options) {
  return Simplex(lp, options).Run();
}

LpSolution SolveLpViaDual(const LinearProgram& lp, const LpOptions& options) {
  lp.Validate();
  const std::size_t n = lp.num_vars();
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(lp.lower[j]) || !std::isfinite(lp.upper[j])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "SolveLpViaDual needs finite bounds on every variable");
    }
    if (lp.lower[j] > lp.upper[j] + options.feasibility_tol) {
      return LpSolution{LpStatus::kInfeasible, {}, 0.0, 0, {}, {}};
    }
  }
  // Minimization form: min cᵀx, rows, l <= x <= u. Its dual is
  //   max Σ b_i y_i + lᵀs - uᵀt  s.t.  Σ y_i a_i + s - t = c,
  // with y_i <= 0 on <= rows, >= 0 on >= rows, free on = rows, s, t >= 0.
  const double obj_sign = lp.sense == Sense::kMaximize ? -1.0 : 1.0;
  const std::size_t m = lp.rows.size();
  const std::size_t dual_vars = m + 2 * n;
  LinearProgram dual(dual_vars, Sense::kMaximize);
  for (std::size_t i = 0; i < m; ++i) {
    dual.objective[i] = lp.rows[i].rhs;
    switch (lp.rows[i].type) {
      case RowType::kLessEqual:
        dual.SetBounds(i, -kLpInfinity, 0.0);
        break;
      case RowType::kGreaterEqual:
        dual.SetBounds(i, 0.0, kLpInfinity);
        break;
      case RowType::kEqual:
        break;
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    dual.objective[m + j] = lp.lower[j];
    dual.objective[m + n + j] = -lp.upper[j];
    dual.SetBounds(m + j, 0.0, kLpInfinity);
    dual.SetBounds(m + n + j, 0.0, kLpInfinity);
  }
  Vector coeffs(dual_vars, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(coeffs.begin(), coeffs.end(), 0.0);
    for (std::size_t i = 0; i < m; ++i) coeffs[i] = lp.rows[i].coeffs[j];
    coeffs[m + j] = 1.0;
    coeffs[m + n + j] = -1.0;
    dual.AddRow(coeffs, RowType::kEqual, obj_sign * lp.objective[j]);
  }
  const LpSolution dsol = SolveLp(dual, options);
  LpSolution sol;
  sol.iterations = dsol.iterations;
  if (dsol.status == LpStatus::kUnbounded) {
    sol.status = LpStatus::kInfeasible;
    return sol;
  }
  if (dsol.status == LpStatus::kInfeasible) {
    // Cannot happen with finite bounds; report it as numerical trouble.
    throw Error(ErrorCode::kIterationLimit, "dual LP reported infeasible");
  }
  sol.status = LpStatus::kOptimal;
  sol.x.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    sol.x[j] = std::clamp(dsol.row_duals[j], lp.lower[j], lp.upper[j]);
  }
  sol.objective = Dot(lp.objective, sol.x);
  sol.row_duals.resize(m);
  for (std::size_t i = 0; i < m; ++i) sol.row_duals[i] = obj_sign * dsol.x[i];
  sol.reduced_costs = lp.objective;
  for (std::size_t i = 0; i < m; ++i) {
    Axpy(-sol.row_duals[i], lp.rows[i].coeffs, sol.reduced_costs);
  }
  return sol;
}

double DualBound(const LinearProgram& lp, const LpSolution& solution) {
  const bool maximize = lp.sense == Sense::kMaximize;
  double bound = 0.0;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    bound += solution.row_duals[i] * lp.rows[i].rhs;
  }
  Vector z = lp.objective;
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    Axpy(-solution.row_duals[i], lp.rows[i].coeffs, z);
  }
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    if (std::abs(z[j]) <= 1e-12) continue;
    const bool use_lower = maximize ? z[j] < 0 : z[j] > 0;
    bound += z[j] * (use_lower ? lp.lower[j] : lp.upper[j]);
  }
  return bound;
}

double MaxViolation(const LinearProgram& lp, std::span<const double> x) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    worst = std::max({worst, lp.lower[j] - x[j], x[j] - lp.upper[j]});
  }
  for (const LpRow& row : lp.rows) {
    const double lhs = Dot(row.coeffs, x);
    switch (row.type) {
      case RowType::kLessEqual:
        worst = std::max(worst, lhs - row.rhs);
        break;
      case RowType::kGreaterEqual:
        worst = std::max(worst, row.rhs - lhs);
        break;
      case RowType::kEqual:
        worst = std::max(worst, std::abs(lhs - row.rhs));
        break;
    }
  }
  return worst;
}

void DumpLp(std::ostream& out, const LinearProgram& lp) {
  out << (lp.sense == Sense::kMaximize ? "max" : "min");
  for (double c : lp.objective) out << ' ' << FormatDouble(c);
  out << '\n';
  for (const LpRow& row : lp.rows) {
    for (double a : row.coeffs) out << FormatDouble(a) << ' ';
    out << (row.type == RowType::kLessEqual ? "<="
            : row.type == RowType::kEqual   ? "="
                                            : ">=")
        << ' ' << FormatDouble(row.rhs) << '\n';
  }
  out << "bounds";
  for (std::size_t j = 0; j < lp.num_vars(); ++j) {
    out << " [" << FormatDouble(lp.lower[j]) << ',' << FormatDouble(lp.upper[j])
        << ']';
  }
  out << '\n';
}

}  // namespace uncset
