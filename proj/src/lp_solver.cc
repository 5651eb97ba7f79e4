/*
 * Copyright 2026 The symcorr Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "symcorr/lp_solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace symcorr {
namespace {

constexpr double kPivotTolerance = 1e-9;
constexpr double kCostTolerance = 1e-10;
constexpr double kPhaseOneTolerance = 1e-9;
constexpr int kDegenerateStreakForBland = 50;

// Primal row a.x >= d (or = d), normalized to unit infinity norm.
struct PrimalRow {
  Eigen::VectorXd a;
  double d = 0.0;
  bool equality = false;
};

// Collects the LP rows of a system. Returns false when a constant constraint
// is violated, in which case the system is infeasible outright.
bool CollectRows(const ConstraintSystem& sys, double epsilon_strict,
                 std::vector<PrimalRow>& rows) {
  if (sys.HasConstantFalse()) return false;
  const int n = sys.dim();
  auto push = [&rows](Eigen::VectorXd a, double d, bool equality) {
    const double scale = a.cwiseAbs().maxCoeff();
    rows.push_back(PrimalRow{a / scale, d / scale, equality});
  };
  for (const LinearConstraint& c : sys.constraints()) {
    if (c.IsConstant()) {
      if (!c.ConstantHolds()) return false;
      continue;
    }
    switch (c.rel) {
      case Relation::kGe: push(c.coeffs, -c.offset, false); break;
      case Relation::kGt: push(c.coeffs, epsilon_strict - c.offset, false); break;
      case Relation::kEq: push(c.coeffs, -c.offset, true); break;
    }
  }
  if (sys.bounds()) {
    const Bounds& b = *sys.bounds();
    for (int j = 0; j < n; ++j) {
      if (b.lo[j] > b.hi[j]) return false;
      if (std::isfinite(b.lo[j])) {
        rows.push_back(PrimalRow{Eigen::VectorXd::Unit(n, j), b.lo[j], false});
      }
      if (std::isfinite(b.hi[j])) {
        rows.push_back(PrimalRow{-Eigen::VectorXd::Unit(n, j), -b.hi[j], false});
      }
    }
  }
  return true;
}

enum class DualOutcome { kOptimal, kDualInfeasible, kDualUnbounded };

// Two-phase tableau simplex on  min -d.y  s.t.  M y = sigma*c,  y >= 0.
class DualSimplex {
 public:
  DualSimplex(const std::vector<PrimalRow>& rows, const Eigen::VectorXd& c,
              int max_iterations)
      : n_(static_cast<int>(c.size())), max_iterations_(max_iterations) {
    for (const PrimalRow& row : rows) {
      columns_.push_back(row.a);
      costs_.push_back(-row.d);
      if (row.equality) {
        columns_.push_back(-row.a);
        costs_.push_back(row.d);
      }
    }
    k_ = static_cast<int>(columns_.size());
    width_ = k_ + n_ + 1;
    sigma_.assign(n_, 1.0);
    tableau_.assign(static_cast<std::size_t>(n_) * width_, 0.0);
    for (int r = 0; r < n_; ++r) {
      sigma_[r] = c[r] < 0.0 ? -1.0 : 1.0;
      for (int j = 0; j < k_; ++j) At(r, j) = sigma_[r] * columns_[j][r];
      At(r, k_ + r) = 1.0;
      At(r, width_ - 1) = sigma_[r] * c[r];
    }
    basis_.resize(n_);
    for (int r = 0; r < n_; ++r) basis_[r] = k_ + r;
  }

  DualOutcome Solve() {
    // Phase one: minimize the sum of artificials.
    std::vector<double> phase1(width_ - 1, 0.0);
    for (int r = 0; r < n_; ++r) phase1[k_ + r] = 1.0;
    if (!Iterate(phase1, /*allow_artificials=*/true)) {
      throw SolverError("phase one reported unbounded");
    }
    double infeasibility = 0.0;
    for (int r = 0; r < n_; ++r) {
      if (basis_[r] >= k_) infeasibility += At(r, width_ - 1);
    }
    double scale = 1.0;
    for (int r = 0; r < n_; ++r) scale = std::max(scale, std::abs(At(r, width_ - 1)));
    if (infeasibility > kPhaseOneTolerance * scale) {
      return DualOutcome::kDualInfeasible;
    }
    DriveOutArtificials();
    std::vector<double> phase2(width_ - 1, 0.0);
    for (int j = 0; j < k_; ++j) phase2[j] = costs_[j];
    if (!Iterate(phase2, /*allow_artificials=*/false)) {
      return DualOutcome::kDualUnbounded;
    }
    return DualOutcome::kOptimal;
  }

  // Primal point from the simplex multipliers of the final basis.
  Eigen::VectorXd PrimalPoint() const {
    Eigen::VectorXd x(n_);
    for (int col = 0; col < n_; ++col) {
      double pi = 0.0;
      for (int r = 0; r < n_; ++r) {
        const int b = basis_[r];
        const double cb = b < k_ ? costs_[b] : 0.0;
        pi += cb * At(r, k_ + col);
      }
      x[col] = -sigma_[col] * pi;
    }
    return x;
  }

 private:
  double& At(int r, int j) { return tableau_[static_cast<std::size_t>(r) * width_ + j]; }
  double At(int r, int j) const { return tableau_[static_cast<std::size_t>(r) * width_ + j]; }

  void Pivot(int row, int col) {
    const double p = At(row, col);
    for (int j = 0; j < width_; ++j) At(row, j) /= p;
    At(row, col) = 1.0;
    for (int r = 0; r < n_; ++r) {
      if (r == row) continue;
      const double f = At(r, col);
      if (f == 0.0) continue;
      for (int j = 0; j < width_; ++j) At(r, j) -= f * At(row, j);
      At(r, col) = 0.0;
    }
    basis_[row] = col;
  }

  // Returns false on an unbounded direction.
  bool Iterate(const std::vector<double>& cost, bool allow_artificials) {
    const int last = allow_artificials ? k_ + n_ : k_;
    std::vector<double> reduced(last);
    int degenerate_streak = 0;
    for (int iter = 0; iter < max_iterations_; ++iter) {
      // Reduced costs: cost_j - c_B . column_j.
      for (int j = 0; j < last; ++j) reduced[j] = cost[j];
      for (int r = 0; r < n_; ++r) {
        const double cb = cost[basis_[r]];
        if (cb == 0.0) continue;
        for (int j = 0; j < last; ++j) reduced[j] -= cb * At(r, j);
      }
      const bool bland = degenerate_streak >= kDegenerateStreakForBland;
      int enter = -1;
      double best = -kCostTolerance;
      for (int j = 0; j < last; ++j) {
        if (IsBasic(j)) continue;
        if (reduced[j] < best) {
          enter = j;
          if (bland) break;
          best = reduced[j];
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (int r = 0; r < n_; ++r) {
        const double a = At(r, enter);
        if (a <= kPivotTolerance) continue;
        const double ratio = At(r, width_ - 1) / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio <= best_ratio + 1e-12 && leave >= 0 &&
             (bland ? basis_[r] < basis_[leave] : a > At(leave, enter)))) {
          best_ratio = ratio;
          leave = r;
        }
      }
      if (leave < 0) return false;
      degenerate_streak = best_ratio <= 1e-12 ? degenerate_streak + 1 : 0;
      Pivot(leave, enter);
      for (int r = 0; r < n_; ++r) {
        if (At(r, width_ - 1) < 0.0 && At(r, width_ - 1) > -1e-11) At(r, width_ - 1) = 0.0;
      }
    }
    throw SolverError("simplex iteration limit reached");
  }

  bool IsBasic(int j) const {
    return std::find(basis_.begin(), basis_.end(), j) != basis_.end();
  }

  void DriveOutArtificials() {
    for (int r = 0; r < n_; ++r) {
      if (basis_[r] < k_) continue;
      At(r, width_ - 1) = 0.0;
      int best = -1;
      double best_abs = kPivotTolerance;
      for (int j = 0; j < k_; ++j) {
        if (IsBasic(j)) continue;
        if (std::abs(At(r, j)) > best_abs) {
          best_abs = std::abs(At(r, j));
          best = j;
        }
      }
      // A row with no usable entry is redundant; its artificial stays basic
      // at zero and never moves.
      if (best >= 0) Pivot(r, best);
    }
  }

  int n_ = 0;
  int k_ = 0;
  int width_ = 0;
  int max_iterations_ = 0;
  std::vector<Eigen::VectorXd> columns_;
  std::vector<double> costs_;
  std::vector<double> sigma_;
  std::vector<double> tableau_;
  std::vector<int> basis_;
};

void CheckWitness(const ConstraintSystem& sys, const Eigen::VectorXd& x,
                  const SolverOptions& options) {
  if (!x.allFinite()) throw SolverError("solver produced a non-finite point");
  for (const LinearConstraint& c : sys.constraints()) {
    if (c.IsConstant()) continue;
    const double tol = options.feasibility_tolerance *
                       std::max(1.0, c.coeffs.cwiseAbs().maxCoeff());
    const double value = c.Evaluate(x);
    bool ok = true;
    switch (c.rel) {
      case Relation::kGe: ok = value >= -tol; break;
      case Relation::kGt: ok = value >= options.epsilon_strict - tol; break;
      case Relation::kEq: ok = std::abs(value) <= tol; break;
    }
    if (!ok) {
      throw SolverError("solver witness violates a constraint by " +
                        std::to_string(value));
    }
  }
  if (sys.bounds() && !sys.bounds()->Contains(x, options.feasibility_tolerance)) {
    throw SolverError("solver witness violates a bound");
  }
}

}  // namespace

SolverResult LpSolver::Minimize(const ConstraintSystem& system,
                                const Eigen::VectorXd& objective) {
  if (objective.size() != system.dim()) {
    throw StructuralError("objective dimension does not match system");
  }
  ++calls_;
  std::vector<PrimalRow> rows;
  if (!CollectRows(system, options_.epsilon_strict, rows)) {
    return SolverResult{SolverStatus::kInfeasible, std::nullopt, std::nullopt};
  }
  if (system.dim() == 0) {
    return SolverResult{SolverStatus::kFeasible, Eigen::VectorXd(), 0.0};
  }
  DualSimplex simplex(rows, objective, options_.max_iterations);
  switch (simplex.Solve()) {
    case DualOutcome::kDualUnbounded:
      return SolverResult{SolverStatus::kInfeasible, std::nullopt, std::nullopt};
    case DualOutcome::kDualInfeasible: {
      // The primal is unbounded or infeasible; a zero objective decides.
      if (objective.isZero(0.0)) throw SolverError("zero objective reported dual infeasible");
      SolverResult feas = CheckFeasible(system);
      if (feas.feasible()) {
        return SolverResult{SolverStatus::kUnbounded, std::nullopt, std::nullopt};
      }
      return feas;
    }
    case DualOutcome::kOptimal:
      break;
  }
  Eigen::VectorXd x = simplex.PrimalPoint();
  CheckWitness(system, x, options_);
  const double value = objective.dot(x);
  return SolverResult{SolverStatus::kFeasible, std::move(x), value};
}

SolverResult LpSolver::CheckFeasible(const ConstraintSystem& system) {
  return Minimize(system, Eigen::VectorXd::Zero(system.dim()));
}

SolverResult LpSolver::MinimizeWeightedL1(const ConstraintSystem& system,
                                          const Eigen::VectorXd& weights) {
  const int n = system.dim();
  if (weights.size() != n) throw StructuralError("weights dimension mismatch");
  // Variables (x, t) with t_i >= |x_i|.
  ConstraintSystem lifted(2 * n);
  for (const LinearConstraint& c : system.constraints()) {
    Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(2 * n);
    coeffs.head(n) = c.coeffs;
    lifted.Add(coeffs, c.offset, c.rel);
  }
  if (system.bounds()) {
    Bounds b = Bounds::Unbounded(2 * n);
    b.lo.head(n) = system.bounds()->lo;
    b.hi.head(n) = system.bounds()->hi;
    lifted.SetBounds(std::move(b));
  }
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd up = Eigen::VectorXd::Zero(2 * n);
    up[n + i] = 1.0;
    up[i] = -1.0;
    lifted.Add(up, 0.0, Relation::kGe);
    Eigen::VectorXd down = Eigen::VectorXd::Zero(2 * n);
    down[n + i] = 1.0;
    down[i] = 1.0;
    lifted.Add(down, 0.0, Relation::kGe);
  }
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(2 * n);
  objective.tail(n) = weights;
  SolverResult lifted_result = Minimize(lifted, objective);
  if (!lifted_result.feasible()) return lifted_result;
  Eigen::VectorXd x = lifted_result.point->head(n);
  const double value = weights.dot(x.cwiseAbs());
  return SolverResult{SolverStatus::kFeasible, std::move(x), value};
}

}  // namespace symcorr
