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

// Dense simplex LP backend for small correction spaces.
//
// Systems have few variables (the selected features, doubled when absolute
// values are linearized) and up to a few thousand rows, so the solver works
// on the dual problem in standard form, whose tableau has one row per
// primal variable:
//
//   primal:  min c.x   s.t.  A_I x >= d_I,  A_E x = d_E,  x free
//   dual:    max d.y   s.t.  A^T y = c,     y_I >= 0,     y_E free
//
// The primal optimum is recovered from the simplex multipliers of the
// final dual basis. Strict constraints are tightened to >= epsilon_strict.

#ifndef SYMCORR_LP_SOLVER_H_
#define SYMCORR_LP_SOLVER_H_

#include <cstdint>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

#include "symcorr/lincons.h"

namespace symcorr {

// The backend failed to reach a trustworthy answer. Never reported as
// infeasibility.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class SolverStatus { kFeasible, kInfeasible, kUnbounded };

struct SolverResult {
  SolverStatus status = SolverStatus::kInfeasible;
  std::optional<Eigen::VectorXd> point;
  std::optional<double> objective_value;

  bool feasible() const { return status == SolverStatus::kFeasible; }
};

struct SolverOptions {
  double epsilon_strict = 1e-6;
  // Witness check after every solve; a larger violation is a SolverError.
  double feasibility_tolerance = 1e-7;
  int max_iterations = 50000;
};

// Not thread-safe; use one instance per thread.
class LpSolver {
 public:
  explicit LpSolver(SolverOptions options = {}) : options_(options) {}

  const SolverOptions& options() const { return options_; }

  SolverResult CheckFeasible(const ConstraintSystem& system);
  // Minimizes objective . x. Unbounded problems return kUnbounded.
  SolverResult Minimize(const ConstraintSystem& system,
                        const Eigen::VectorXd& objective);
  // Minimizes sum_i weights[i] |x_i| using one auxiliary variable per
  // coordinate; the returned point has the original dimension.
  SolverResult MinimizeWeightedL1(const ConstraintSystem& system,
                                  const Eigen::VectorXd& weights);

  std::int64_t calls() const { return calls_; }

 private:
  SolverOptions options_;
  std::int64_t calls_ = 0;
};

}  // namespace symcorr

#endif  // SYMCORR_LP_SOLVER_H_
