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

// Correction search: an initial concrete correction from a sign-gradient
// walk, breadth-first expansion over verified linear regions that share a
// neuron boundary, convex correction growth, and the outer enumeration over
// feature subsets and categorical values.

#ifndef SYMCORR_SEARCH_H_
#define SYMCORR_SEARCH_H_

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symcorr/geometry.h"
#include "symcorr/lincons.h"
#include "symcorr/lp_solver.h"
#include "symcorr/metrics.h"
#include "symcorr/relunet.h"

namespace symcorr {

// Absolute per-input-feature ranges. Corrections stay inside them.
struct FeatureDomain {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static FeatureDomain Uniform(int dim, double lo, double hi);
  Eigen::VectorXd Range() const { return hi - lo; }
};

struct SearchParams {
  int n = 2;
  int m = 100;
  int max_fgsm_iters = 400;
  // Absolute step of the sign-gradient walk; unset means 0.025 * range per
  // feature.
  std::optional<double> fgsm_step;
  // Empty means every input feature outside the categorical groups.
  std::vector<int> mutable_features;
  int desired_label = 1;
  std::uint64_t rng_seed = 0;
  // Interpretations whose stable center is within this weighted L1 norm of
  // the input are dropped as adversarial; 0 disables the filter.
  double sigma = 0.0;
  int threads = 1;
  ShapeKind shape = ShapeKind::kBox;
  double epsilon_strict = 1e-6;
  int audit_samples = 10000;
};

constexpr int kUnlimitedRegions = std::numeric_limits<int>::max();

struct ExplainConfig {
  SearchParams search;
  DistanceConfig distance;
  GrowthParams growth;
  FeatureDomain domain;

  // Domain [-1, 1] per feature, distance weights and radii from the ranges.
  static ExplainConfig Defaults(int input_dim);
  // Re-derives range-dependent defaults (weights, radii, growth scale)
  // after the domain changed.
  void ApplyDomainDefaults();
};

enum class FailureStage {
  kNone,
  kNoInitialCorrection,
  kUnstable,
  kSolverError,
  kBelowSigma,
};

std::string FailureStageName(FailureStage stage);

struct ConcreteCorrection {
  bool found = false;
  Eigen::VectorXd delta;          // correction-space vector over the features
  Eigen::VectorXd last_direction; // unit step of the final move
  int iterations = 0;
};

// Sign-gradient walk: at each step move the single selected feature with
// the largest gradient magnitude (ties to the lowest index) by one step in
// the gradient's sign, until the desired label is reached.
ConcreteCorrection FindMinConcreteCorrection(const Network& net,
                                             const Eigen::VectorXd& input,
                                             const std::vector<int>& features,
                                             const SearchParams& params,
                                             const FeatureDomain& domain);

// Feasibility of the face G_p = 0 of pattern's region, with the class
// constraint and the domain bounds.
bool CheckRegionBoundary(const Network& net, const ActivationPattern& pattern,
                         int p, const Eigen::VectorXd& input,
                         const std::vector<int>& features, int desired,
                         const std::optional<Bounds>& domain, LpSolver& solver);

// Breadth-first region expansion from the pattern at input + delta0.
// Returns deduplicated feasible regions (at most m), the initial one first;
// empty only when no feasible initial region could be formed.
std::vector<Region> ExpandRegions(const Network& net, const Eigen::VectorXd& input,
                                  const std::vector<int>& features,
                                  const ConcreteCorrection& delta0,
                                  const ExplainConfig& config, LpSolver& solver);

struct Interpretation {
  ConvexCorrection correction;
  double distance = 0.0;
  double numeric_distance = 0.0;
  double categorical_penalty = 0.0;
  Eigen::VectorXd stable_center;
  std::vector<int> stability_axes;
  std::vector<int> features;
  int assignment = -1;  // index into the categorical assignment product
  Eigen::VectorXd input;
  Eigen::VectorXd initial_correction;
  std::vector<Region> regions;
  int regions_explored = 0;
  double volume = 0.0;
  int l0 = 0;
  std::int64_t lp_calls = 0;
  double elapsed_ms = 0.0;
};

struct BranchReport {
  std::vector<int> features;
  int assignment = -1;
  FailureStage stage = FailureStage::kNone;
  std::string message;
  std::optional<double> distance;
  int regions = 0;
  std::int64_t lp_calls = 0;
  double elapsed_ms = 0.0;
};

struct SearchOutcome {
  std::optional<Interpretation> best;
  FailureStage stage = FailureStage::kNone;  // set when best is empty
  std::string message;
  std::vector<BranchReport> branches;

  bool ok() const { return best.has_value(); }
};

// One feature subset with a fixed base input. `original_input` is the
// user's input (it differs from `base` only in categorical coordinates);
// `seed` drives growth and auditing.
SearchOutcome FindProjectedInterpretation(const Network& net,
                                          const Eigen::VectorXd& base,
                                          const std::vector<int>& features,
                                          const ExplainConfig& config,
                                          const Eigen::VectorXd& original_input,
                                          std::uint64_t seed);

// All size-n subsets of the mutable features times all categorical
// assignments; the minimum-distance interpretation wins, ties to the first
// enumerated.
SearchOutcome FindInterpretation(const Network& net, const Eigen::VectorXd& input,
                                 const ExplainConfig& config);

// Size-k subsets in lexicographic order.
std::vector<std::vector<int>> Combinations(const std::vector<int>& items, int k);

// Every combination of allowed categorical values, as full input vectors
// built from `input`. Without groups, a single copy of `input`.
std::vector<Eigen::VectorXd> CategoricalAssignments(const Eigen::VectorXd& input,
                                                    const DistanceConfig& cfg);

// Per-branch seed derived from the run seed and the subset index.
std::uint64_t BranchSeed(std::uint64_t seed, std::size_t subset_index);

}  // namespace symcorr

#endif  // SYMCORR_SEARCH_H_
