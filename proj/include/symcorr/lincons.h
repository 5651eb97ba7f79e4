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

// Linear constraints over correction space and the region builders.
//
// Correction space has one coordinate per selected feature. A correction x
// maps to the network input embed(v, s, x) = v + sum_k x[k] e_{s[k]}; every
// non-selected coordinate keeps its base value, so those variables are
// projected out of each constraint rather than pinned with x[j] = 0.

#ifndef SYMCORR_LINCONS_H_
#define SYMCORR_LINCONS_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symcorr/relunet.h"

namespace symcorr {

// coeffs . x + offset  (>= | > | =)  0
enum class Relation { kGe, kGt, kEq };

struct LinearConstraint {
  Eigen::VectorXd coeffs;
  double offset = 0.0;
  Relation rel = Relation::kGe;

  double Evaluate(const Eigen::VectorXd& x) const { return coeffs.dot(x) + offset; }
  // Exact test; strict constraints stay strict. `slack` loosens every
  // relation by that amount (equalities become |value| <= slack).
  bool Holds(const Eigen::VectorXd& x, double slack = 0.0) const;
  // All coefficients are (numerically) zero.
  bool IsConstant() const;
  // For constant constraints: whether the constant relation holds.
  bool ConstantHolds() const;
};

// Per-coordinate closed box; entries may be infinite.
struct Bounds {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  static Bounds Unbounded(int dim);
  bool Contains(const Eigen::VectorXd& x, double slack = 0.0) const;
};

class ConstraintSystem {
 public:
  ConstraintSystem() = default;
  explicit ConstraintSystem(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::vector<LinearConstraint>& constraints() const { return constraints_; }
  const std::optional<Bounds>& bounds() const { return bounds_; }
  std::size_t size() const { return constraints_.size(); }

  void Add(LinearConstraint c);
  void Add(const Eigen::VectorXd& coeffs, double offset, Relation rel) {
    Add(LinearConstraint{coeffs, offset, rel});
  }
  // Conjunction; dimensions must agree. Bounds are intersected.
  void Append(const ConstraintSystem& other);
  void SetBounds(Bounds bounds);

  // Some constraint is constant and false, so no point can satisfy the
  // system. Tracked as constraints are added.
  bool HasConstantFalse() const { return constant_false_; }

  // Every constraint and bound holds at x, strict ones strictly.
  bool Contains(const Eigen::VectorXd& x, double slack = 0.0) const;

  std::string ToJson() const;
  static ConstraintSystem FromJson(const std::string& text);

 private:
  int dim_ = 0;
  std::vector<LinearConstraint> constraints_;
  std::optional<Bounds> bounds_;
  bool constant_false_ = false;
};

// How inactive neurons are encoded: strictly negative (a region), or
// non-positive (its closure, used for exact verification).
enum class Strictness { kStrict, kClosed };

// v + x scattered into the coordinates in `features`.
Eigen::VectorXd Embed(const Eigen::VectorXd& base,
                      const std::vector<int>& features,
                      const Eigen::VectorXd& x);

// One constraint per hidden neuron r: G_r >= 0 if pattern[r], else -G_r > 0.
ConstraintSystem ActivationConstraints(const Network& net,
                                       const ActivationPattern& pattern,
                                       const Eigen::VectorXd& base,
                                       const std::vector<int>& features,
                                       Strictness strictness = Strictness::kStrict);

// logits[desired] - logits[c] > 0 for every c != desired under the fixed
// pattern.
ConstraintSystem ClassConstraints(const Network& net,
                                  const ActivationPattern& pattern,
                                  const Eigen::VectorXd& base,
                                  const std::vector<int>& features, int desired);

// ActivationConstraints with neuron p's constraint replaced by G_p = 0.
ConstraintSystem BoundaryConstraints(const Network& net,
                                     const ActivationPattern& pattern, int p,
                                     const Eigen::VectorXd& base,
                                     const std::vector<int>& features);

// A linear region of the network restricted to the selected features.
// Regions returned by the search are verified feasible and carry a witness.
struct Region {
  std::vector<int> features;
  Eigen::VectorXd base;
  ActivationPattern pattern;
  ConstraintSystem system;
  AffineMap logits_map;  // correction space -> logits, exact on the region
  Eigen::VectorXd witness;

  int dim() const { return static_cast<int>(features.size()); }
};

// Activation and class constraints in correction coordinates, plus `domain`
// (correction-space bounds) when present. Feasibility is not checked here.
Region RegionFromActivations(const Network& net,
                             const ActivationPattern& pattern,
                             const Eigen::VectorXd& base,
                             const std::vector<int>& features, int desired,
                             const std::optional<Bounds>& domain = std::nullopt);

// Point-in-polytope with strict relations kept strict.
bool Membership(const Region& region, const Eigen::VectorXd& x);

// Converts absolute per-feature input ranges into correction-space bounds
// for the selected features around `base`.
Bounds CorrectionBounds(const Eigen::VectorXd& input_lo,
                        const Eigen::VectorXd& input_hi,
                        const Eigen::VectorXd& base,
                        const std::vector<int>& features);

}  // namespace symcorr

#endif  // SYMCORR_LINCONS_H_
