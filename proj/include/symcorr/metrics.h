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

// Distance and stability of convex corrections.
//
// A center is stable when its axis-weighted L-infinity ball (half-width
// e * r[i] on axis i) fits inside the correction. The distance of a
// correction is the smallest weighted L1 norm over its stable centers, plus
// a fixed penalty per categorical group whose value was changed.

#ifndef SYMCORR_METRICS_H_
#define SYMCORR_METRICS_H_

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symcorr/geometry.h"
#include "symcorr/lincons.h"
#include "symcorr/lp_solver.h"

namespace symcorr {

enum class StabilityMode { kAll, kPairwise };

struct CategoricalGroup {
  std::vector<int> indices;                 // input coordinates of the one-hot block
  std::vector<std::vector<double>> values;  // allowed encodings
  double penalty = 1.0;
};

// Per-feature vectors are indexed by input coordinate.
struct DistanceConfig {
  Eigen::VectorXd weights;
  Eigen::VectorXd radii;
  double e = 1.0;
  StabilityMode mode = StabilityMode::kAll;
  std::vector<CategoricalGroup> categorical;
  // Boxes with any side shorter than this are unstable; 0 disables it.
  double min_box_side = 0.0;

  // Defaults derived from feature ranges: weight 1/(max-min), radius
  // 0.025 * (max-min).
  static DistanceConfig FromRanges(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);
};

struct StabilityReport {
  std::optional<double> distance;  // nullopt means infinite
  std::optional<Eigen::VectorXd> center;
  bool eroded_nonempty = false;
  bool ball_check_passed = false;
  std::vector<int> stability_axes;  // positions within the correction's features
  double numeric_distance = 0.0;
  double categorical_penalty = 0.0;

  bool stable() const { return distance.has_value(); }
};

// Centers whose ball over `axes` (all axes when empty) stays inside c:
// every facet a.x + b >= 0 becomes a.x + b - e * sum_{i in axes} |a_i| r_i >= 0.
ConstraintSystem Erode(const ConvexCorrection& c, const DistanceConfig& cfg,
                       const std::vector<int>& axes = {});

// Axis subsets tried by DisE: all axes, or every pair in pairwise mode.
std::vector<std::vector<int>> StabilityAxisSets(int dim, StabilityMode mode);

StabilityReport DisE(const ConvexCorrection& c, const DistanceConfig& cfg,
                     LpSolver& solver);
// Adds categorical penalties for groups where c.base differs from
// `original_input`.
StabilityReport DisE(const ConvexCorrection& c, const DistanceConfig& cfg,
                     LpSolver& solver, const Eigen::VectorXd& original_input);

// Samples `samples` points of the center's ball (corners first, then
// uniform) and checks that all lie inside c.
bool VerifyStability(const ConvexCorrection& c, const Eigen::VectorXd& center,
                     const DistanceConfig& cfg, const std::vector<int>& axes,
                     Rng& rng, int samples = 1000);

// Points of the ball used by VerifyStability.
std::vector<Eigen::VectorXd> StabilityBallSamples(const ConvexCorrection& c,
                                                  const Eigen::VectorXd& center,
                                                  const DistanceConfig& cfg,
                                                  const std::vector<int>& axes,
                                                  Rng& rng, int samples = 1000);

double WeightedL1(const Eigen::VectorXd& x, const Eigen::VectorXd& weights);

// Number of features the correction forces to change: its range excludes 0,
// or the center moves it.
int L0Distance(const ConvexCorrection& c, const Eigen::VectorXd& center);

double CategoricalPenalty(const DistanceConfig& cfg, const Eigen::VectorXd& base,
                          const Eigen::VectorXd& original_input);

std::string DistanceConfigToJson(const DistanceConfig& cfg);
// Missing fields keep the values from `defaults`; vector lengths must match
// the defaults' lengths.
DistanceConfig DistanceConfigFromJson(const std::string& text,
                                      const DistanceConfig& defaults);

}  // namespace symcorr

#endif  // SYMCORR_METRICS_H_
