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

// Convex corrections (boxes and simplices) and their greedy growth inside
// a union of verified regions.

#ifndef SYMCORR_GEOMETRY_H_
#define SYMCORR_GEOMETRY_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symcorr/lincons.h"
#include "symcorr/lp_solver.h"

namespace symcorr {

using Rng = std::mt19937_64;

enum class ShapeKind { kBox, kSimplex };

std::string ShapeKindName(ShapeKind kind);
ShapeKind ParseShapeKind(const std::string& name);

// A box [lo, hi] or a simplex with n + 1 vertices in correction space.
struct ConvexCorrection {
  ShapeKind kind = ShapeKind::kBox;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  std::vector<Eigen::VectorXd> vertices;
  std::vector<int> features;
  Eigen::VectorXd base;

  int dim() const { return static_cast<int>(features.size()); }

  static ConvexCorrection Box(Eigen::VectorXd lo, Eigen::VectorXd hi,
                              std::vector<int> features = {},
                              Eigen::VectorXd base = {});
  static ConvexCorrection Simplex(std::vector<Eigen::VectorXd> vertices,
                                  std::vector<int> features = {},
                                  Eigen::VectorXd base = {});

  bool operator==(const ConvexCorrection& other) const;
};

double Volume(const ConvexCorrection& c);

// Facet inequalities a.x + b >= 0, one per box face or per simplex vertex
// (the facet opposite it).
ConstraintSystem Facets(const ConvexCorrection& c);

// Closed containment test with a small absolute slack.
bool InsideShape(const ConvexCorrection& c, const Eigen::VectorXd& x,
                 double slack = 1e-12);

Eigen::VectorXd Centroid(const ConvexCorrection& c);

// Uniform sample from the shape.
Eigen::VectorXd SampleUniform(const ConvexCorrection& c, Rng& rng);

// Box corners (all of them up to 12 dimensions, else `max_sampled` random
// ones) or simplex vertices.
std::vector<Eigen::VectorXd> ShapeVertices(const ConvexCorrection& c, Rng& rng,
                                           int max_sampled = 4096);

struct GrowthParams {
  // Both are multiplied per axis by `axis_scale` (feature range).
  double init_scale = 0.01;
  double step = 0.005;
  int max_stalls = 200;
  int containment_samples = 256;
  int retries = 5;
  int max_halvings = 60;
  std::uint64_t rng_seed = 0;
  Eigen::VectorXd axis_scale;  // empty means all ones

  double AxisScale(int i) const { return axis_scale.size() ? axis_scale[i] : 1.0; }
};

// Index of a region containing x, or -1. `hint` is tried first.
int FindContainingRegion(const std::vector<Region>& regions,
                         const Eigen::VectorXd& x, int hint = -1);

// True when every vertex lies in one region (exact by convexity) or, failing
// that, when every probe (vertices, edge midpoints, centroid and
// containment_samples random interior points) lies in some region.
bool Contained(const ConvexCorrection& c, const std::vector<Region>& regions,
               const GrowthParams& params, Rng& rng);

// The single-region fast path alone.
bool ContainedInOneRegion(const ConvexCorrection& c,
                          const std::vector<Region>& regions, Rng& rng);

// Picks a region uniformly and places a small shape around the center of its
// largest inscribed ball (box: cube), halving until it fits.
std::optional<ConvexCorrection> SampleInitial(const std::vector<Region>& regions,
                                              ShapeKind kind,
                                              const GrowthParams& params,
                                              Rng& rng, LpSolver& solver);

// Greedy growth. `volumes`, when given, receives the volume after every
// accepted move.
ConvexCorrection Grow(const ConvexCorrection& c,
                      const std::vector<Region>& regions,
                      const GrowthParams& params, Rng& rng,
                      std::vector<double>* volumes = nullptr);

// Optional post-growth check; returns the (possibly repaired) shape or
// nullopt to reject the candidate.
using ShapeFilter =
    std::function<std::optional<ConvexCorrection>(const ConvexCorrection&)>;

// SampleInitial + Grow, retried params.retries times; the largest-volume
// candidate that passes `filter` wins.
std::optional<ConvexCorrection> InferConvexCorrection(
    const std::vector<Region>& regions, ShapeKind kind,
    const GrowthParams& params, Rng& rng, LpSolver& solver,
    const ShapeFilter& filter = {});

std::string CorrectionToJson(const ConvexCorrection& c);
ConvexCorrection CorrectionFromJson(const std::string& text);

}  // namespace symcorr

#endif  // SYMCORR_GEOMETRY_H_
