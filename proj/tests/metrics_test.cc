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

#include "symcorr/metrics.h"

#include <limits>

#include <gtest/gtest.h>

#include "test_util.h"

namespace symcorr {
namespace {

using testing_util::Vec;

DistanceConfig Config(Eigen::VectorXd weights, Eigen::VectorXd radii, double e = 1.0) {
  DistanceConfig cfg;
  cfg.weights = std::move(weights);
  cfg.radii = std::move(radii);
  cfg.e = e;
  return cfg;
}

// Bounds of the eroded set along one axis, by LP.
std::pair<double, double> AxisRange(const ConstraintSystem& sys, int axis) {
  LpSolver solver;
  Eigen::VectorXd dir = Eigen::VectorXd::Unit(sys.dim(), axis);
  const SolverResult lo = solver.Minimize(sys, dir);
  const SolverResult hi = solver.Minimize(sys, -dir);
  return {*lo.objective_value, -*hi.objective_value};
}

TEST(Erode, BoxInsetsEachFace) {
  const ConvexCorrection box = ConvexCorrection::Box(Vec({0.1, 0.2}), Vec({0.3, 0.6}));
  const ConstraintSystem eroded = Erode(box, Config(Vec({1, 1}), Vec({0.05, 0.1})));
  auto [lo0, hi0] = AxisRange(eroded, 0);
  auto [lo1, hi1] = AxisRange(eroded, 1);
  EXPECT_NEAR(lo0, 0.15, 1e-12);
  EXPECT_NEAR(hi0, 0.25, 1e-12);
  EXPECT_NEAR(lo1, 0.3, 1e-12);
  EXPECT_NEAR(hi1, 0.5, 1e-12);
}

TEST(Erode, ThinBoxErodesToNothing) {
  const ConvexCorrection box = ConvexCorrection::Box(Vec({0.0, 0.0}), Vec({0.08, 1.0}));
  LpSolver solver;
  EXPECT_FALSE(solver.CheckFeasible(Erode(box, Config(Vec({1, 1}), Vec({0.05, 0.05})))).feasible());
}

TEST(Erode, SimplexHypotenuseMovesByBothRadii) {
  const ConvexCorrection tri = ConvexCorrection::Simplex({Vec({0, 0}), Vec({1, 0}), Vec({0, 1})});
  const DistanceConfig cfg = Config(Vec({1, 1}), Vec({0.1, 0.1}));
  const ConstraintSystem eroded = Erode(tri, cfg);
  EXPECT_TRUE(eroded.Contains(Vec({0.1, 0.1}), 1e-12));
  EXPECT_TRUE(eroded.Contains(Vec({0.4, 0.4}), 1e-12));
  EXPECT_FALSE(eroded.Contains(Vec({0.41, 0.41})));
  EXPECT_FALSE(eroded.Contains(Vec({0.09, 0.3})));
  // Oracle: every corner of the ball of an eroded center is in the simplex.
  Rng rng(1);
  const ConstraintSystem facets = Facets(tri);
  int checked = 0;
  std::uniform_real_distribution<double> u(0, 1);
  while (checked < 500) {
    const Eigen::VectorXd c = Vec({u(rng), u(rng)});
    if (!eroded.Contains(c)) continue;
    ++checked;
    for (double dx : {-0.1, 0.1}) {
      for (double dy : {-0.1, 0.1}) EXPECT_TRUE(facets.Contains(c + Vec({dx, dy}), 1e-12));
    }
  }
}

TEST(Erode, PairwiseOnlyTouchesChosenAxes) {
  const ConvexCorrection box = ConvexCorrection::Box(Vec({0, 0, 0}), Vec({1, 1, 0.05}));
  const DistanceConfig cfg = Config(Vec({1, 1, 1}), Vec({0.1, 0.1, 0.1}));
  LpSolver solver;
  EXPECT_FALSE(solver.CheckFeasible(Erode(box, cfg)).feasible());
  const ConstraintSystem pair = Erode(box, cfg, {0, 1});
  auto [lo2, hi2] = AxisRange(pair, 2);
  EXPECT_NEAR(lo2, 0.0, 1e-12);
  EXPECT_NEAR(hi2, 0.05, 1e-12);
  auto [lo0, hi0] = AxisRange(pair, 0);
  EXPECT_NEAR(lo0, 0.1, 1e-12);
  EXPECT_NEAR(hi0, 0.9, 1e-12);
}

TEST(StabilityAxisSets, AllAndPairs) {
  EXPECT_EQ(StabilityAxisSets(3, StabilityMode::kAll).size(), 1u);
  const auto pairs = StabilityAxisSets(4, StabilityMode::kPairwise);
  EXPECT_EQ(pairs.size(), 6u);
  EXPECT_EQ(pairs.front(), (std::vector<int>{0, 1}));
}

TEST(DisE, NearestErodedCorner) {
  const ConvexCorrection box = ConvexCorrection::Box(Vec({0.1, 0.2}), Vec({0.3, 0.6}));
  LpSolver solver;
  const StabilityReport r = DisE(box, Config(Vec({1, 1}), Vec({0.05, 0.1})), solver);
  ASSERT_TRUE(r.stable());
  EXPECT_NEAR(*r.distance, 0.45, 1e-12);
  EXPECT_LE((*r.center - Vec({0.15, 0.3})).norm(), 1e-12);
  EXPECT_TRUE(r.eroded_nonempty);
  EXPECT_TRUE(r.ball_check_passed);
}

TEST(DisE, WeightsScaleTheDistance) {
  const ConvexCorrection box = ConvexCorrection::Box(Vec({0.1, 0.2}), Vec({0.3, 0.6}));
  LpSolver solver;
  const StabilityReport r = DisE(box, Config(Vec({10, 1}), Vec({0.05, 0.1})), solver);
  ASSERT_TRUE(r.stable());
  EXPECT_NEAR(*r.distance, 1.8, 1e-12);
  EXPECT_LE((*r.center - Vec({0.15, 0.3})).norm(), 1e-12);
}

TEST(DisE, InfiniteOnThinBoxes) {
  const ConvexCorrection box = ConvexCorrection::Box(Vec({0.0, 0.0}), Vec({0.08, 1.0}));
  LpSolver solver;
  const StabilityReport r = DisE(box, Config(Vec({1, 1}), Vec({0.05, 0.05})), solver);
  EXPECT_FALSE(r.stable());
  EXPECT_FALSE(r.center.has_value());
  EXPECT_FALSE(r.eroded_nonempty);
}

TEST(DisE, MinimumSideLength) {
  DistanceConfig cfg = Config(Vec({1, 1}), Vec({1, 1}));
  cfg.min_box_side = 3;
  LpSolver solver;
  EXPECT_FALSE(DisE(ConvexCorrection::Box(Vec({0, 0}), Vec({2.5, 10})), cfg, solver).stable());
  EXPECT_TRUE(DisE(ConvexCorrection::Box(Vec({0, 0}), Vec({3, 10})), cfg, solver).stable());
}

TEST(DisE, EnlargingNeverIncreasesDistance) {
  LpSolver solver;
  const DistanceConfig cfg = Config(Vec({1, 2}), Vec({0.05, 0.05}));
  const ConvexCorrection small = ConvexCorrection::Box(Vec({0.2, 0.3}), Vec({0.5, 0.6}));
  const ConvexCorrection big = ConvexCorrection::Box(Vec({0.1, 0.0}), Vec({0.6, 0.7}));
  EXPECT_LE(*DisE(big, cfg, solver).distance, *DisE(small, cfg, solver).distance);
}

TEST(DisE, CategoricalPenaltyOnlyWhenChanged) {
  DistanceConfig cfg = Config(Vec({1, 1, 1, 1, 1}), Vec({0.05, 0.05, 1, 1, 1}));
  cfg.categorical.push_back(CategoricalGroup{{2, 3, 4}, {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, 1.0});
  LpSolver solver;
  const Eigen::VectorXd input = Vec({0.2, 0.1, 1, 0, 0});
  ConvexCorrection same = ConvexCorrection::Box(Vec({0.1, 0.2}), Vec({0.3, 0.6}), {0, 1}, input);
  ConvexCorrection other = same;
  other.base = Vec({0.2, 0.1, 0, 1, 0});
  const StabilityReport a = DisE(same, cfg, solver, input);
  const StabilityReport b = DisE(other, cfg, solver, input);
  EXPECT_DOUBLE_EQ(a.categorical_penalty, 0.0);
  EXPECT_DOUBLE_EQ(b.categorical_penalty, 1.0);
  EXPECT_NEAR(*b.distance - *a.distance, 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(a.numeric_distance, b.numeric_distance);
}

TEST(VerifyStability, InscribedBallPassesFaceCenterFails) {
  const ConvexCorrection box = ConvexCorrection::Box(Vec({0.15, 0.3}), Vec({0.25, 0.5}));
  const DistanceConfig cfg = Config(Vec({1, 1}), Vec({0.05, 0.1}));
  Rng rng(0);
  EXPECT_TRUE(VerifyStability(box, Vec({0.2, 0.4}), cfg, {}, rng));
  EXPECT_FALSE(VerifyStability(box, Vec({0.15, 0.4}), cfg, {}, rng));
}

TEST(WeightedL1, Examples) {
  EXPECT_DOUBLE_EQ(WeightedL1(Vec({0.02, 0}), Vec({10, 2})), 0.2);
  EXPECT_DOUBLE_EQ(WeightedL1(Vec({0, 0}), Vec({3, 4})), 0.0);
  EXPECT_DOUBLE_EQ(WeightedL1(Vec({-0.1, 0.05}), Vec({1, 1})), 0.15000000000000002);
  EXPECT_THROW(WeightedL1(Vec({1}), Vec({1, 1})), StructuralError);
}

TEST(L0Distance, Examples) {
  EXPECT_EQ(L0Distance(ConvexCorrection::Box(Vec({0.1, 0}), Vec({0.2, 0.5})), Vec({0.15, 0})), 1);
  EXPECT_EQ(L0Distance(ConvexCorrection::Box(Vec({-1, -1}), Vec({1, 1})), Vec({0, 0})), 0);
  const Eigen::VectorXd lo = Eigen::VectorXd::Constant(8, 0.1);
  const Eigen::VectorXd hi = Eigen::VectorXd::Constant(8, 0.3);
  EXPECT_EQ(L0Distance(ConvexCorrection::Box(lo, hi), Eigen::VectorXd::Constant(8, 0.2)), 8);
}

TEST(DistanceConfig, FromRangesAndJson) {
  const DistanceConfig cfg = DistanceConfig::FromRanges(Vec({0, -1}), Vec({0.1, 1}));
  EXPECT_NEAR(cfg.weights[0], 10.0, 1e-12);
  EXPECT_NEAR(cfg.weights[1], 0.5, 1e-12);
  EXPECT_NEAR(cfg.radii[0], 0.0025, 1e-15);
  EXPECT_NEAR(cfg.radii[1], 0.05, 1e-15);
  const DistanceConfig back = DistanceConfigFromJson(DistanceConfigToJson(cfg), cfg);
  EXPECT_EQ(back.weights, cfg.weights);
  EXPECT_EQ(back.radii, cfg.radii);
  EXPECT_THROW(DistanceConfigFromJson(R"({"e":0})", cfg), ParseError);
  EXPECT_THROW(DistanceConfigFromJson(R"({"radii":[1]})", cfg), ParseError);
  EXPECT_EQ(DistanceConfigFromJson(R"({"mode":"pairwise"})", cfg).mode, StabilityMode::kPairwise);
}

}  // namespace
}  // namespace symcorr
