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

#include "symcorr/lincons.h"

#include <random>

#include <gtest/gtest.h>

#include "symcorr/lp_solver.h"
#include "symcorr/synth.h"
#include "test_util.h"

namespace symcorr {
namespace {

using testing_util::Vec;

const std::vector<int> kBoth = {0, 1};

void ExpectConstraint(const LinearConstraint& c, const Eigen::VectorXd& coeffs, double offset,
                      Relation rel) {
  EXPECT_TRUE(c.coeffs.isApprox(coeffs, 1e-12) || (c.coeffs - coeffs).norm() < 1e-12)
      << c.coeffs.transpose();
  EXPECT_NEAR(c.offset, offset, 1e-12);
  EXPECT_EQ(c.rel, rel);
}

TEST(ActivationConstraints, N1MixedPattern) {
  const Network n1 = BuiltinNetwork("N1");
  const ConstraintSystem sys =
      ActivationConstraints(n1, ActivationPattern::FromString("10"), Vec({0.2, 0.1}), kBoth);
  ASSERT_EQ(sys.size(), 2u);
  ExpectConstraint(sys.constraints()[0], Vec({1, 0}), 0.2, Relation::kGe);
  ExpectConstraint(sys.constraints()[1], Vec({0, -1}), -0.1, Relation::kGt);
  EXPECT_FALSE(sys.HasConstantFalse());
}

TEST(ActivationConstraints, N1AllActiveAtOrigin) {
  const Network n1 = BuiltinNetwork("N1");
  const ConstraintSystem sys =
      ActivationConstraints(n1, ActivationPattern::FromString("11"), Vec({0, 0}), kBoth);
  ExpectConstraint(sys.constraints()[0], Vec({1, 0}), 0, Relation::kGe);
  ExpectConstraint(sys.constraints()[1], Vec({0, 1}), 0, Relation::kGe);
}

TEST(ActivationConstraints, ProjectedFeatureBecomesConstant) {
  const Network n1 = BuiltinNetwork("N1");
  const ConstraintSystem sys =
      ActivationConstraints(n1, ActivationPattern::FromString("10"), Vec({0.2, 0.1}), {0});
  ASSERT_EQ(sys.dim(), 1);
  ExpectConstraint(sys.constraints()[0], Vec({1}), 0.2, Relation::kGe);
  ExpectConstraint(sys.constraints()[1], Vec({0}), -0.1, Relation::kGt);
  EXPECT_TRUE(sys.constraints()[1].IsConstant());
  EXPECT_TRUE(sys.HasConstantFalse());
}

TEST(ClassConstraints, N1) {
  const Network n1 = BuiltinNetwork("N1");
  const Eigen::VectorXd v = Vec({0.2, 0.1});
  const ConstraintSystem tt = ClassConstraints(n1, ActivationPattern::FromString("11"), v, kBoth, 1);
  ASSERT_EQ(tt.size(), 1u);
  ExpectConstraint(tt.constraints()[0], Vec({1, 1}), -0.2, Relation::kGt);
  const ConstraintSystem tf = ClassConstraints(n1, ActivationPattern::FromString("10"), v, kBoth, 1);
  ExpectConstraint(tf.constraints()[0], Vec({1, 0}), -0.3, Relation::kGt);
}

TEST(ClassConstraints, OneRowPerOtherClass) {
  Layer hidden{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2), Activation::kRelu};
  Layer out{Eigen::MatrixXd::Random(3, 2), Eigen::VectorXd::Zero(3), Activation::kLinear};
  const Network net({hidden, out});
  const ConstraintSystem sys =
      ClassConstraints(net, ActivationPattern::FromString("11"), Vec({0, 0}), kBoth, 2);
  EXPECT_EQ(sys.size(), 2u);
  for (const LinearConstraint& c : sys.constraints()) EXPECT_EQ(c.rel, Relation::kGt);
}

TEST(BoundaryConstraints, N1) {
  const Network n1 = BuiltinNetwork("N1");
  const ConstraintSystem a = BoundaryConstraints(n1, ActivationPattern::FromString("11"), 1,
                                                 Vec({0.2, 0.1}), kBoth);
  ExpectConstraint(a.constraints()[0], Vec({1, 0}), 0.2, Relation::kGe);
  ExpectConstraint(a.constraints()[1], Vec({0, 1}), 0.1, Relation::kEq);
  const ConstraintSystem b =
      BoundaryConstraints(n1, ActivationPattern::FromString("10"), 0, Vec({0, 0}), kBoth);
  ExpectConstraint(b.constraints()[0], Vec({1, 0}), 0, Relation::kEq);
  ExpectConstraint(b.constraints()[1], Vec({0, -1}), 0, Relation::kGt);
  const ConstraintSystem c =
      BoundaryConstraints(n1, ActivationPattern::FromString("01"), 0, Vec({0, 0}), kBoth);
  ExpectConstraint(c.constraints()[0], Vec({1, 0}), 0, Relation::kEq);
  ExpectConstraint(c.constraints()[1], Vec({0, 1}), 0, Relation::kGe);
}

TEST(RegionFromActivations, N1Regions) {
  const Network n1 = BuiltinNetwork("N1");
  const Eigen::VectorXd v = Vec({0.2, 0.1});
  LpSolver solver;
  const Region tf = RegionFromActivations(n1, ActivationPattern::FromString("10"), v, kBoth, 1);
  ASSERT_EQ(tf.system.size(), 3u);
  ExpectConstraint(tf.system.constraints()[2], Vec({1, 0}), -0.3, Relation::kGt);
  EXPECT_TRUE(solver.CheckFeasible(tf.system).feasible());

  const Region ff = RegionFromActivations(n1, ActivationPattern::FromString("00"), v, kBoth, 1);
  EXPECT_TRUE(ff.system.HasConstantFalse());
  EXPECT_FALSE(solver.CheckFeasible(ff.system).feasible());

  const Region ft = RegionFromActivations(n1, ActivationPattern::FromString("01"), v, kBoth, 1);
  ExpectConstraint(ft.system.constraints()[0], Vec({-1, 0}), -0.2, Relation::kGt);
  ExpectConstraint(ft.system.constraints()[1], Vec({0, 1}), 0.1, Relation::kGe);
  ExpectConstraint(ft.system.constraints()[2], Vec({0, 1}), -0.4, Relation::kGt);
}

TEST(Membership, StrictRelationsStayStrict) {
  const Network n1 = BuiltinNetwork("N1");
  const Region tt =
      RegionFromActivations(n1, ActivationPattern::FromString("11"), Vec({0.2, 0.1}), kBoth, 1);
  EXPECT_TRUE(Membership(tt, Vec({0.3, 0.3})));
  EXPECT_TRUE(Membership(tt, Vec({-0.2, 0.5})));
  EXPECT_FALSE(Membership(tt, Vec({0.05, 0.1})));
  // Dyadic values so the class row evaluates to exactly zero.
  const Region exact =
      RegionFromActivations(n1, ActivationPattern::FromString("11"), Vec({0.25, 0.125}), kBoth, 1);
  EXPECT_FALSE(Membership(exact, Vec({0.0625, 0.0625})));
  EXPECT_TRUE(Membership(exact, Vec({0.0625, 0.125})));
}

TEST(Membership, AffineMapIsExactOnTheRegion) {
  const Network net = GenNetwork(TaskSpec{.input_dim = 3, .hidden_sizes = {6, 4}, .seed = 2});
  const Eigen::VectorXd v = Vec({0.1, -0.3, 0.2});
  const std::vector<int> feats = {0, 2};
  const Eigen::VectorXd x = Vec({0.05, -0.1});
  const Eigen::VectorXd full = Embed(v, feats, x);
  const Region r = RegionFromActivations(net, GetActivations(net, full), v, feats, 0);
  EXPECT_LE((r.logits_map.Apply(x) - Forward(net, full)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ConstraintSystem, JsonRoundTrip) {
  ConstraintSystem sys(2);
  sys.Add(Vec({1, -2}), 0.5, Relation::kGt);
  sys.Add(Vec({0, 1}), 0, Relation::kEq);
  sys.SetBounds(Bounds{Vec({-1, -1}), Vec({1, 2})});
  const ConstraintSystem back = ConstraintSystem::FromJson(sys.ToJson());
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.constraints()[0].rel, Relation::kGt);
  EXPECT_EQ(back.constraints()[1].rel, Relation::kEq);
  EXPECT_EQ(back.bounds()->hi, Vec({1, 2}));
  EXPECT_THROW(ConstraintSystem::FromJson("{\"dim\":2,\"constraints\":[{\"coeffs\":[1]}]}"),
               std::exception);
}

TEST(CorrectionBounds, ShiftsByBase) {
  const Bounds b = CorrectionBounds(Vec({-1, 0, 2}), Vec({1, 5, 3}), Vec({0.5, 1, 2.5}), {0, 2});
  EXPECT_EQ(b.lo, Vec({-1.5, -0.5}));
  EXPECT_EQ(b.hi, Vec({0.5, 0.5}));
}

// ---------------------------------------------------------------- solver

TEST(LpSolver, FeasibleWithStrictRows) {
  ConstraintSystem sys(2);
  sys.Add(Vec({1, 0}), -0.3, Relation::kGt);
  sys.Add(Vec({0, -1}), -0.1, Relation::kGt);
  LpSolver solver;
  const SolverResult r = solver.CheckFeasible(sys);
  ASSERT_TRUE(r.feasible());
  EXPECT_TRUE(sys.Contains(*r.point));
}

TEST(LpSolver, ContradictionIsInfeasible) {
  ConstraintSystem sys(1);
  sys.Add(Vec({1}), 0, Relation::kGe);
  sys.Add(Vec({-1}), 0, Relation::kGt);
  LpSolver solver;
  EXPECT_EQ(solver.CheckFeasible(sys).status, SolverStatus::kInfeasible);
}

TEST(LpSolver, MinimizeAgainstStrictBound) {
  ConstraintSystem sys(1);
  sys.Add(Vec({1}), -0.3, Relation::kGt);
  LpSolver solver(SolverOptions{.epsilon_strict = 1e-6});
  const SolverResult r = solver.Minimize(sys, Vec({1}));
  ASSERT_TRUE(r.feasible());
  EXPECT_NEAR(*r.objective_value, 0.3 + 1e-6, 1e-9);
}

TEST(LpSolver, WeightedL1Minimum) {
  ConstraintSystem sys(2);
  sys.Add(Vec({1, 0}), -0.2, Relation::kGe);
  sys.Add(Vec({0, 1}), -0.3, Relation::kGe);
  LpSolver solver;
  const SolverResult r = solver.MinimizeWeightedL1(sys, Vec({1, 1}));
  ASSERT_TRUE(r.feasible());
  EXPECT_NEAR(*r.objective_value, 0.5, 1e-9);
  EXPECT_LE((*r.point - Vec({0.2, 0.3})).norm(), 1e-9);
}

TEST(LpSolver, UnboundedDirection) {
  ConstraintSystem sys(2);
  sys.Add(Vec({1, 0}), 0, Relation::kGe);
  sys.Add(Vec({0, 1}), -1, Relation::kEq);
  LpSolver solver;
  EXPECT_EQ(solver.Minimize(sys, Vec({-1, 0})).status, SolverStatus::kUnbounded);
  const SolverResult lo = solver.Minimize(sys, Vec({1, 0}));
  ASSERT_TRUE(lo.feasible());
  EXPECT_NEAR(*lo.objective_value, 0.0, 1e-12);
}

TEST(LpSolver, BoundsAreHonoured) {
  ConstraintSystem sys(2);
  sys.Add(Vec({1, 1}), -3, Relation::kGe);
  sys.SetBounds(Bounds{Vec({0, 0}), Vec({1, 1})});
  LpSolver solver;
  EXPECT_FALSE(solver.CheckFeasible(sys).feasible());
  ConstraintSystem wider(2);
  wider.Add(Vec({1, 1}), -3, Relation::kGe);
  wider.SetBounds(Bounds{Vec({0, 0}), Vec({2, 2})});
  const SolverResult r = solver.Minimize(wider, Vec({1, 0}));
  ASSERT_TRUE(r.feasible());
  EXPECT_NEAR(*r.objective_value, 1.0, 1e-9);
}

TEST(LpSolver, RandomFeasibleSystemsContainTheirWitness) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  LpSolver solver;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + trial % 5;
    Eigen::VectorXd interior(n);
    for (int i = 0; i < n; ++i) interior[i] = g(rng);
    ConstraintSystem sys(n);
    for (int k = 0; k < 3 * n; ++k) {
      Eigen::VectorXd a(n);
      for (int i = 0; i < n; ++i) a[i] = g(rng);
      // Every row passes strictly through the interior point.
      sys.Add(a, -a.dot(interior) + 0.1 + std::abs(g(rng)), Relation::kGt);
    }
    const SolverResult r = solver.CheckFeasible(sys);
    ASSERT_TRUE(r.feasible()) << "trial " << trial;
    EXPECT_TRUE(sys.Contains(*r.point));
  }
}

}  // namespace
}  // namespace symcorr
