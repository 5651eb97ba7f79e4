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

#include "symcorr/certify.h"

#include <gtest/gtest.h>

#include "symcorr/synth.h"
#include "test_util.h"

namespace symcorr {
namespace {

using testing_util::Vec;

const Eigen::VectorXd kV = Vec({0.2, 0.1});

TEST(CertifyLabel, BoxInsideTheAcceptedSet) {
  LpSolver solver;
  const ConvexCorrection box = ConvexCorrection::Box(Vec({0.35, -0.5}), Vec({0.7, 0.8}), {0, 1}, kV);
  const CertificateResult r = CertifyLabel(BuiltinNetwork("N1"), box, 1, solver);
  EXPECT_TRUE(r.certified);
  EXPECT_GE(r.pieces, 2);
}

TEST(CertifyLabel, BoxCrossingTheDecisionBoundary) {
  LpSolver solver;
  const ConvexCorrection box = ConvexCorrection::Box(Vec({0.1, -0.5}), Vec({0.7, 0.0}), {0, 1}, kV);
  const CertificateResult r = CertifyLabel(BuiltinNetwork("N1"), box, 1, solver);
  EXPECT_FALSE(r.certified);
  ASSERT_TRUE(r.violating_point);
  EXPECT_NE(Classify(BuiltinNetwork("N1"), kV + *r.violating_point), 1);
}

TEST(CertifyLabel, ClosedBoundaryTiesAreRejected) {
  // x1 = 0.2 gives logits (0.5, 0.5) on the lower face, which is label 0.
  LpSolver solver;
  const ConvexCorrection box = ConvexCorrection::Box(Vec({0.2, -0.5}), Vec({0.7, -0.2}), {0, 1}, kV);
  EXPECT_FALSE(CertifyLabel(BuiltinNetwork("N1"), box, 1, solver).certified);
}

TEST(CertifyLabel, AgreesWithDenseSamplingOnRandomNets) {
  LpSolver solver;
  Rng rng(3);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  int certified = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const Network net = GenNetwork(TaskSpec{.input_dim = 2, .hidden_sizes = {6, 4}, .seed = seed});
    const Eigen::VectorXd lo = Vec({u(rng), u(rng)});
    const ConvexCorrection box =
        ConvexCorrection::Box(lo, lo + Vec({0.3, 0.3}), {0, 1}, Vec({0, 0}));
    const int label = Classify(net, Centroid(box));
    const CertificateResult r = CertifyLabel(net, box, label, solver);
    if (!r.certified) continue;
    ++certified;
    for (int k = 0; k < 2000; ++k) ASSERT_EQ(Classify(net, SampleUniform(box, rng)), label);
  }
  EXPECT_GT(certified, 5);
}

}  // namespace
}  // namespace symcorr
