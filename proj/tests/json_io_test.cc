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

#include "symcorr/json_io.h"

#include <gtest/gtest.h>

#include "symcorr/synth.h"

namespace symcorr {
namespace {

TEST(ExplainConfigJson, RoundTripAndOverrides) {
  ExplainConfig cfg = ExplainConfig::Defaults(3);
  cfg.search.n = 1;
  cfg.search.m = 7;
  cfg.search.fgsm_step = 0.02;
  cfg.search.shape = ShapeKind::kSimplex;
  cfg.growth.max_stalls = 50;
  const ExplainConfig back = ExplainConfigFromJson(ExplainConfigToJson(cfg), 3);
  EXPECT_EQ(back.search.n, 1);
  EXPECT_EQ(back.search.m, 7);
  EXPECT_EQ(back.search.fgsm_step, 0.02);
  EXPECT_EQ(back.search.shape, ShapeKind::kSimplex);
  EXPECT_EQ(back.growth.max_stalls, 50);
  EXPECT_EQ(back.distance.weights, cfg.distance.weights);
}

TEST(ExplainConfigJson, DomainDrivesDefaults) {
  const ExplainConfig cfg =
      ExplainConfigFromJson(R"({"domain":{"lo":[0,0],"hi":[0.1,4]}})", 2);
  EXPECT_NEAR(cfg.distance.weights[0], 10.0, 1e-12);
  EXPECT_NEAR(cfg.distance.radii[1], 0.1, 1e-12);
}

TEST(ExplainConfigJson, Rejections) {
  EXPECT_THROW(ExplainConfigFromJson(R"({"bogus":1})", 2), ParseError);
  EXPECT_THROW(ExplainConfigFromJson(R"({"search":{"n":0}})", 2), ParseError);
  EXPECT_THROW(ExplainConfigFromJson(R"({"search":{"fgsm_step":-1}})", 2), ParseError);
  EXPECT_THROW(ExplainConfigFromJson(R"({"search":{"mutable_features":[5]}})", 2), ParseError);
  EXPECT_THROW(ExplainConfigFromJson(R"({"domain":{"lo":[0],"hi":[1]}})", 2), ParseError);
  EXPECT_THROW(ExplainConfigFromJson(R"({"search":{"shape":"blob"}})", 2), ParseError);
  EXPECT_THROW(ExplainConfigFromJson("{", 2), ParseError);
}

TEST(OutcomeJson, RoundTripsTheInterpretation) {
  const Network n1 = BuiltinNetwork("N1");
  const ExplainConfig cfg = ExplainConfig::Defaults(2);
  Eigen::VectorXd v(2);
  v << 0.2, 0.1;
  const SearchOutcome out = FindInterpretation(n1, v, cfg);
  ASSERT_TRUE(out.ok());
  const std::string text = OutcomeToJson(out, cfg, v);
  EXPECT_EQ(text.find("elapsed_ms"), std::string::npos);
  EXPECT_NE(OutcomeToJson(out, cfg, v, true).find("elapsed_ms"), std::string::npos);
  const ResultFile back = ResultFromJson(text);
  EXPECT_EQ(back.status, "ok");
  ASSERT_TRUE(back.interpretation);
  EXPECT_EQ(back.interpretation->correction, out.best->correction);
  EXPECT_EQ(back.interpretation->stable_center, out.best->stable_center);
  EXPECT_EQ(back.interpretation->distance, out.best->distance);
  ASSERT_EQ(back.interpretation->regions.size(), out.best->regions.size());
  for (std::size_t i = 0; i < out.best->regions.size(); ++i) {
    EXPECT_EQ(back.interpretation->regions[i].pattern, out.best->regions[i].pattern);
    EXPECT_TRUE(Membership(back.interpretation->regions[i], out.best->regions[i].witness));
  }
}

TEST(OutcomeJson, FailureHasNoInterpretation) {
  ExplainConfig cfg = ExplainConfig::Defaults(2);
  cfg.distance.e = 60;
  Eigen::VectorXd v(2);
  v << 0.2, 0.1;
  const SearchOutcome out = FindInterpretation(BuiltinNetwork("N1"), v, cfg);
  const ResultFile back = ResultFromJson(OutcomeToJson(out, cfg, v));
  EXPECT_EQ(back.status, "unstable");
  EXPECT_FALSE(back.interpretation);
  EXPECT_EQ(back.config.distance.e, 60);
}

}  // namespace
}  // namespace symcorr
