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

// JSON for run configurations and explanation results.

#ifndef SYMCORR_JSON_IO_H_
#define SYMCORR_JSON_IO_H_

#include <optional>
#include <string>

#include <Eigen/Dense>

#include "symcorr/search.h"

namespace symcorr {

// {"search":{...},"distance":{...},"growth":{...},"domain":{"lo","hi"}}.
std::string ExplainConfigToJson(const ExplainConfig& cfg);

// Missing keys keep ExplainConfig::Defaults(input_dim); a "domain" section
// re-derives weights and radii unless "distance" sets them. Unknown keys are
// rejected.
ExplainConfig ExplainConfigFromJson(const std::string& text, int input_dim);

// Result document. Elapsed times are included only with `include_timing`,
// so that identical runs produce identical bytes.
std::string OutcomeToJson(const SearchOutcome& outcome, const ExplainConfig& cfg,
                          const Eigen::VectorXd& input, bool include_timing = false);

struct ResultFile {
  ExplainConfig config;
  Eigen::VectorXd input;
  std::string status;  // "ok" or the failure stage name
  std::optional<Interpretation> interpretation;
};

// Reads back what OutcomeToJson wrote (regions without their affine maps).
ResultFile ResultFromJson(const std::string& text);

}  // namespace symcorr

#endif  // SYMCORR_JSON_IO_H_
