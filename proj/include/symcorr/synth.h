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

// Small synthetic tasks for demos and integration tests: seeded random
// networks, two hand-built reference networks, a threshold-labelled tabular
// dataset, and a full-batch gradient descent trainer.

#ifndef SYMCORR_SYNTH_H_
#define SYMCORR_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symcorr/relunet.h"

namespace symcorr {

// label = [score(x) > threshold], where score is w.x (linear) or
// max(w.x, u.x) (hinge).
struct LabelRule {
  enum class Kind { kLinear, kHinge };
  Kind kind = Kind::kLinear;
  Eigen::VectorXd w;
  Eigen::VectorXd u;
  double threshold = 0.0;

  double Score(const Eigen::VectorXd& x) const;
  int Label(const Eigen::VectorXd& x) const { return Score(x) > threshold ? 1 : 0; }
};

struct TaskSpec {
  int input_dim = 2;
  std::vector<int> hidden_sizes = {8};
  std::uint64_t seed = 0;
  int dataset_size = 1000;
  double lo = -1.0;
  double hi = 1.0;
  LabelRule rule;  // empty w means RandomRule(*this)
};

// A random rule with its threshold at the median score of a seeded sample,
// so both labels are about equally common.
LabelRule RandomRule(const TaskSpec& spec, LabelRule::Kind kind = LabelRule::Kind::kLinear);

// Hidden ReLU layers of the given sizes, then a linear layer of width 2.
// Weights and biases are uniform(-1, 1) / sqrt(fan_in).
Network GenNetwork(const TaskSpec& spec);

// "N1": two inputs, identity hidden layer, logits (0.5, relu(x) + relu(y)).
// "N2": N1's shape with a second hidden layer.
Network BuiltinNetwork(const std::string& name);
std::vector<std::string> BuiltinNetworkNames();

struct Sample {
  Eigen::VectorXd x;
  int label = 0;
};
using Dataset = std::vector<Sample>;

// Inputs uniform in [lo, hi]^d, labels from the rule.
Dataset GenDataset(const TaskSpec& spec);

// "x1,...,xd,label" with a header row.
std::string DatasetToCsv(const Dataset& data);
Dataset DatasetFromCsv(const std::string& text);

struct TrainOptions {
  std::vector<int> hidden_sizes = {8};
  int epochs = 200;
  double lr = 0.5;
  std::uint64_t seed = 0;
};

// Full-batch gradient descent on mean softmax cross-entropy, starting from
// GenNetwork. Throws std::runtime_error when the loss becomes non-finite.
Network TrainTiny(const Dataset& data, const TrainOptions& options);

double Accuracy(const Network& net, const Dataset& data);

}  // namespace symcorr

#endif  // SYMCORR_SYNTH_H_
