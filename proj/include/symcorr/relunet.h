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

// ReLU feed-forward networks: evaluation, activation patterns, the affine
// maps obtained by fixing an activation pattern, and input gradients.

#ifndef SYMCORR_RELUNET_H_
#define SYMCORR_RELUNET_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace symcorr {

// Thrown for dimension mismatches and malformed networks.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a serialized network does not match the schema. The message
// names the offending JSON path.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Activation { kRelu, kLinear };

struct Layer {
  Eigen::MatrixXd weights;  // rows = output width, cols = input width
  Eigen::VectorXd bias;
  Activation activation = Activation::kRelu;
};

// Dense network: k ReLU hidden layers followed by one linear logit layer
// with at least two outputs. Immutable after construction.
class Network {
 public:
  explicit Network(std::vector<Layer> layers);

  const std::vector<Layer>& layers() const { return layers_; }
  int input_dim() const { return static_cast<int>(layers_.front().weights.cols()); }
  int output_dim() const { return static_cast<int>(layers_.back().weights.rows()); }
  int num_hidden_layers() const { return static_cast<int>(layers_.size()) - 1; }
  // Total number of hidden neurons.
  int num_hidden() const { return num_hidden_; }
  std::vector<int> hidden_sizes() const;
  // First flat neuron index of hidden layer `layer`.
  int hidden_offset(int layer) const { return offsets_[layer]; }

  bool operator==(const Network& other) const;

 private:
  std::vector<Layer> layers_;
  std::vector<int> offsets_;
  int num_hidden_ = 0;
};

// One bit per hidden neuron, layer-major: bit r = hidden_offset(j) + m for
// neuron m of hidden layer j. A bit is set when the pre-activation is >= 0.
class ActivationPattern {
 public:
  ActivationPattern() = default;
  explicit ActivationPattern(std::vector<bool> bits) : bits_(std::move(bits)) {}

  std::size_t size() const { return bits_.size(); }
  bool operator[](std::size_t r) const { return bits_[r]; }
  void flip(std::size_t r) { bits_[r] = !bits_[r]; }
  void set(std::size_t r, bool value) { bits_[r] = value; }
  const std::vector<bool>& bits() const { return bits_; }

  // "1" for active, "0" for inactive, in neuron order.
  std::string ToString() const;
  static ActivationPattern FromString(std::string_view s);

  bool operator==(const ActivationPattern&) const = default;
  auto operator<=>(const ActivationPattern&) const = default;

 private:
  std::vector<bool> bits_;
};

struct ActivationPatternHash {
  std::size_t operator()(const ActivationPattern& p) const {
    return std::hash<std::vector<bool>>{}(p.bits());
  }
};

// x -> matrix * x + offset.
struct AffineMap {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd offset;

  int input_dim() const { return static_cast<int>(matrix.cols()); }
  int output_dim() const { return static_cast<int>(matrix.rows()); }
  Eigen::VectorXd Apply(const Eigen::VectorXd& x) const;
  // Restricts the map to the input coordinates in `features`, with `base`
  // supplying the remaining coordinates: y = A (base + E x) + b.
  AffineMap Restrict(const Eigen::VectorXd& base,
                     const std::vector<int>& features) const;
};

Eigen::VectorXd Forward(const Network& net, const Eigen::VectorXd& input);

// Argmax of the logits; exact ties go to the lowest index.
int Classify(const Network& net, const Eigen::VectorXd& input);
int ArgmaxLowest(const Eigen::VectorXd& logits);

ActivationPattern GetActivations(const Network& net,
                                 const Eigen::VectorXd& input);

// Composition of all layers with each hidden row zeroed where the pattern
// bit is false.
AffineMap FixedAffine(const Network& net, const ActivationPattern& pattern);

// Pre-activation of hidden neuron r as an affine function of the raw input
// when every shallower layer is fixed to `pattern`. Bit r itself is unused.
AffineMap PreactivationAffine(const Network& net,
                              const ActivationPattern& pattern, int r);

// All hidden pre-activations at once: row r equals
// PreactivationAffine(net, pattern, r).
AffineMap HiddenPreactivationAffine(const Network& net,
                                    const ActivationPattern& pattern);

// d(logits[positive] - logits[negative]) / d input by reverse accumulation.
// The ReLU derivative at exactly zero is taken as 1.
Eigen::VectorXd Gradient(const Network& net, const Eigen::VectorXd& input,
                         int positive, int negative);

Network LoadNetwork(std::string_view json_text);
std::string SaveNetwork(const Network& net);
Network LoadNetworkFile(const std::string& path);
void SaveNetworkFile(const Network& net, const std::string& path);

}  // namespace symcorr

#endif  // SYMCORR_RELUNET_H_
