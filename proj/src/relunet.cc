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

#include "symcorr/relunet.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace symcorr {
namespace {

using nlohmann::json;

void CheckInput(const Network& net, const Eigen::VectorXd& input) {
  if (input.size() != net.input_dim()) {
    throw StructuralError("input has " + std::to_string(input.size()) +
                          " entries, network expects " +
                          std::to_string(net.input_dim()));
  }
}

void CheckPattern(const Network& net, const ActivationPattern& pattern) {
  if (static_cast<int>(pattern.size()) != net.num_hidden()) {
    throw StructuralError("activation pattern has " +
                          std::to_string(pattern.size()) +
                          " bits, network has " +
                          std::to_string(net.num_hidden()) + " hidden neurons");
  }
}

// Zeroes the rows of an affine layer whose pattern bit is false.
void MaskRows(const ActivationPattern& pattern, int offset,
              Eigen::MatrixXd& matrix, Eigen::VectorXd& vec) {
  for (int i = 0; i < matrix.rows(); ++i) {
    if (!pattern[offset + i]) {
      matrix.row(i).setZero();
      vec[i] = 0.0;
    }
  }
}

}  // namespace

Network::Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw StructuralError("network has no layers");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& layer = layers_[i];
    const std::string where = "layer " + std::to_string(i);
    if (layer.weights.rows() == 0 || layer.weights.cols() == 0) {
      throw StructuralError(where + ": empty weight matrix");
    }
    if (layer.bias.size() != layer.weights.rows()) {
      throw StructuralError(where + ": bias length does not match rows");
    }
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) {
      throw StructuralError(where + ": non-finite parameter");
    }
    if (i > 0 && layers_[i - 1].weights.rows() != layer.weights.cols()) {
      throw StructuralError(where + ": input width does not match previous "
                                    "layer output width");
    }
    const bool last = i + 1 == layers_.size();
    if (last && layer.activation != Activation::kLinear) {
      throw StructuralError("final layer must be linear");
    }
    if (!last && layer.activation != Activation::kRelu) {
      throw StructuralError(where + ": hidden layers must be relu");
    }
  }
  if (layers_.back().weights.rows() < 2) {
    throw StructuralError("final layer must have at least two outputs");
  }
  int offset = 0;
  for (int j = 0; j + 1 < static_cast<int>(layers_.size()); ++j) {
    offsets_.push_back(offset);
    offset += static_cast<int>(layers_[j].weights.rows());
  }
  num_hidden_ = offset;
}

std::vector<int> Network::hidden_sizes() const {
  std::vector<int> sizes;
  for (int j = 0; j < num_hidden_layers(); ++j) {
    sizes.push_back(static_cast<int>(layers_[j].weights.rows()));
  }
  return sizes;
}

bool Network::operator==(const Network& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& a = layers_[i];
    const Layer& b = other.layers_[i];
    if (a.activation != b.activation) return false;
    if (a.weights.rows() != b.weights.rows() ||
        a.weights.cols() != b.weights.cols()) {
      return false;
    }
    if (a.weights != b.weights || a.bias != b.bias) return false;
  }
  return true;
}

std::string ActivationPattern::ToString() const {
  std::string s(bits_.size(), '0');
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i]) s[i] = '1';
  }
  return s;
}

ActivationPattern ActivationPattern::FromString(std::string_view s) {
  std::vector<bool> bits(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '0' && s[i] != '1') {
      throw ParseError("activation pattern must be a string of 0/1");
    }
    bits[i] = s[i] == '1';
  }
  return ActivationPattern(std::move(bits));
}

Eigen::VectorXd AffineMap::Apply(const Eigen::VectorXd& x) const {
  if (x.size() != matrix.cols()) {
    throw StructuralError("affine map applied to vector of wrong length");
  }
  return matrix * x + offset;
}

AffineMap AffineMap::Restrict(const Eigen::VectorXd& base,
                              const std::vector<int>& features) const {
  if (base.size() != matrix.cols()) {
    throw StructuralError("restriction base has wrong length");
  }
  AffineMap out;
  out.matrix.resize(matrix.rows(), static_cast<Eigen::Index>(features.size()));
  for (std::size_t k = 0; k < features.size(); ++k) {
    const int f = features[k];
    if (f < 0 || f >= matrix.cols()) {
      throw StructuralError("feature index " + std::to_string(f) +
                            " out of range");
    }
    out.matrix.col(static_cast<Eigen::Index>(k)) = matrix.col(f);
  }
  out.offset = matrix * base + offset;
  return out;
}

Eigen::VectorXd Forward(const Network& net, const Eigen::VectorXd& input) {
  CheckInput(net, input);
  Eigen::VectorXd v = input;
  for (const Layer& layer : net.layers()) {
    v = layer.weights * v + layer.bias;
    if (layer.activation == Activation::kRelu) v = v.cwiseMax(0.0);
  }
  return v;
}

int ArgmaxLowest(const Eigen::VectorXd& logits) {
  int best = 0;
  for (int i = 1; i < logits.size(); ++i) {
    if (logits[i] > logits[best]) best = i;
  }
  return best;
}

int Classify(const Network& net, const Eigen::VectorXd& input) {
  return ArgmaxLowest(Forward(net, input));
}

ActivationPattern GetActivations(const Network& net,
                                 const Eigen::VectorXd& input) {
  CheckInput(net, input);
  std::vector<bool> bits;
  bits.reserve(net.num_hidden());
  Eigen::VectorXd v = input;
  for (int j = 0; j < net.num_hidden_layers(); ++j) {
    const Layer& layer = net.layers()[j];
    Eigen::VectorXd pre = layer.weights * v + layer.bias;
    for (int i = 0; i < pre.size(); ++i) bits.push_back(pre[i] >= 0.0);
    v = pre.cwiseMax(0.0);
  }
  return ActivationPattern(std::move(bits));
}

AffineMap FixedAffine(const Network& net, const ActivationPattern& pattern) {
  CheckPattern(net, pattern);
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(net.input_dim(), net.input_dim());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(net.input_dim());
  for (int j = 0; j < static_cast<int>(net.layers().size()); ++j) {
    const Layer& layer = net.layers()[j];
    Eigen::MatrixXd next_m = layer.weights * m;
    Eigen::VectorXd next_b = layer.weights * b + layer.bias;
    if (j < net.num_hidden_layers()) {
      MaskRows(pattern, net.hidden_offset(j), next_m, next_b);
    }
    m = std::move(next_m);
    b = std::move(next_b);
  }
  return AffineMap{std::move(m), std::move(b)};
}

AffineMap HiddenPreactivationAffine(const Network& net,
                                    const ActivationPattern& pattern) {
  CheckPattern(net, pattern);
  AffineMap out;
  out.matrix.resize(net.num_hidden(), net.input_dim());
  out.offset.resize(net.num_hidden());
  Eigen::MatrixXd m = Eigen::MatrixXd::Identity(net.input_dim(), net.input_dim());
  Eigen::VectorXd b = Eigen::VectorXd::Zero(net.input_dim());
  for (int j = 0; j < net.num_hidden_layers(); ++j) {
    const Layer& layer = net.layers()[j];
    Eigen::MatrixXd pre_m = layer.weights * m;
    Eigen::VectorXd pre_b = layer.weights * b + layer.bias;
    const int off = net.hidden_offset(j);
    out.matrix.middleRows(off, pre_m.rows()) = pre_m;
    out.offset.segment(off, pre_b.size()) = pre_b;
    MaskRows(pattern, off, pre_m, pre_b);
    m = std::move(pre_m);
    b = std::move(pre_b);
  }
  return out;
}

AffineMap PreactivationAffine(const Network& net,
                              const ActivationPattern& pattern, int r) {
  if (r < 0 || r >= net.num_hidden()) {
    throw StructuralError("neuron index " + std::to_string(r) +
                          " out of range");
  }
  AffineMap all = HiddenPreactivationAffine(net, pattern);
  AffineMap out;
  out.matrix = all.matrix.row(r);
  out.offset = Eigen::VectorXd::Constant(1, all.offset[r]);
  return out;
}

Eigen::VectorXd Gradient(const Network& net, const Eigen::VectorXd& input,
                         int positive, int negative) {
  CheckInput(net, input);
  if (positive < 0 || positive >= net.output_dim() || negative < 0 ||
      negative >= net.output_dim() || positive == negative) {
    throw StructuralError("gradient objective must name two distinct logits");
  }
  std::vector<Eigen::VectorXd> masks;
  Eigen::VectorXd v = input;
  for (int j = 0; j < net.num_hidden_layers(); ++j) {
    const Layer& layer = net.layers()[j];
    Eigen::VectorXd pre = layer.weights * v + layer.bias;
    masks.push_back((pre.array() >= 0.0).cast<double>().matrix());
    v = pre.cwiseMax(0.0);
  }
  const Layer& out = net.layers().back();
  Eigen::VectorXd g = (out.weights.row(positive) - out.weights.row(negative)).transpose();
  for (int j = net.num_hidden_layers() - 1; j >= 0; --j) {
    g = g.cwiseProduct(masks[j]);
    g = net.layers()[j].weights.transpose() * g;
  }
  return g;
}

// --- serialization ---------------------------------------------------------

namespace {

double FiniteNumber(const json& value, const std::string& path) {
  if (!value.is_number()) throw ParseError(path + ": expected a number");
  const double d = value.get<double>();
  if (!std::isfinite(d)) throw ParseError(path + ": non-finite value");
  return d;
}

}  // namespace

Network LoadNetwork(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("$: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("layers") || !doc["layers"].is_array()) {
    throw ParseError("$.layers: expected an array");
  }
  std::vector<Layer> layers;
  const json& jl = doc["layers"];
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const std::string path = "$.layers[" + std::to_string(i) + "]";
    const json& l = jl[i];
    if (!l.is_object()) throw ParseError(path + ": expected an object");
    if (!l.contains("weights") || !l["weights"].is_array() ||
        l["weights"].empty()) {
      throw ParseError(path + ".weights: expected a non-empty array of rows");
    }
    const json& w = l["weights"];
    const std::size_t rows = w.size();
    if (!w[0].is_array() || w[0].empty()) {
      throw ParseError(path + ".weights[0]: expected a non-empty array");
    }
    const std::size_t cols = w[0].size();
    Layer layer;
    layer.weights.resize(static_cast<Eigen::Index>(rows),
                         static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows; ++r) {
      const std::string rp = path + ".weights[" + std::to_string(r) + "]";
      if (!w[r].is_array() || w[r].size() != cols) {
        throw ParseError(rp + ": expected " + std::to_string(cols) + " entries");
      }
      for (std::size_t c = 0; c < cols; ++c) {
        layer.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
            FiniteNumber(w[r][c], rp + "[" + std::to_string(c) + "]");
      }
    }
    if (!l.contains("bias") || !l["bias"].is_array()) {
      throw ParseError(path + ".bias: expected an array");
    }
    const json& b = l["bias"];
    if (b.size() != rows) {
      throw ParseError(path + ".bias: expected " + std::to_string(rows) +
                       " entries, got " + std::to_string(b.size()));
    }
    layer.bias.resize(static_cast<Eigen::Index>(rows));
    for (std::size_t r = 0; r < rows; ++r) {
      layer.bias[static_cast<Eigen::Index>(r)] =
          FiniteNumber(b[r], path + ".bias[" + std::to_string(r) + "]");
    }
    const std::string act = l.value("activation", std::string());
    if (act == "relu") {
      layer.activation = Activation::kRelu;
    } else if (act == "linear") {
      layer.activation = Activation::kLinear;
    } else {
      throw ParseError(path + ".activation: expected \"relu\" or \"linear\"");
    }
    if (!layers.empty() && layers.back().weights.rows() != layer.weights.cols()) {
      throw ParseError(path + ".weights: input width " + std::to_string(cols) +
                       " does not match previous layer output width " +
                       std::to_string(layers.back().weights.rows()));
    }
    layers.push_back(std::move(layer));
  }
  try {
    return Network(std::move(layers));
  } catch (const StructuralError& e) {
    throw ParseError(std::string("$.layers: ") + e.what());
  }
}

std::string SaveNetwork(const Network& net) {
  json doc;
  doc["layers"] = json::array();
  for (const Layer& layer : net.layers()) {
    json l;
    l["weights"] = json::array();
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        row.push_back(layer.weights(r, c));
      }
      l["weights"].push_back(std::move(row));
    }
    l["bias"] = std::vector<double>(layer.bias.data(),
                                    layer.bias.data() + layer.bias.size());
    l["activation"] = layer.activation == Activation::kRelu ? "relu" : "linear";
    doc["layers"].push_back(std::move(l));
  }
  return doc.dump();
}

Network LoadNetworkFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open network file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return LoadNetwork(ss.str());
}

void SaveNetworkFile(const Network& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << SaveNetwork(net) << "\n";
}

}  // namespace symcorr
