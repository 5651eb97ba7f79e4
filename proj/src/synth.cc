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

#include "symcorr/synth.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace symcorr {
namespace {

Eigen::VectorXd UniformVector(int n, double lo, double hi, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

Layer RandomLayer(int rows, int cols, Activation act, std::mt19937_64& rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(cols));
  std::uniform_real_distribution<double> u(-scale, scale);
  Layer layer;
  layer.weights.resize(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) layer.weights(i, j) = u(rng);
  }
  layer.bias.resize(rows);
  for (int i = 0; i < rows; ++i) layer.bias[i] = u(rng);
  layer.activation = act;
  return layer;
}

Layer MakeLayer(std::initializer_list<std::initializer_list<double>> w,
                std::initializer_list<double> b, Activation act) {
  Layer layer;
  layer.weights.resize(static_cast<Eigen::Index>(w.size()),
                       static_cast<Eigen::Index>(w.begin()->size()));
  int i = 0;
  for (const auto& row : w) {
    int j = 0;
    for (double x : row) layer.weights(i, j++) = x;
    ++i;
  }
  layer.bias.resize(static_cast<Eigen::Index>(b.size()));
  i = 0;
  for (double x : b) layer.bias[i++] = x;
  layer.activation = act;
  return layer;
}

}  // namespace

double LabelRule::Score(const Eigen::VectorXd& x) const {
  const double a = w.dot(x);
  if (kind == Kind::kHinge) return std::max(a, u.dot(x));
  return a;
}

LabelRule RandomRule(const TaskSpec& spec, LabelRule::Kind kind) {
  std::mt19937_64 rng(spec.seed ^ 0x5DEECE66DULL);
  LabelRule rule;
  rule.kind = kind;
  rule.w = UniformVector(spec.input_dim, -1.0, 1.0, rng);
  rule.u = UniformVector(spec.input_dim, -1.0, 1.0, rng);
  std::vector<double> scores(2001);
  for (double& s : scores) s = rule.Score(UniformVector(spec.input_dim, spec.lo, spec.hi, rng));
  std::nth_element(scores.begin(), scores.begin() + 1000, scores.end());
  rule.threshold = scores[1000];
  return rule;
}

Network GenNetwork(const TaskSpec& spec) {
  if (spec.input_dim < 1) throw StructuralError("input_dim must be at least 1");
  std::mt19937_64 rng(spec.seed);
  std::vector<Layer> layers;
  int fan_in = spec.input_dim;
  for (int h : spec.hidden_sizes) {
    if (h < 1) throw StructuralError("hidden sizes must be at least 1");
    layers.push_back(RandomLayer(h, fan_in, Activation::kRelu, rng));
    fan_in = h;
  }
  layers.push_back(RandomLayer(2, fan_in, Activation::kLinear, rng));
  return Network(std::move(layers));
}

Network BuiltinNetwork(const std::string& name) {
  if (name == "N1") {
    return Network({MakeLayer({{1, 0}, {0, 1}}, {0, 0}, Activation::kRelu),
                    MakeLayer({{0, 0}, {1, 1}}, {0.5, 0}, Activation::kLinear)});
  }
  if (name == "N2") {
    return Network({MakeLayer({{1, 0}, {0, 1}}, {0, 0}, Activation::kRelu),
                    MakeLayer({{1, -1}, {-1, 1}, {1, 1}}, {0, 0, -0.5}, Activation::kRelu),
                    MakeLayer({{0, 0, 0}, {1, 1, 1}}, {0.5, 0}, Activation::kLinear)});
  }
  throw StructuralError("unknown builtin network '" + name + "'");
}

std::vector<std::string> BuiltinNetworkNames() { return {"N1", "N2"}; }

Dataset GenDataset(const TaskSpec& spec) {
  const LabelRule rule = spec.rule.w.size() ? spec.rule : RandomRule(spec);
  if (rule.w.size() != spec.input_dim) throw StructuralError("label rule has wrong dimension");
  std::mt19937_64 rng(spec.seed ^ 0x2545F4914F6CDD1DULL);
  Dataset data;
  data.reserve(static_cast<std::size_t>(std::max(0, spec.dataset_size)));
  for (int i = 0; i < spec.dataset_size; ++i) {
    Sample s;
    s.x = UniformVector(spec.input_dim, spec.lo, spec.hi, rng);
    s.label = rule.Label(s.x);
    data.push_back(std::move(s));
  }
  return data;
}

std::string DatasetToCsv(const Dataset& data) {
  std::ostringstream out;
  out.precision(17);
  const int d = data.empty() ? 0 : static_cast<int>(data.front().x.size());
  for (int i = 0; i < d; ++i) out << "x" << (i + 1) << ",";
  out << "label\n";
  for (const Sample& s : data) {
    for (int i = 0; i < d; ++i) out << s.x[i] << ",";
    out << s.label << "\n";
  }
  return out.str();
}

Dataset DatasetFromCsv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw ParseError("dataset is empty (missing header)");
  const int columns = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  Dataset data;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<double> values;
    std::stringstream row(line);
    std::string cell;
    while (std::getline(row, cell, ',')) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(cell, &used));
        if (used != cell.size() && cell.find_first_not_of(" \r", used) != std::string::npos) {
          throw std::invalid_argument(cell);
        }
      } catch (const std::exception&) {
        throw ParseError("dataset line " + std::to_string(line_no) + ": bad number '" + cell + "'");
      }
    }
    if (static_cast<int>(values.size()) != columns) {
      throw ParseError("dataset line " + std::to_string(line_no) + ": expected " +
                       std::to_string(columns) + " columns");
    }
    Sample s;
    s.x = Eigen::Map<Eigen::VectorXd>(values.data(), columns - 1);
    s.label = static_cast<int>(values.back());
    data.push_back(std::move(s));
  }
  return data;
}

Network TrainTiny(const Dataset& data, const TrainOptions& options) {
  if (data.empty()) throw StructuralError("cannot train on an empty dataset");
  TaskSpec spec;
  spec.input_dim = static_cast<int>(data.front().x.size());
  spec.hidden_sizes = options.hidden_sizes;
  spec.seed = options.seed;
  std::vector<Layer> layers = GenNetwork(spec).layers();
  const int num_layers = static_cast<int>(layers.size());
  const double inv_n = 1.0 / static_cast<double>(data.size());

  for (int epoch = 0; epoch < options.epochs; ++epoch) {
    std::vector<Eigen::MatrixXd> grad_w(num_layers);
    std::vector<Eigen::VectorXd> grad_b(num_layers);
    for (int l = 0; l < num_layers; ++l) {
      grad_w[l] = Eigen::MatrixXd::Zero(layers[l].weights.rows(), layers[l].weights.cols());
      grad_b[l] = Eigen::VectorXd::Zero(layers[l].bias.size());
    }
    double loss = 0.0;
    std::vector<Eigen::VectorXd> acts(num_layers + 1);
    std::vector<Eigen::VectorXd> pres(num_layers);
    for (const Sample& s : data) {
      acts[0] = s.x;
      for (int l = 0; l < num_layers; ++l) {
        pres[l] = layers[l].weights * acts[l] + layers[l].bias;
        acts[l + 1] = layers[l].activation == Activation::kRelu ? pres[l].cwiseMax(0.0)
                                                                : pres[l];
      }
      const Eigen::VectorXd& z = acts[num_layers];
      const double zmax = z.maxCoeff();
      Eigen::VectorXd p = (z.array() - zmax).exp();
      const double total = p.sum();
      p /= total;
      loss -= std::log(std::max(p[s.label], 1e-300));
      Eigen::VectorXd delta = p;
      delta[s.label] -= 1.0;
      for (int l = num_layers - 1; l >= 0; --l) {
        if (layers[l].activation == Activation::kRelu) {
          delta = delta.cwiseProduct((pres[l].array() > 0.0).cast<double>().matrix());
        }
        grad_w[l].noalias() += delta * acts[l].transpose();
        grad_b[l] += delta;
        if (l > 0) delta = layers[l].weights.transpose() * delta;
      }
    }
    loss *= inv_n;
    if (!std::isfinite(loss)) {
      throw std::runtime_error("training diverged at epoch " + std::to_string(epoch));
    }
    for (int l = 0; l < num_layers; ++l) {
      layers[l].weights -= options.lr * inv_n * grad_w[l];
      layers[l].bias -= options.lr * inv_n * grad_b[l];
    }
  }
  for (const Layer& l : layers) {
    if (!l.weights.allFinite() || !l.bias.allFinite()) {
      throw std::runtime_error("training produced non-finite parameters");
    }
  }
  return Network(std::move(layers));
}

double Accuracy(const Network& net, const Dataset& data) {
  if (data.empty()) return 0.0;
  int correct = 0;
  for (const Sample& s : data) correct += Classify(net, s.x) == s.label ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace symcorr
