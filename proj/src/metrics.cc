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

#include <cmath>
#include <limits>
#include <utility>

#include "json.hpp"

namespace symcorr {
namespace {

using nlohmann::json;

constexpr double kBallSlack = 1e-9;
constexpr int kMaxBallCornerAxes = 10;

Eigen::VectorXd Restrict(const Eigen::VectorXd& per_feature,
                         const std::vector<int>& features) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(features.size()));
  for (std::size_t k = 0; k < features.size(); ++k) {
    out[static_cast<Eigen::Index>(k)] = per_feature[features[k]];
  }
  return out;
}

std::vector<int> AllAxes(int dim) {
  std::vector<int> axes(dim);
  for (int i = 0; i < dim; ++i) axes[i] = i;
  return axes;
}

Eigen::VectorXd ReadVector(const json& j, const std::string& path,
                           Eigen::Index expected) {
  if (!j.is_array()) throw ParseError(path + ": expected an array");
  if (static_cast<Eigen::Index>(j.size()) != expected) {
    throw ParseError(path + ": expected " + std::to_string(expected) + " entries");
  }
  Eigen::VectorXd v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) {
    if (!j[i].is_number()) throw ParseError(path + ": expected numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

}  // namespace

DistanceConfig DistanceConfig::FromRanges(const Eigen::VectorXd& lo,
                                          const Eigen::VectorXd& hi) {
  DistanceConfig cfg;
  const Eigen::VectorXd range = hi - lo;
  cfg.weights = range.cwiseInverse();
  cfg.radii = 0.025 * range;
  return cfg;
}

ConstraintSystem Erode(const ConvexCorrection& c, const DistanceConfig& cfg,
                       const std::vector<int>& axes) {
  const std::vector<int> use = axes.empty() ? AllAxes(c.dim()) : axes;
  const Eigen::VectorXd r = Restrict(cfg.radii, c.features);
  ConstraintSystem facets = Facets(c);
  ConstraintSystem eroded(c.dim());
  for (const LinearConstraint& f : facets.constraints()) {
    double shrink = 0.0;
    for (int i : use) shrink += std::abs(f.coeffs[i]) * r[i];
    eroded.Add(f.coeffs, f.offset - cfg.e * shrink, Relation::kGe);
  }
  return eroded;
}

std::vector<std::vector<int>> StabilityAxisSets(int dim, StabilityMode mode) {
  if (mode == StabilityMode::kAll || dim < 2) return {AllAxes(dim)};
  std::vector<std::vector<int>> sets;
  for (int i = 0; i < dim; ++i) {
    for (int j = i + 1; j < dim; ++j) sets.push_back({i, j});
  }
  return sets;
}

StabilityReport DisE(const ConvexCorrection& c, const DistanceConfig& cfg,
                     LpSolver& solver) {
  StabilityReport report;
  if (cfg.min_box_side > 0.0 && c.kind == ShapeKind::kBox &&
      ((c.hi - c.lo).array() < cfg.min_box_side).any()) {
    return report;
  }
  const Eigen::VectorXd w = Restrict(cfg.weights, c.features);
  double best = std::numeric_limits<double>::infinity();
  for (const std::vector<int>& axes : StabilityAxisSets(c.dim(), cfg.mode)) {
    SolverResult r = solver.MinimizeWeightedL1(Erode(c, cfg, axes), w);
    if (!r.feasible()) continue;
    report.eroded_nonempty = true;
    if (*r.objective_value < best) {
      best = *r.objective_value;
      report.center = *r.point;
      report.stability_axes = axes;
    }
  }
  if (!report.center) return report;
  Rng rng(0);
  report.ball_check_passed =
      VerifyStability(c, *report.center, cfg, report.stability_axes, rng);
  if (report.ball_check_passed) {
    report.numeric_distance = best;
    report.distance = best;
  }
  return report;
}

StabilityReport DisE(const ConvexCorrection& c, const DistanceConfig& cfg,
                     LpSolver& solver, const Eigen::VectorXd& original_input) {
  StabilityReport report = DisE(c, cfg, solver);
  report.categorical_penalty = CategoricalPenalty(cfg, c.base, original_input);
  if (report.distance) *report.distance += report.categorical_penalty;
  return report;
}

std::vector<Eigen::VectorXd> StabilityBallSamples(const ConvexCorrection& c,
                                                  const Eigen::VectorXd& center,
                                                  const DistanceConfig& cfg,
                                                  const std::vector<int>& axes,
                                                  Rng& rng, int samples) {
  const std::vector<int> use = axes.empty() ? AllAxes(c.dim()) : axes;
  const Eigen::VectorXd r = Restrict(cfg.radii, c.features);
  std::vector<Eigen::VectorXd> points;
  const int corner_axes = static_cast<int>(use.size());
  if (corner_axes <= kMaxBallCornerAxes) {
    const std::size_t corners = std::size_t{1} << corner_axes;
    for (std::size_t m = 0; m < corners && static_cast<int>(points.size()) < samples; ++m) {
      Eigen::VectorXd x = center;
      for (int k = 0; k < corner_axes; ++k) {
        const int i = use[k];
        x[i] += ((m >> k) & 1U ? 1.0 : -1.0) * cfg.e * r[i];
      }
      points.push_back(std::move(x));
    }
  }
  std::uniform_real_distribution<double> sym(-1.0, 1.0);
  while (static_cast<int>(points.size()) < samples) {
    Eigen::VectorXd x = center;
    for (int i : use) x[i] += sym(rng) * cfg.e * r[i];
    points.push_back(std::move(x));
  }
  return points;
}

bool VerifyStability(const ConvexCorrection& c, const Eigen::VectorXd& center,
                     const DistanceConfig& cfg, const std::vector<int>& axes,
                     Rng& rng, int samples) {
  if (!center.allFinite()) return false;
  const ConstraintSystem facets = Facets(c);
  for (const Eigen::VectorXd& x : StabilityBallSamples(c, center, cfg, axes, rng, samples)) {
    if (!facets.Contains(x, kBallSlack)) return false;
  }
  return true;
}

double WeightedL1(const Eigen::VectorXd& x, const Eigen::VectorXd& weights) {
  if (x.size() != weights.size()) throw StructuralError("weights length mismatch");
  return weights.dot(x.cwiseAbs());
}

int L0Distance(const ConvexCorrection& c, const Eigen::VectorXd& center) {
  int count = 0;
  for (int i = 0; i < c.dim(); ++i) {
    double lo = 0.0;
    double hi = 0.0;
    if (c.kind == ShapeKind::kBox) {
      lo = c.lo[i];
      hi = c.hi[i];
    } else {
      lo = hi = c.vertices.front()[i];
      for (const Eigen::VectorXd& v : c.vertices) {
        lo = std::min(lo, v[i]);
        hi = std::max(hi, v[i]);
      }
    }
    const bool excludes_zero = lo > 0.0 || hi < 0.0;
    if (excludes_zero || center[i] != 0.0) ++count;
  }
  return count;
}

double CategoricalPenalty(const DistanceConfig& cfg, const Eigen::VectorXd& base,
                          const Eigen::VectorXd& original_input) {
  double penalty = 0.0;
  for (const CategoricalGroup& g : cfg.categorical) {
    for (int idx : g.indices) {
      if (base[idx] != original_input[idx]) {
        penalty += g.penalty;
        break;
      }
    }
  }
  return penalty;
}

std::string DistanceConfigToJson(const DistanceConfig& cfg) {
  json doc;
  doc["weights"] = std::vector<double>(cfg.weights.data(), cfg.weights.data() + cfg.weights.size());
  doc["radii"] = std::vector<double>(cfg.radii.data(), cfg.radii.data() + cfg.radii.size());
  doc["e"] = cfg.e;
  doc["mode"] = cfg.mode == StabilityMode::kAll ? "all" : "pairwise";
  doc["min_box_side"] = cfg.min_box_side;
  doc["categorical"] = json::array();
  for (const CategoricalGroup& g : cfg.categorical) {
    doc["categorical"].push_back(
        {{"indices", g.indices}, {"values", g.values}, {"penalty", g.penalty}});
  }
  return doc.dump();
}

DistanceConfig DistanceConfigFromJson(const std::string& text,
                                      const DistanceConfig& defaults) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("$: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("$: expected an object");
  DistanceConfig cfg = defaults;
  const Eigen::Index d = defaults.weights.size();
  if (doc.contains("weights")) cfg.weights = ReadVector(doc["weights"], "$.weights", d);
  if (doc.contains("radii")) cfg.radii = ReadVector(doc["radii"], "$.radii", d);
  if (doc.contains("e")) {
    if (!doc["e"].is_number()) throw ParseError("$.e: expected a number");
    cfg.e = doc["e"].get<double>();
  }
  if (doc.contains("min_box_side")) cfg.min_box_side = doc["min_box_side"].get<double>();
  if (doc.contains("mode")) {
    const std::string mode = doc["mode"].get<std::string>();
    if (mode == "all") {
      cfg.mode = StabilityMode::kAll;
    } else if (mode == "pairwise") {
      cfg.mode = StabilityMode::kPairwise;
    } else {
      throw ParseError("$.mode: expected \"all\" or \"pairwise\"");
    }
  }
  if (doc.contains("categorical")) {
    cfg.categorical.clear();
    const json& cats = doc["categorical"];
    for (std::size_t i = 0; i < cats.size(); ++i) {
      const std::string path = "$.categorical[" + std::to_string(i) + "]";
      CategoricalGroup g;
      try {
        g.indices = cats[i].at("indices").get<std::vector<int>>();
        g.values = cats[i].at("values").get<std::vector<std::vector<double>>>();
        g.penalty = cats[i].value("penalty", 1.0);
      } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
      }
      for (int idx : g.indices) {
        if (idx < 0 || idx >= d) throw ParseError(path + ".indices: out of range");
      }
      for (const auto& v : g.values) {
        if (v.size() != g.indices.size()) {
          throw ParseError(path + ".values: each value needs one entry per index");
        }
      }
      if (g.values.empty()) throw ParseError(path + ".values: empty");
      cfg.categorical.push_back(std::move(g));
    }
  }
  if (!(cfg.e > 0.0)) throw ParseError("$.e: must be positive");
  if ((cfg.radii.array() <= 0.0).any()) throw ParseError("$.radii: must be positive");
  if ((cfg.weights.array() < 0.0).any()) throw ParseError("$.weights: must be non-negative");
  return cfg;
}

}  // namespace symcorr
