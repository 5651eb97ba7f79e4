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

#include <cmath>
#include <limits>
#include <utility>

#include "json.hpp"

namespace symcorr {
namespace {

using nlohmann::json;

constexpr double kConstantTolerance = 1e-12;

void CheckFeatures(const Network& net, const Eigen::VectorXd& base,
                   const std::vector<int>& features) {
  if (base.size() != net.input_dim()) {
    throw StructuralError("base input has wrong length");
  }
  std::vector<bool> seen(net.input_dim(), false);
  for (int f : features) {
    if (f < 0 || f >= net.input_dim()) {
      throw StructuralError("feature index " + std::to_string(f) +
                            " out of range");
    }
    if (seen[f]) throw StructuralError("duplicate feature index");
    seen[f] = true;
  }
}

const char* RelationName(Relation rel) {
  switch (rel) {
    case Relation::kGe: return "ge";
    case Relation::kGt: return "gt";
    case Relation::kEq: return "eq";
  }
  return "ge";
}

}  // namespace

bool LinearConstraint::Holds(const Eigen::VectorXd& x, double slack) const {
  const double value = Evaluate(x);
  switch (rel) {
    case Relation::kGe: return value >= -slack;
    case Relation::kGt: return value > -slack;
    case Relation::kEq: return std::abs(value) <= slack;
  }
  return false;
}

bool LinearConstraint::IsConstant() const {
  return coeffs.size() == 0 || coeffs.cwiseAbs().maxCoeff() <= kConstantTolerance;
}

bool LinearConstraint::ConstantHolds() const {
  switch (rel) {
    case Relation::kGe: return offset >= 0.0;
    case Relation::kGt: return offset > 0.0;
    case Relation::kEq: return offset == 0.0;
  }
  return false;
}

Bounds Bounds::Unbounded(int dim) {
  const double inf = std::numeric_limits<double>::infinity();
  return Bounds{Eigen::VectorXd::Constant(dim, -inf),
                Eigen::VectorXd::Constant(dim, inf)};
}

bool Bounds::Contains(const Eigen::VectorXd& x, double slack) const {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lo[i] - slack || x[i] > hi[i] + slack) return false;
  }
  return true;
}

void ConstraintSystem::Add(LinearConstraint c) {
  if (c.coeffs.size() != dim_) {
    throw StructuralError("constraint dimension " +
                          std::to_string(c.coeffs.size()) +
                          " does not match system dimension " +
                          std::to_string(dim_));
  }
  if (!c.coeffs.allFinite() || !std::isfinite(c.offset)) {
    throw StructuralError("constraint has non-finite entries");
  }
  if (c.IsConstant() && !c.ConstantHolds()) constant_false_ = true;
  constraints_.push_back(std::move(c));
}

void ConstraintSystem::Append(const ConstraintSystem& other) {
  if (other.dim_ != dim_) throw StructuralError("system dimension mismatch");
  for (const LinearConstraint& c : other.constraints_) Add(c);
  if (other.bounds_) SetBounds(*other.bounds_);
}

void ConstraintSystem::SetBounds(Bounds bounds) {
  if (bounds.lo.size() != dim_ || bounds.hi.size() != dim_) {
    throw StructuralError("bounds dimension mismatch");
  }
  if (bounds_) {
    bounds.lo = bounds.lo.cwiseMax(bounds_->lo);
    bounds.hi = bounds.hi.cwiseMin(bounds_->hi);
  }
  bounds_ = std::move(bounds);
}

bool ConstraintSystem::Contains(const Eigen::VectorXd& x, double slack) const {
  if (x.size() != dim_) return false;
  if (bounds_ && !bounds_->Contains(x, slack)) return false;
  for (const LinearConstraint& c : constraints_) {
    if (!c.Holds(x, slack)) return false;
  }
  return true;
}

std::string ConstraintSystem::ToJson() const {
  json doc;
  doc["dim"] = dim_;
  doc["constraints"] = json::array();
  for (const LinearConstraint& c : constraints_) {
    doc["constraints"].push_back(
        {{"coeffs", std::vector<double>(c.coeffs.data(), c.coeffs.data() + c.coeffs.size())},
         {"offset", c.offset},
         {"rel", RelationName(c.rel)}});
  }
  if (bounds_) {
    auto finite_or_null = [](const Eigen::VectorXd& v) {
      json arr = json::array();
      for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::isfinite(v[i])) {
          arr.push_back(v[i]);
        } else {
          arr.push_back(nullptr);
        }
      }
      return arr;
    };
    doc["bounds"] = {{"lo", finite_or_null(bounds_->lo)},
                     {"hi", finite_or_null(bounds_->hi)}};
  }
  return doc.dump();
}

ConstraintSystem ConstraintSystem::FromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("$: invalid JSON: ") + e.what());
  }
  if (!doc.contains("dim") || !doc["dim"].is_number_integer()) {
    throw ParseError("$.dim: expected an integer");
  }
  ConstraintSystem sys(doc["dim"].get<int>());
  const json& cs = doc.value("constraints", json::array());
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string path = "$.constraints[" + std::to_string(i) + "]";
    const auto coeffs = cs[i].at("coeffs").get<std::vector<double>>();
    if (static_cast<int>(coeffs.size()) != sys.dim()) {
      throw ParseError(path + ".coeffs: wrong length");
    }
    const std::string rel = cs[i].value("rel", std::string("ge"));
    Relation r = Relation::kGe;
    if (rel == "gt") {
      r = Relation::kGt;
    } else if (rel == "eq") {
      r = Relation::kEq;
    } else if (rel != "ge") {
      throw ParseError(path + ".rel: expected ge, gt or eq");
    }
    sys.Add(Eigen::Map<const Eigen::VectorXd>(coeffs.data(), sys.dim()),
            cs[i].at("offset").get<double>(), r);
  }
  if (doc.contains("bounds")) {
    const double inf = std::numeric_limits<double>::infinity();
    Bounds b = Bounds::Unbounded(sys.dim());
    const json& lo = doc["bounds"].at("lo");
    const json& hi = doc["bounds"].at("hi");
    for (int i = 0; i < sys.dim(); ++i) {
      b.lo[i] = lo.at(i).is_null() ? -inf : lo.at(i).get<double>();
      b.hi[i] = hi.at(i).is_null() ? inf : hi.at(i).get<double>();
    }
    sys.SetBounds(std::move(b));
  }
  return sys;
}

Eigen::VectorXd Embed(const Eigen::VectorXd& base,
                      const std::vector<int>& features,
                      const Eigen::VectorXd& x) {
  if (x.size() != static_cast<Eigen::Index>(features.size())) {
    throw StructuralError("correction length does not match feature count");
  }
  Eigen::VectorXd out = base;
  for (std::size_t k = 0; k < features.size(); ++k) {
    out[features[k]] += x[static_cast<Eigen::Index>(k)];
  }
  return out;
}

ConstraintSystem ActivationConstraints(const Network& net,
                                       const ActivationPattern& pattern,
                                       const Eigen::VectorXd& base,
                                       const std::vector<int>& features,
                                       Strictness strictness) {
  CheckFeatures(net, base, features);
  const AffineMap pre =
      HiddenPreactivationAffine(net, pattern).Restrict(base, features);
  ConstraintSystem sys(static_cast<int>(features.size()));
  const Relation off_rel =
      strictness == Strictness::kStrict ? Relation::kGt : Relation::kGe;
  for (int r = 0; r < net.num_hidden(); ++r) {
    if (pattern[r]) {
      sys.Add(pre.matrix.row(r).transpose(), pre.offset[r], Relation::kGe);
    } else {
      sys.Add(-pre.matrix.row(r).transpose(), -pre.offset[r], off_rel);
    }
  }
  return sys;
}

ConstraintSystem ClassConstraints(const Network& net,
                                  const ActivationPattern& pattern,
                                  const Eigen::VectorXd& base,
                                  const std::vector<int>& features, int desired) {
  CheckFeatures(net, base, features);
  if (desired < 0 || desired >= net.output_dim()) {
    throw StructuralError("desired label out of range");
  }
  const AffineMap logits = FixedAffine(net, pattern).Restrict(base, features);
  ConstraintSystem sys(static_cast<int>(features.size()));
  for (int c = 0; c < net.output_dim(); ++c) {
    if (c == desired) continue;
    sys.Add((logits.matrix.row(desired) - logits.matrix.row(c)).transpose(),
            logits.offset[desired] - logits.offset[c], Relation::kGt);
  }
  return sys;
}

ConstraintSystem BoundaryConstraints(const Network& net,
                                     const ActivationPattern& pattern, int p,
                                     const Eigen::VectorXd& base,
                                     const std::vector<int>& features) {
  if (p < 0 || p >= net.num_hidden()) {
    throw StructuralError("boundary neuron " + std::to_string(p) +
                          " out of range");
  }
  CheckFeatures(net, base, features);
  const AffineMap pre =
      HiddenPreactivationAffine(net, pattern).Restrict(base, features);
  ConstraintSystem sys(static_cast<int>(features.size()));
  for (int r = 0; r < net.num_hidden(); ++r) {
    if (r == p) {
      sys.Add(pre.matrix.row(r).transpose(), pre.offset[r], Relation::kEq);
    } else if (pattern[r]) {
      sys.Add(pre.matrix.row(r).transpose(), pre.offset[r], Relation::kGe);
    } else {
      sys.Add(-pre.matrix.row(r).transpose(), -pre.offset[r], Relation::kGt);
    }
  }
  return sys;
}

Region RegionFromActivations(const Network& net,
                             const ActivationPattern& pattern,
                             const Eigen::VectorXd& base,
                             const std::vector<int>& features, int desired,
                             const std::optional<Bounds>& domain) {
  Region region;
  region.features = features;
  region.base = base;
  region.pattern = pattern;
  region.system = ActivationConstraints(net, pattern, base, features);
  region.system.Append(ClassConstraints(net, pattern, base, features, desired));
  if (domain) region.system.SetBounds(*domain);
  region.logits_map = FixedAffine(net, pattern).Restrict(base, features);
  return region;
}

bool Membership(const Region& region, const Eigen::VectorXd& x) {
  return region.system.Contains(x);
}

Bounds CorrectionBounds(const Eigen::VectorXd& input_lo,
                        const Eigen::VectorXd& input_hi,
                        const Eigen::VectorXd& base,
                        const std::vector<int>& features) {
  const int n = static_cast<int>(features.size());
  Bounds b = Bounds::Unbounded(n);
  for (int k = 0; k < n; ++k) {
    b.lo[k] = input_lo[features[k]] - base[features[k]];
    b.hi[k] = input_hi[features[k]] - base[features[k]];
  }
  return b;
}

}  // namespace symcorr
