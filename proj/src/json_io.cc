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

#include <set>
#include <utility>
#include <vector>

#include "json.hpp"

namespace symcorr {
namespace {

using nlohmann::json;

std::vector<double> ToStd(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Eigen::VectorXd ToVector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path + ": expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError(path + "[" + std::to_string(i) + "]: expected a number");
    v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  }
  return v;
}

json Parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("$: invalid JSON: ") + e.what());
  }
}

void CheckKeys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) throw ParseError(path + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.contains(it.key())) throw ParseError(path + ": unknown key '" + it.key() + "'");
  }
}

template <typename T>
void Read(const json& obj, const char* key, const std::string& path, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(path + "." + key + ": wrong type");
  }
}

json Search(const SearchParams& s) {
  json j;
  j["n"] = s.n;
  j["m"] = s.m;
  j["max_fgsm_iters"] = s.max_fgsm_iters;
  j["fgsm_step"] = s.fgsm_step ? json(*s.fgsm_step) : json(nullptr);
  j["mutable_features"] = s.mutable_features;
  j["desired_label"] = s.desired_label;
  j["seed"] = s.rng_seed;
  j["sigma"] = s.sigma;
  j["threads"] = s.threads;
  j["shape"] = ShapeKindName(s.shape);
  j["epsilon_strict"] = s.epsilon_strict;
  j["audit_samples"] = s.audit_samples;
  return j;
}

json Growth(const GrowthParams& g) {
  return {{"init_scale", g.init_scale},
          {"step", g.step},
          {"max_stalls", g.max_stalls},
          {"containment_samples", g.containment_samples},
          {"retries", g.retries},
          {"max_halvings", g.max_halvings}};
}

json ConfigJson(const ExplainConfig& cfg) {
  json j;
  j["search"] = Search(cfg.search);
  j["distance"] = json::parse(DistanceConfigToJson(cfg.distance));
  j["growth"] = Growth(cfg.growth);
  j["domain"] = {{"lo", ToStd(cfg.domain.lo)}, {"hi", ToStd(cfg.domain.hi)}};
  return j;
}

ExplainConfig ConfigFromJson(const json& doc, int input_dim) {
  CheckKeys(doc, "$", {"search", "distance", "growth", "domain"});
  ExplainConfig cfg = ExplainConfig::Defaults(input_dim);
  if (doc.contains("domain")) {
    const json& d = doc["domain"];
    CheckKeys(d, "$.domain", {"lo", "hi"});
    if (d.contains("lo")) cfg.domain.lo = ToVector(d["lo"], "$.domain.lo");
    if (d.contains("hi")) cfg.domain.hi = ToVector(d["hi"], "$.domain.hi");
    if (cfg.domain.lo.size() != input_dim || cfg.domain.hi.size() != input_dim) {
      throw ParseError("$.domain: lo and hi need " + std::to_string(input_dim) + " entries");
    }
    if ((cfg.domain.lo.array() >= cfg.domain.hi.array()).any()) {
      throw ParseError("$.domain: every lo must be below hi");
    }
    cfg.ApplyDomainDefaults();
  }
  if (doc.contains("distance")) {
    cfg.distance = DistanceConfigFromJson(doc["distance"].dump(), cfg.distance);
  }
  if (doc.contains("search")) {
    const json& s = doc["search"];
    const std::string p = "$.search";
    CheckKeys(s, p, {"n", "m", "max_fgsm_iters", "fgsm_step", "mutable_features",
                     "desired_label", "seed", "sigma", "threads", "shape", "epsilon_strict",
                     "audit_samples"});
    SearchParams& sp = cfg.search;
    Read(s, "n", p, sp.n);
    Read(s, "m", p, sp.m);
    Read(s, "max_fgsm_iters", p, sp.max_fgsm_iters);
    if (s.contains("fgsm_step") && !s["fgsm_step"].is_null()) {
      double step = 0.0;
      Read(s, "fgsm_step", p, step);
      if (!(step > 0.0)) throw ParseError(p + ".fgsm_step: must be positive");
      sp.fgsm_step = step;
    }
    Read(s, "mutable_features", p, sp.mutable_features);
    Read(s, "desired_label", p, sp.desired_label);
    Read(s, "seed", p, sp.rng_seed);
    Read(s, "sigma", p, sp.sigma);
    Read(s, "threads", p, sp.threads);
    if (s.contains("shape")) {
      std::string shape;
      Read(s, "shape", p, shape);
      try {
        sp.shape = ParseShapeKind(shape);
      } catch (const std::exception& e) {
        throw ParseError(p + ".shape: " + e.what());
      }
    }
    Read(s, "epsilon_strict", p, sp.epsilon_strict);
    Read(s, "audit_samples", p, sp.audit_samples);
    if (sp.n < 1) throw ParseError(p + ".n: must be at least 1");
    if (sp.m < 1) throw ParseError(p + ".m: must be at least 1");
    if (sp.max_fgsm_iters < 0) throw ParseError(p + ".max_fgsm_iters: must be non-negative");
    if (!(sp.epsilon_strict > 0.0)) throw ParseError(p + ".epsilon_strict: must be positive");
    for (int f : sp.mutable_features) {
      if (f < 0 || f >= input_dim) {
        throw ParseError(p + ".mutable_features: index " + std::to_string(f) + " out of range");
      }
    }
  }
  if (doc.contains("growth")) {
    const json& g = doc["growth"];
    const std::string p = "$.growth";
    CheckKeys(g, p, {"init_scale", "step", "max_stalls", "containment_samples", "retries",
                     "max_halvings"});
    GrowthParams& gp = cfg.growth;
    Read(g, "init_scale", p, gp.init_scale);
    Read(g, "step", p, gp.step);
    Read(g, "max_stalls", p, gp.max_stalls);
    Read(g, "containment_samples", p, gp.containment_samples);
    Read(g, "retries", p, gp.retries);
    Read(g, "max_halvings", p, gp.max_halvings);
    if (!(gp.init_scale > 0.0) || !(gp.step > 0.0)) {
      throw ParseError(p + ": init_scale and step must be positive");
    }
    if (gp.max_stalls < 0 || gp.containment_samples < 0 || gp.retries < 1) {
      throw ParseError(p + ": counts must be non-negative and retries at least 1");
    }
  }
  return cfg;
}

json OptionalNumber(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string ExplainConfigToJson(const ExplainConfig& cfg) { return ConfigJson(cfg).dump(2); }

ExplainConfig ExplainConfigFromJson(const std::string& text, int input_dim) {
  return ConfigFromJson(Parse(text), input_dim);
}

std::string OutcomeToJson(const SearchOutcome& outcome, const ExplainConfig& cfg,
                          const Eigen::VectorXd& input, bool include_timing) {
  json doc;
  doc["status"] = outcome.ok() ? "ok" : FailureStageName(outcome.stage);
  if (!outcome.ok()) doc["message"] = outcome.message;
  doc["input"] = ToStd(input);
  if (outcome.best) {
    const Interpretation& it = *outcome.best;
    json j;
    j["correction"] = json::parse(CorrectionToJson(it.correction));
    j["features"] = it.features;
    j["distance"] = it.distance;
    j["numeric_distance"] = it.numeric_distance;
    j["categorical_penalty"] = it.categorical_penalty;
    j["stable_center"] = ToStd(it.stable_center);
    j["stability_axes"] = it.stability_axes;
    j["assignment"] = it.assignment;
    j["initial_correction"] = ToStd(it.initial_correction);
    j["volume"] = it.volume;
    j["l0"] = it.l0;
    j["regions_explored"] = it.regions_explored;
    j["regions"] = json::array();
    for (const Region& r : it.regions) {
      j["regions"].push_back({{"pattern", r.pattern.ToString()},
                              {"witness", ToStd(r.witness)},
                              {"system", json::parse(r.system.ToJson())}});
    }
    j["lp_calls"] = it.lp_calls;
    if (include_timing) j["elapsed_ms"] = it.elapsed_ms;
    doc["interpretation"] = std::move(j);
  } else {
    doc["interpretation"] = nullptr;
  }
  doc["branches"] = json::array();
  for (const BranchReport& b : outcome.branches) {
    json j = {{"features", b.features},
              {"assignment", b.assignment},
              {"stage", FailureStageName(b.stage)},
              {"message", b.message},
              {"distance", OptionalNumber(b.distance)},
              {"regions", b.regions},
              {"lp_calls", b.lp_calls}};
    if (include_timing) j["elapsed_ms"] = b.elapsed_ms;
    doc["branches"].push_back(std::move(j));
  }
  doc["config"] = ConfigJson(cfg);
  return doc.dump(2);
}

ResultFile ResultFromJson(const std::string& text) {
  const json doc = Parse(text);
  if (!doc.is_object()) throw ParseError("$: expected an object");
  ResultFile out;
  try {
    out.input = ToVector(doc.at("input"), "$.input");
    out.status = doc.at("status").get<std::string>();
    out.config = ConfigFromJson(doc.at("config"), static_cast<int>(out.input.size()));
    const json& j = doc.at("interpretation");
    if (j.is_null()) return out;
    Interpretation it;
    it.correction = CorrectionFromJson(j.at("correction").dump());
    it.features = j.at("features").get<std::vector<int>>();
    if (!j.at("distance").is_number()) throw ParseError("$.interpretation.distance: expected a number");
    it.distance = j.at("distance").get<double>();
    it.numeric_distance = j.value("numeric_distance", it.distance);
    it.categorical_penalty = j.value("categorical_penalty", 0.0);
    it.stable_center = ToVector(j.at("stable_center"), "$.interpretation.stable_center");
    it.stability_axes = j.value("stability_axes", std::vector<int>{});
    it.assignment = j.value("assignment", -1);
    if (j.contains("initial_correction")) {
      it.initial_correction = ToVector(j["initial_correction"], "$.interpretation.initial_correction");
    }
    it.volume = j.value("volume", 0.0);
    it.l0 = j.value("l0", 0);
    it.regions_explored = j.value("regions_explored", 0);
    it.lp_calls = j.value("lp_calls", std::int64_t{0});
    it.input = out.input;
    if (it.correction.base.size() == 0) it.correction.base = out.input;
    if (it.correction.features != it.features) {
      throw ParseError("$.interpretation.features: differ from the correction's features");
    }
    if (it.stable_center.size() != it.correction.dim()) {
      throw ParseError("$.interpretation.stable_center: wrong length");
    }
    if (j.contains("regions")) {
      for (const json& r : j["regions"]) {
        Region region;
        region.features = it.features;
        region.base = it.correction.base;
        region.pattern = ActivationPattern::FromString(r.at("pattern").get<std::string>());
        region.system = ConstraintSystem::FromJson(r.at("system").dump());
        if (r.contains("witness")) region.witness = ToVector(r["witness"], "$.regions[].witness");
        it.regions.push_back(std::move(region));
      }
    }
    out.interpretation = std::move(it);
  } catch (const json::exception& e) {
    throw ParseError(std::string("result: ") + e.what());
  }
  return out;
}

}  // namespace symcorr
