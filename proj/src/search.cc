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

#include "symcorr/search.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <thread>
#include <unordered_set>
#include <utility>

#include "symcorr/certify.h"

namespace symcorr {
namespace {

using PatternSet = std::unordered_set<ActivationPattern, ActivationPatternHash>;

constexpr int kMaxNudges = 8;
constexpr int kMaxRepairs = 32;
constexpr double kCutMargin = 1e-7;

double MillisecondsSince(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
      .count();
}

Bounds DomainBounds(const FeatureDomain& domain, const Eigen::VectorXd& base,
                    const std::vector<int>& features) {
  return CorrectionBounds(domain.lo, domain.hi, base, features);
}

// Region system for a pattern with the per-neuron rows kept separately, so
// a boundary system is a copy with one row replaced.
struct PatternSystems {
  ConstraintSystem activation;
  ConstraintSystem class_rows;
  AffineMap pre;
};

PatternSystems BuildPatternSystems(const Network& net, const ActivationPattern& a,
                                   const Eigen::VectorXd& base,
                                   const std::vector<int>& features, int desired) {
  PatternSystems out;
  out.pre = HiddenPreactivationAffine(net, a).Restrict(base, features);
  out.activation = ActivationConstraints(net, a, base, features);
  out.class_rows = ClassConstraints(net, a, base, features, desired);
  return out;
}

bool BoundaryFeasible(const PatternSystems& ps, int p, const std::optional<Bounds>& domain,
                      LpSolver& solver) {
  const int n = ps.activation.dim();
  ConstraintSystem sys(n);
  for (int r = 0; r < static_cast<int>(ps.activation.size()); ++r) {
    if (r == p) {
      sys.Add(ps.pre.matrix.row(r).transpose(), ps.pre.offset[r], Relation::kEq);
    } else {
      sys.Add(ps.activation.constraints()[r]);
    }
  }
  sys.Append(ps.class_rows);
  if (domain) sys.SetBounds(*domain);
  return solver.CheckFeasible(sys).feasible();
}

// Cuts one box face so the box no longer meets [cut_lo, cut_hi] (a box
// enclosing the offending set), losing as little volume as possible.
std::optional<ConvexCorrection> CutBox(const ConvexCorrection& box,
                                       const Eigen::VectorXd& cut_lo,
                                       const Eigen::VectorXd& cut_hi) {
  std::optional<ConvexCorrection> best;
  double best_volume = 0.0;
  for (int i = 0; i < box.dim(); ++i) {
    const double margin = kCutMargin * std::max(1.0, box.hi[i] - box.lo[i]);
    ConvexCorrection raise = box;
    raise.lo[i] = cut_hi[i] + margin;
    ConvexCorrection lower = box;
    lower.hi[i] = cut_lo[i] - margin;
    for (ConvexCorrection* c : {&raise, &lower}) {
      if (c->lo[i] >= c->hi[i]) continue;
      const double v = Volume(*c);
      if (v > best_volume) {
        best_volume = v;
        best = *c;
      }
    }
  }
  return best;
}

ConvexCorrection ShrinkSimplex(const ConvexCorrection& s, double factor) {
  ConvexCorrection out = s;
  const Eigen::VectorXd center = Centroid(s);
  for (Eigen::VectorXd& v : out.vertices) v = center + factor * (v - center);
  return out;
}

// Post-growth audit: an exact label certificate plus a dense sample check
// against the discovered regions. Failing boxes are repaired by face cuts
// and failing simplices by shrinking; shapes that cannot be repaired are
// rejected.
std::optional<ConvexCorrection> AuditShape(const Network& net,
                                           const std::vector<Region>& regions,
                                           const ConvexCorrection& grown, int desired,
                                           int samples, std::uint64_t seed,
                                           LpSolver& solver) {
  ConvexCorrection shape = grown;
  for (int repair = 0; repair <= kMaxRepairs; ++repair) {
    CertificateResult cert = CertifyLabel(net, shape, desired, solver);
    if (!cert.certified) {
      if (!cert.violating_piece) return std::nullopt;  // piece budget exhausted
      if (shape.kind == ShapeKind::kSimplex) {
        shape = ShrinkSimplex(shape, 0.9);
        continue;
      }
      const int n = shape.dim();
      Eigen::VectorXd lo(n), hi(n);
      for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd e = Eigen::VectorXd::Unit(n, i);
        SolverResult low = solver.Minimize(*cert.violating_piece, e);
        SolverResult high = solver.Minimize(*cert.violating_piece, -e);
        if (!low.feasible() || !high.feasible()) {
          lo[i] = hi[i] = (*cert.violating_point)[i];
        } else {
          lo[i] = *low.objective_value;
          hi[i] = -*high.objective_value;
        }
      }
      std::optional<ConvexCorrection> cut = CutBox(shape, lo, hi);
      if (!cut) return std::nullopt;
      shape = std::move(*cut);
      continue;
    }
    Rng rng(seed);
    std::optional<Eigen::VectorXd> outside;
    int hint = -1;
    for (int s = 0; s < samples; ++s) {
      Eigen::VectorXd x = SampleUniform(shape, rng);
      const int idx = FindContainingRegion(regions, x, hint);
      if (idx < 0) {
        outside = std::move(x);
        break;
      }
      hint = idx;
    }
    if (!outside) return shape;
    if (shape.kind == ShapeKind::kSimplex) {
      shape = ShrinkSimplex(shape, 0.9);
      continue;
    }
    std::optional<ConvexCorrection> cut = CutBox(shape, *outside, *outside);
    if (!cut) return std::nullopt;
    shape = std::move(*cut);
  }
  return std::nullopt;
}

}  // namespace

FeatureDomain FeatureDomain::Uniform(int dim, double lo, double hi) {
  return FeatureDomain{Eigen::VectorXd::Constant(dim, lo), Eigen::VectorXd::Constant(dim, hi)};
}

ExplainConfig ExplainConfig::Defaults(int input_dim) {
  ExplainConfig cfg;
  cfg.domain = FeatureDomain::Uniform(input_dim, -1.0, 1.0);
  cfg.ApplyDomainDefaults();
  return cfg;
}

void ExplainConfig::ApplyDomainDefaults() {
  DistanceConfig fresh = DistanceConfig::FromRanges(domain.lo, domain.hi);
  fresh.e = distance.e;
  fresh.mode = distance.mode;
  fresh.categorical = distance.categorical;
  fresh.min_box_side = distance.min_box_side;
  distance = std::move(fresh);
}

std::string FailureStageName(FailureStage stage) {
  switch (stage) {
    case FailureStage::kNone: return "ok";
    case FailureStage::kNoInitialCorrection: return "no-initial-correction";
    case FailureStage::kUnstable: return "unstable";
    case FailureStage::kSolverError: return "solver-error";
    case FailureStage::kBelowSigma: return "below-sigma";
  }
  return "unknown";
}

ConcreteCorrection FindMinConcreteCorrection(const Network& net,
                                             const Eigen::VectorXd& input,
                                             const std::vector<int>& features,
                                             const SearchParams& params,
                                             const FeatureDomain& domain) {
  const int n = static_cast<int>(features.size());
  ConcreteCorrection out;
  out.delta = Eigen::VectorXd::Zero(n);
  out.last_direction = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd step(n), lo(n), hi(n);
  for (int k = 0; k < n; ++k) {
    const int f = features[k];
    step[k] = params.fgsm_step ? *params.fgsm_step : 0.025 * (domain.hi[f] - domain.lo[f]);
    lo[k] = std::min(0.0, domain.lo[f] - input[f]);
    hi[k] = std::max(0.0, domain.hi[f] - input[f]);
  }
  for (int iter = 0;; ++iter) {
    const Eigen::VectorXd x = Embed(input, features, out.delta);
    const int label = Classify(net, x);
    if (label == params.desired_label) {
      out.found = true;
      out.iterations = iter;
      return out;
    }
    if (iter >= params.max_fgsm_iters) break;
    const Eigen::VectorXd g = Gradient(net, x, params.desired_label, label);
    int best = -1;
    double best_abs = 0.0;
    for (int k = 0; k < n; ++k) {
      const double gk = g[features[k]];
      const bool blocked = (gk > 0 && out.delta[k] >= hi[k]) || (gk < 0 && out.delta[k] <= lo[k]);
      if (blocked) continue;
      if (std::abs(gk) > best_abs) {
        best_abs = std::abs(gk);
        best = k;
      }
    }
    if (best < 0) break;
    const double sign = g[features[best]] > 0 ? 1.0 : -1.0;
    out.delta[best] = std::clamp(out.delta[best] + sign * step[best], lo[best], hi[best]);
    out.last_direction = sign * Eigen::VectorXd::Unit(n, best);
    out.iterations = iter + 1;
  }
  return out;
}

bool CheckRegionBoundary(const Network& net, const ActivationPattern& pattern,
                         int p, const Eigen::VectorXd& input,
                         const std::vector<int>& features, int desired,
                         const std::optional<Bounds>& domain, LpSolver& solver) {
  ConstraintSystem sys = BoundaryConstraints(net, pattern, p, input, features);
  sys.Append(ClassConstraints(net, pattern, input, features, desired));
  if (domain) sys.SetBounds(*domain);
  return solver.CheckFeasible(sys).feasible();
}

std::vector<Region> ExpandRegions(const Network& net, const Eigen::VectorXd& input,
                                  const std::vector<int>& features,
                                  const ConcreteCorrection& delta0,
                                  const ExplainConfig& config, LpSolver& solver) {
  const int desired = config.search.desired_label;
  const int m = std::max(1, config.search.m);
  const std::optional<Bounds> domain = DomainBounds(config.domain, input, features);

  Eigen::VectorXd x0 = delta0.delta;
  std::optional<Region> initial;
  for (int nudge = 0; nudge <= kMaxNudges; ++nudge) {
    const ActivationPattern a0 = GetActivations(net, Embed(input, features, x0));
    Region r = RegionFromActivations(net, a0, input, features, desired, domain);
    SolverResult res = solver.CheckFeasible(r.system);
    if (res.feasible()) {
      r.witness = *res.point;
      initial = std::move(r);
      break;
    }
    if (delta0.last_direction.isZero(0.0)) break;
    x0 += config.search.epsilon_strict * std::ldexp(1.0, nudge) * delta0.last_direction;
  }
  if (!initial) return {};

  std::vector<Region> regions;
  PatternSet seen;
  PatternSet rejected;
  std::deque<ActivationPattern> work;
  seen.insert(initial->pattern);
  work.push_back(initial->pattern);
  regions.push_back(std::move(*initial));
  if (static_cast<int>(regions.size()) >= m) return regions;

  while (!work.empty()) {
    const ActivationPattern a = work.front();
    work.pop_front();
    const PatternSystems ps = BuildPatternSystems(net, a, input, features, desired);
    for (int p = 0; p < net.num_hidden(); ++p) {
      ActivationPattern next = a;
      next.flip(p);
      if (seen.contains(next) || rejected.contains(next)) continue;
      if (!BoundaryFeasible(ps, p, domain, solver)) continue;
      Region r = RegionFromActivations(net, next, input, features, desired, domain);
      SolverResult res = solver.CheckFeasible(r.system);
      if (!res.feasible()) {
        rejected.insert(next);
        continue;
      }
      r.witness = *res.point;
      seen.insert(next);
      regions.push_back(std::move(r));
      if (static_cast<int>(regions.size()) >= m) return regions;
      work.push_back(std::move(next));
    }
  }
  return regions;
}

SearchOutcome FindProjectedInterpretation(const Network& net,
                                          const Eigen::VectorXd& base,
                                          const std::vector<int>& features,
                                          const ExplainConfig& config,
                                          const Eigen::VectorXd& original_input,
                                          std::uint64_t seed) {
  const auto start = std::chrono::steady_clock::now();
  SearchOutcome outcome;
  BranchReport report;
  report.features = features;
  LpSolver solver(SolverOptions{.epsilon_strict = config.search.epsilon_strict});
  auto finish = [&](FailureStage stage, std::string message) {
    report.stage = stage;
    report.message = message;
    report.lp_calls = solver.calls();
    report.elapsed_ms = MillisecondsSince(start);
    outcome.stage = stage;
    outcome.message = std::move(message);
    outcome.branches.push_back(report);
    return outcome;
  };

  try {
    const ConcreteCorrection delta0 =
        FindMinConcreteCorrection(net, base, features, config.search, config.domain);
    if (!delta0.found) {
      return finish(FailureStage::kNoInitialCorrection,
                    "gradient walk did not reach the desired label in " +
                        std::to_string(delta0.iterations) + " steps");
    }
    std::vector<Region> regions = ExpandRegions(net, base, features, delta0, config, solver);
    report.regions = static_cast<int>(regions.size());
    if (regions.empty()) {
      return finish(FailureStage::kNoInitialCorrection,
                    "initial correction lies in no feasible region");
    }

    GrowthParams growth = config.growth;
    growth.rng_seed = seed;
    growth.axis_scale.resize(static_cast<Eigen::Index>(features.size()));
    const Eigen::VectorXd range = config.domain.Range();
    for (std::size_t k = 0; k < features.size(); ++k) {
      growth.axis_scale[static_cast<Eigen::Index>(k)] = range[features[k]];
    }
    Rng rng(seed);
    const int desired = config.search.desired_label;
    const int audit_samples = config.search.audit_samples;
    ShapeFilter audit = [&](const ConvexCorrection& shape) {
      return AuditShape(net, regions, shape, desired, audit_samples, seed ^ 0xA5A5A5A5ULL,
                        solver);
    };
    std::optional<ConvexCorrection> shape =
        InferConvexCorrection(regions, config.search.shape, growth, rng, solver, audit);
    if (!shape) {
      return finish(FailureStage::kUnstable, "no correction shape survived growth and audit");
    }

    StabilityReport stability = DisE(*shape, config.distance, solver, original_input);
    if (!stability.stable()) {
      return finish(FailureStage::kUnstable,
                    stability.eroded_nonempty ? "stability ball check failed"
                                              : "correction has no stable center");
    }
    const Eigen::VectorXd w = [&] {
      Eigen::VectorXd out(static_cast<Eigen::Index>(features.size()));
      for (std::size_t k = 0; k < features.size(); ++k) {
        out[static_cast<Eigen::Index>(k)] = config.distance.weights[features[k]];
      }
      return out;
    }();
    if (config.search.sigma > 0.0 &&
        WeightedL1(*stability.center, w) <= config.search.sigma) {
      return finish(FailureStage::kBelowSigma,
                    "stable center is within sigma of the input");
    }

    Interpretation interp;
    interp.correction = *shape;
    interp.distance = *stability.distance;
    interp.numeric_distance = stability.numeric_distance;
    interp.categorical_penalty = stability.categorical_penalty;
    interp.stable_center = *stability.center;
    interp.stability_axes = stability.stability_axes;
    interp.features = features;
    interp.input = original_input;
    interp.initial_correction = delta0.delta;
    interp.regions_explored = static_cast<int>(regions.size());
    interp.regions = std::move(regions);
    interp.volume = Volume(*shape);
    interp.l0 = L0Distance(*shape, *stability.center);
    interp.lp_calls = solver.calls();
    interp.elapsed_ms = MillisecondsSince(start);
    outcome.best = std::move(interp);
    report.distance = outcome.best->distance;
    report.lp_calls = solver.calls();
    report.elapsed_ms = outcome.best->elapsed_ms;
    outcome.branches.push_back(report);
    return outcome;
  } catch (const SolverError& e) {
    return finish(FailureStage::kSolverError, e.what());
  }
}

std::vector<std::vector<int>> Combinations(const std::vector<int>& items, int k) {
  std::vector<std::vector<int>> out;
  const int total = static_cast<int>(items.size());
  if (k < 0 || k > total) return out;
  std::vector<int> idx(k);
  for (int i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    std::vector<int> combo(k);
    for (int i = 0; i < k; ++i) combo[i] = items[idx[i]];
    out.push_back(std::move(combo));
    int i = k - 1;
    while (i >= 0 && idx[i] == total - k + i) --i;
    if (i < 0) break;
    ++idx[i];
    for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

std::vector<Eigen::VectorXd> CategoricalAssignments(const Eigen::VectorXd& input,
                                                    const DistanceConfig& cfg) {
  std::vector<Eigen::VectorXd> out = {input};
  for (const CategoricalGroup& g : cfg.categorical) {
    std::vector<Eigen::VectorXd> next;
    for (const Eigen::VectorXd& partial : out) {
      for (const std::vector<double>& value : g.values) {
        Eigen::VectorXd v = partial;
        for (std::size_t k = 0; k < g.indices.size(); ++k) v[g.indices[k]] = value[k];
        next.push_back(std::move(v));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::uint64_t BranchSeed(std::uint64_t seed, std::size_t subset_index) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (subset_index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SearchOutcome FindInterpretation(const Network& net, const Eigen::VectorXd& input,
                                 const ExplainConfig& config) {
  if (input.size() != net.input_dim()) throw StructuralError("input has wrong length");
  if (Classify(net, input) == config.search.desired_label) {
    throw StructuralError("input already receives the desired label");
  }
  std::vector<int> mutable_features = config.search.mutable_features;
  if (mutable_features.empty()) {
    std::vector<bool> categorical(net.input_dim(), false);
    for (const CategoricalGroup& g : config.distance.categorical) {
      for (int idx : g.indices) categorical[idx] = true;
    }
    for (int i = 0; i < net.input_dim(); ++i) {
      if (!categorical[i]) mutable_features.push_back(i);
    }
  }
  for (const CategoricalGroup& g : config.distance.categorical) {
    for (int idx : g.indices) {
      if (std::find(mutable_features.begin(), mutable_features.end(), idx) !=
          mutable_features.end()) {
        throw StructuralError("categorical index " + std::to_string(idx) +
                              " is also listed as a mutable numeric feature");
      }
    }
  }
  if (config.search.n < 1 || config.search.n > static_cast<int>(mutable_features.size())) {
    throw StructuralError("n must be between 1 and the number of mutable features");
  }
  const std::vector<std::vector<int>> subsets = Combinations(mutable_features, config.search.n);
  const std::vector<Eigen::VectorXd> bases = CategoricalAssignments(input, config.distance);

  struct Branch {
    std::size_t subset;
    std::size_t assignment;
  };
  std::vector<Branch> branches;
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    for (std::size_t a = 0; a < bases.size(); ++a) branches.push_back({s, a});
  }
  std::vector<SearchOutcome> results(branches.size());
  auto run = [&](std::size_t i) {
    const Branch& b = branches[i];
    results[i] = FindProjectedInterpretation(net, bases[b.assignment], subsets[b.subset],
                                             config, input,
                                             BranchSeed(config.search.rng_seed, b.subset));
  };
  const int threads = std::max(1, std::min<int>(config.search.threads,
                                                static_cast<int>(branches.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < branches.size(); ++i) run(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < branches.size(); i = next++) run(i);
      });
    }
    for (std::thread& t : pool) t.join();
  }

  SearchOutcome merged;
  FailureStage last_stage = FailureStage::kNone;
  std::string last_message;
  for (std::size_t i = 0; i < results.size(); ++i) {
    SearchOutcome& r = results[i];
    const int assignment = config.distance.categorical.empty()
                               ? -1
                               : static_cast<int>(branches[i].assignment);
    for (BranchReport& br : r.branches) {
      br.assignment = assignment;
      merged.branches.push_back(br);
    }
    if (r.best) {
      r.best->assignment = assignment;
      if (!merged.best || r.best->distance < merged.best->distance) {
        merged.best = std::move(r.best);
      }
    } else {
      last_stage = r.stage;
      last_message = r.message;
    }
  }
  if (!merged.best) {
    // Report the most informative failure: any unstable branch means a
    // correction was found but discarded.
    merged.stage = last_stage;
    merged.message = last_message;
    for (const BranchReport& br : merged.branches) {
      if (br.stage == FailureStage::kUnstable) {
        merged.stage = br.stage;
        merged.message = br.message;
        break;
      }
    }
  }
  return merged;
}

}  // namespace symcorr
