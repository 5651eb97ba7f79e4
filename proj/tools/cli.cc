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

#include "cli.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "symcorr/geometry.h"
#include "symcorr/metrics.h"
#include "symcorr/synth.h"

namespace symcorr::cli {
namespace {

using nlohmann::json;

// Usage-level failure: bad flags, unreadable or malformed files.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteOutput(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
  if (!text.empty() && text.back() != '\n') f << '\n';
}

std::vector<double> ToStd(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::optional<std::vector<double>> ParseNumberList(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto first = cell.find_first_not_of(" \t\r\n[]");
    if (first == std::string::npos) return std::nullopt;
    const auto last = cell.find_last_not_of(" \t\r\n[]");
    const std::string token = cell.substr(first, last - first + 1);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end != token.c_str() + token.size() || !std::isfinite(v)) return std::nullopt;
    values.push_back(v);
  }
  if (values.empty()) return std::nullopt;
  return values;
}

// ---------------------------------------------------------------- oracle

struct Lattice {
  std::vector<int> dims;
  std::vector<char> ok;  // row-major, last axis fastest
};

// Longest run of accepted points; returns (count, start).
std::pair<std::int64_t, int> LongestRun(const std::vector<char>& ok) {
  std::pair<std::int64_t, int> best{0, 0};
  int run = 0;
  for (int i = 0; i < static_cast<int>(ok.size()); ++i) {
    run = ok[i] ? run + 1 : 0;
    if (run > best.first) best = {run, i - run + 1};
  }
  return best;
}

struct LatticeBox {
  std::int64_t points = 0;
  std::vector<int> lo;
  std::vector<int> hi;
};

// Maximal all-accepted rectangle via row histograms.
LatticeBox MaxRectangle(const std::vector<char>& ok, int rows, int cols) {
  LatticeBox best;
  std::vector<int> height(cols, 0);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) height[c] = ok[r * cols + c] ? height[c] + 1 : 0;
    std::vector<int> stack;
    for (int c = 0; c <= cols; ++c) {
      const int h = c < cols ? height[c] : 0;
      while (!stack.empty() && height[stack.back()] >= h) {
        const int top = stack.back();
        stack.pop_back();
        const int left = stack.empty() ? 0 : stack.back() + 1;
        const std::int64_t area = static_cast<std::int64_t>(height[top]) * (c - left);
        if (area > best.points) {
          best.points = area;
          best.lo = {r - height[top] + 1, left};
          best.hi = {r, c - 1};
        }
      }
      stack.push_back(c);
    }
  }
  return best;
}

LatticeBox MaxLatticeBox(const Lattice& lat) {
  const int d = static_cast<int>(lat.dims.size());
  if (d == 1) {
    auto [count, start] = LongestRun(lat.ok);
    LatticeBox b;
    b.points = count;
    if (count > 0) {
      b.lo = {start};
      b.hi = {start + static_cast<int>(count) - 1};
    }
    return b;
  }
  if (d == 2) return MaxRectangle(lat.ok, lat.dims[0], lat.dims[1]);
  // Fix a range on the first axis, intersect its slabs, recurse.
  const std::size_t slab = lat.ok.size() / static_cast<std::size_t>(lat.dims[0]);
  LatticeBox best;
  for (int a = 0; a < lat.dims[0]; ++a) {
    Lattice sub{std::vector<int>(lat.dims.begin() + 1, lat.dims.end()),
                std::vector<char>(slab, 1)};
    for (int b = a; b < lat.dims[0]; ++b) {
      bool any = false;
      for (std::size_t k = 0; k < slab; ++k) {
        sub.ok[k] = sub.ok[k] && lat.ok[b * slab + k];
        any = any || sub.ok[k];
      }
      if (!any) break;
      LatticeBox inner = MaxLatticeBox(sub);
      const std::int64_t points = inner.points * (b - a + 1);
      if (points > best.points) {
        best.points = points;
        best.lo = {a};
        best.hi = {b};
        best.lo.insert(best.lo.end(), inner.lo.begin(), inner.lo.end());
        best.hi.insert(best.hi.end(), inner.hi.begin(), inner.hi.end());
      }
    }
  }
  return best;
}

// ---------------------------------------------------------------- plotdata

using Point2 = Eigen::Vector2d;
using Polygon = std::vector<Point2>;

// Keeps the part of `poly` where a.p + b >= 0.
Polygon ClipHalfPlane(const Polygon& poly, const Point2& a, double b) {
  Polygon out;
  const std::size_t n = poly.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point2& p = poly[k];
    const Point2& q = poly[(k + 1) % n];
    const double fp = a.dot(p) + b;
    const double fq = a.dot(q) + b;
    if (fp >= 0) out.push_back(p);
    if ((fp >= 0) != (fq >= 0)) {
      const double t = fp / (fp - fq);
      out.push_back(p + t * (q - p));
    }
  }
  return out;
}

// Slice of a constraint system on the (i, j) plane through `at`.
Polygon SlicePolygon(const ConstraintSystem& sys, int i, int j, const Eigen::VectorXd& at,
                     const Polygon& frame) {
  Polygon poly = frame;
  for (const LinearConstraint& c : sys.constraints()) {
    double b = c.offset;
    for (int k = 0; k < c.coeffs.size(); ++k) {
      if (k != i && k != j) b += c.coeffs[k] * at[k];
    }
    const Point2 a(c.coeffs[i], c.coeffs[j]);
    if (c.rel == Relation::kEq) {
      poly = ClipHalfPlane(poly, a, b);
      poly = ClipHalfPlane(poly, -a, -b);
    } else {
      poly = ClipHalfPlane(poly, a, b);
    }
    if (poly.empty()) break;
  }
  return poly;
}

Polygon Rectangle(double x0, double x1, double y0, double y1) {
  return {Point2(x0, y0), Point2(x1, y0), Point2(x1, y1), Point2(x0, y1)};
}

void EmitPolygon(std::ostream& out, const std::string& element, const std::string& id,
                 const Polygon& poly) {
  for (const Point2& p : poly) out << element << ',' << id << ',' << p.x() << ',' << p.y() << '\n';
  if (!poly.empty()) {
    out << element << ',' << id << ',' << poly.front().x() << ',' << poly.front().y() << '\n';
  }
}

// ---------------------------------------------------------------- commands

ExplainConfig LoadConfig(const std::string& path, int input_dim) {
  if (path.empty()) return ExplainConfig::Defaults(input_dim);
  return ExplainConfigFromJson(ReadFile(path), input_dim);
}

void PrintVector(std::ostream& out, const Eigen::VectorXd& v) {
  out << '(';
  for (int i = 0; i < v.size(); ++i) out << (i ? ", " : "") << v[i] + 0.0;  // no "-0"
  out << ')';
}

struct ExplainArgs {
  std::string network, instance, config, features, out;
  std::optional<int> n, m, threads;
  std::optional<double> e, sigma, epsilon_strict;
  std::optional<std::string> shape;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

int CmdExplain(const ExplainArgs& a, std::ostream& out, std::ostream& err) {
  const Network net = LoadNetworkArg(a.network);
  const Eigen::VectorXd input = LoadVectorArg(a.instance);
  if (input.size() != net.input_dim()) {
    throw UsageError("instance has " + std::to_string(input.size()) + " values, network expects " +
                     std::to_string(net.input_dim()));
  }
  ExplainConfig cfg = LoadConfig(a.config, net.input_dim());
  if (!a.features.empty()) {
    cfg.search.mutable_features = ParseIndexList(a.features);
    for (int f : cfg.search.mutable_features) {
      if (f < 0 || f >= net.input_dim()) throw UsageError("feature index out of range");
    }
    if (!a.n) {
      cfg.search.n = std::min<int>(cfg.search.n, static_cast<int>(cfg.search.mutable_features.size()));
    }
  }
  if (a.n) cfg.search.n = *a.n;
  if (a.m) cfg.search.m = *a.m;
  if (a.threads) cfg.search.threads = *a.threads;
  if (a.e) cfg.distance.e = *a.e;
  if (a.sigma) cfg.search.sigma = *a.sigma;
  if (a.epsilon_strict) cfg.search.epsilon_strict = *a.epsilon_strict;
  if (a.seed) cfg.search.rng_seed = *a.seed;
  if (a.shape) cfg.search.shape = ParseShapeKind(*a.shape);
  if (cfg.search.n < 1 || cfg.search.m < 1) throw UsageError("--n and --m must be at least 1");
  if (!(cfg.distance.e > 0) || !(cfg.search.epsilon_strict > 0)) {
    throw UsageError("--e and --epsilon-strict must be positive");
  }

  const int label = Classify(net, input);
  if (label == cfg.search.desired_label) {
    err << "input is already classified " << label << "; nothing to correct\n";
    return kExitAlreadyAccepted;
  }
  const SearchOutcome outcome = FindInterpretation(net, input, cfg);
  const std::string doc = OutcomeToJson(outcome, cfg, input, a.timing);
  WriteOutput(a.out, doc, out);
  std::ostream& summary = a.out.empty() || a.out == "-" ? err : out;
  if (!outcome.ok()) {
    summary << "no interpretation: " << FailureStageName(outcome.stage) << ": " << outcome.message
            << '\n';
    return kExitNoInterpretation;
  }
  const Interpretation& it = *outcome.best;
  summary << ShapeKindName(it.correction.kind) << " correction over features [";
  for (std::size_t k = 0; k < it.features.size(); ++k) summary << (k ? "," : "") << it.features[k];
  summary << "], distance " << it.distance << ", center ";
  PrintVector(summary, it.stable_center);
  summary << ", " << it.regions_explored << " regions, volume " << it.volume << '\n';
  return kExitOk;
}

int CmdVerify(const std::string& network, const std::string& result_path, int samples,
              std::uint64_t seed, std::ostream& out, std::ostream& err) {
  if (samples <= 0) throw UsageError("--samples must be positive");
  const Network net = LoadNetworkArg(network);
  const ResultFile result = ResultFromJson(ReadFile(result_path));
  if (result.input.size() != net.input_dim()) throw UsageError("result does not match network");
  if (!result.interpretation) {
    err << "result holds no interpretation (" << result.status << ")\n";
    return kExitNoInterpretation;
  }
  for (int f : result.interpretation->features) {
    if (f < 0 || f >= net.input_dim()) throw UsageError("result feature index out of range");
  }
  const VerifyReport r = VerifyInterpretation(net, result, samples, seed);
  out << "samples " << r.samples << '\n'
      << "flip_rate " << std::setprecision(17) << r.flip_rate() << '\n'
      << "region_audit_violations " << r.outside_regions << '\n'
      << "center_inside " << (r.center_inside ? "yes" : "no") << '\n'
      << "ball_inside " << (r.ball_inside ? "yes" : "no") << '\n'
      << "ball_flips " << (r.ball_flips ? "yes" : "no") << '\n'
      << (r.passed() ? "PASS" : "FAIL") << '\n';
  return r.passed() ? kExitOk : kExitVerificationFailed;
}

int CmdOracle(const std::string& network, const std::string& instance,
              const std::string& features, int grid, const std::string& config,
              const std::string& out_path, std::ostream& out) {
  const Network net = LoadNetworkArg(network);
  const Eigen::VectorXd input = LoadVectorArg(instance);
  if (input.size() != net.input_dim()) throw UsageError("instance does not match network");
  const std::vector<int> feats = ParseIndexList(features);
  if (static_cast<int>(feats.size()) > kMaxOracleFeatures) {
    throw UsageError("the grid oracle handles at most 3 features: its cost grows as grid^k, "
                     "so it only serves as a cross-check on tiny problems");
  }
  const ExplainConfig cfg = LoadConfig(config, net.input_dim());
  const OracleReport r = GridOracle(net, input, feats, grid, cfg);
  json doc;
  doc["grid"] = r.grid;
  doc["features"] = r.features;
  doc["accepted"] = r.accepted;
  doc["total"] = r.total;
  doc["min_distance"] = r.min_distance ? json(*r.min_distance) : json(nullptr);
  doc["min_correction"] = r.min_correction ? json(ToStd(*r.min_correction)) : json(nullptr);
  doc["spacing_distance"] = r.spacing_distance;
  if (r.box_lo) {
    doc["largest_box"] = {{"lo", ToStd(*r.box_lo)}, {"hi", ToStd(*r.box_hi)},
                          {"volume", r.box_volume}};
  } else {
    doc["largest_box"] = nullptr;
  }
  if (!r.mask.empty()) doc["mask"] = r.mask;
  WriteOutput(out_path, doc.dump(2), out);
  return kExitOk;
}

int CmdPlotData(const std::string& result_path, const std::string& project,
                const std::string& out_path, std::ostream& out) {
  const ResultFile result = ResultFromJson(ReadFile(result_path));
  if (!result.interpretation) throw UsageError("result holds no interpretation");
  std::vector<int> plane;
  if (!project.empty()) {
    plane = ParseIndexList(project);
  } else if (result.interpretation->features.size() == 2) {
    plane = result.interpretation->features;
  } else {
    throw UsageError("correction is not 2-D; pass --project i,j");
  }
  WriteOutput(out_path, PlotDataCsv(result, plane), out);
  return kExitOk;
}

}  // namespace

Network LoadNetworkArg(const std::string& arg) {
  const std::string prefix = "builtin:";
  if (arg.rfind(prefix, 0) == 0) return BuiltinNetwork(arg.substr(prefix.size()));
  return LoadNetwork(ReadFile(arg));
}

Eigen::VectorXd LoadVectorArg(const std::string& arg) {
  std::optional<std::vector<double>> values = ParseNumberList(arg);
  if (!values) {
    if (!std::filesystem::exists(arg)) {
      throw UsageError("instance '" + arg + "' is neither a number list nor a file");
    }
    std::string text = ReadFile(arg);
    std::replace(text.begin(), text.end(), '\n', ' ');
    values = ParseNumberList(text);
    if (!values) throw UsageError("cannot parse instance file '" + arg + "'");
  }
  return Eigen::Map<const Eigen::VectorXd>(values->data(), static_cast<Eigen::Index>(values->size()));
}

std::vector<int> ParseIndexList(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(cell, &used);
    } catch (const std::exception&) {
      throw UsageError("bad index '" + cell + "'");
    }
    if (used != cell.size() || v < 0) throw UsageError("bad index '" + cell + "'");
    if (std::find(out.begin(), out.end(), v) != out.end()) throw UsageError("duplicate index");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty index list");
  return out;
}

std::vector<int> ParseSizeList(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(cell, &used);
    } catch (const std::exception&) {
      throw UsageError("bad layer width '" + cell + "'");
    }
    if (used != cell.size() || v < 1) throw UsageError("bad layer width '" + cell + "'");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("empty layer list");
  return out;
}

VerifyReport VerifyInterpretation(const Network& net, const ResultFile& result, int samples,
                                  std::uint64_t seed) {
  const Interpretation& it = *result.interpretation;
  const ConvexCorrection& c = it.correction;
  const int desired = result.config.search.desired_label;
  VerifyReport r;
  Rng rng(seed);
  int hint = -1;
  for (int s = 0; s < samples; ++s) {
    const Eigen::VectorXd x = SampleUniform(c, rng);
    ++r.samples;
    if (Classify(net, Embed(c.base, c.features, x)) == desired) ++r.flipped;
    if (!it.regions.empty()) {
      const int idx = FindContainingRegion(it.regions, x, hint);
      if (idx < 0) {
        ++r.outside_regions;
      } else {
        hint = idx;
      }
    }
  }
  r.center_inside = InsideShape(c, it.stable_center);
  r.ball_inside = r.center_inside;
  r.ball_flips = r.center_inside;
  for (const Eigen::VectorXd& x : StabilityBallSamples(c, it.stable_center, result.config.distance,
                                                       it.stability_axes, rng, 1000)) {
    if (!InsideShape(c, x, 1e-9)) r.ball_inside = false;
    if (Classify(net, Embed(c.base, c.features, x)) != desired) r.ball_flips = false;
  }
  return r;
}

OracleReport GridOracle(const Network& net, const Eigen::VectorXd& input,
                        const std::vector<int>& features, int grid, const ExplainConfig& cfg) {
  if (grid < 1) throw UsageError("--grid must be at least 1");
  if (features.empty() || static_cast<int>(features.size()) > kMaxOracleFeatures) {
    throw UsageError("the grid oracle needs 1 to 3 features");
  }
  const int d = static_cast<int>(features.size());
  const double total = std::pow(static_cast<double>(grid), d);
  if (total > 5e7) throw UsageError("grid too large");
  const int desired = cfg.search.desired_label;

  auto coord = [&](int axis, int k) {
    const int f = features[axis];
    const double lo = cfg.domain.lo[f], hi = cfg.domain.hi[f];
    const double abs = grid == 1 ? 0.5 * (lo + hi) : lo + k * (hi - lo) / (grid - 1);
    return abs - input[f];
  };

  OracleReport r;
  r.grid = grid;
  r.features = features;
  r.total = static_cast<std::int64_t>(total);
  for (int axis = 0; axis < d; ++axis) {
    const int f = features[axis];
    if (grid > 1) {
      r.spacing_distance +=
          cfg.distance.weights[f] * (cfg.domain.hi[f] - cfg.domain.lo[f]) / (grid - 1);
    }
  }
  Lattice lat{std::vector<int>(d, grid), std::vector<char>(static_cast<std::size_t>(r.total), 0)};
  std::vector<int> idx(d, 0);
  Eigen::VectorXd delta(d);
  for (std::int64_t flat = 0; flat < r.total; ++flat) {
    std::int64_t rem = flat;
    for (int axis = d - 1; axis >= 0; --axis) {
      idx[axis] = static_cast<int>(rem % grid);
      rem /= grid;
    }
    Eigen::VectorXd x = input;
    double dist = 0.0;
    for (int axis = 0; axis < d; ++axis) {
      delta[axis] = coord(axis, idx[axis]);
      x[features[axis]] += delta[axis];
      dist += cfg.distance.weights[features[axis]] * std::abs(delta[axis]);
    }
    if (Classify(net, x) != desired) continue;
    lat.ok[static_cast<std::size_t>(flat)] = 1;
    ++r.accepted;
    if (!r.min_distance || dist < *r.min_distance) {
      r.min_distance = dist;
      r.min_correction = delta;
    }
  }
  const LatticeBox box = MaxLatticeBox(lat);
  if (box.points > 0) {
    Eigen::VectorXd lo(d), hi(d);
    r.box_volume = 1.0;
    for (int axis = 0; axis < d; ++axis) {
      lo[axis] = coord(axis, box.lo[axis]);
      hi[axis] = coord(axis, box.hi[axis]);
      r.box_volume *= hi[axis] - lo[axis];
    }
    r.box_lo = lo;
    r.box_hi = hi;
  }
  if (d == 2) {
    // Row y, column x, with y increasing downward in the text.
    for (int y = 0; y < grid; ++y) {
      std::string row(grid, '0');
      for (int x = 0; x < grid; ++x) {
        if (lat.ok[static_cast<std::size_t>(x) * grid + y]) row[x] = '1';
      }
      r.mask.push_back(std::move(row));
    }
  }
  return r;
}

std::string PlotDataCsv(const ResultFile& result, const std::vector<int>& plane) {
  const Interpretation& it = *result.interpretation;
  if (plane.size() != 2) throw UsageError("--project needs exactly two feature indices");
  int i = -1, j = -1;
  for (int k = 0; k < static_cast<int>(it.features.size()); ++k) {
    if (it.features[k] == plane[0]) i = k;
    if (it.features[k] == plane[1]) j = k;
  }
  if (i < 0 || j < 0) throw UsageError("projection features must belong to the correction");
  const ConvexCorrection& c = it.correction;
  const Eigen::VectorXd& at = it.stable_center;
  const FeatureDomain& dom = result.config.domain;
  const Eigen::VectorXd& base = c.base;
  const Polygon frame = Rectangle(dom.lo[plane[0]] - base[plane[0]], dom.hi[plane[0]] - base[plane[0]],
                                  dom.lo[plane[1]] - base[plane[1]], dom.hi[plane[1]] - base[plane[1]]);

  std::ostringstream out;
  out << std::setprecision(12);
  out << "element,id,x,y\n";
  for (const Region& region : it.regions) {
    const Polygon poly = SlicePolygon(region.system, i, j, at, frame);
    if (poly.size() >= 3) EmitPolygon(out, "region", region.pattern.ToString(), poly);
  }
  EmitPolygon(out, "correction", "0", SlicePolygon(Facets(c), i, j, at, frame));
  out << "input,0,0,0\n";
  out << "center,0," << at[i] << ',' << at[j] << '\n';
  return out.str();
}

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Minimal stable corrections for inputs a ReLU classifier rejects"};
  app.require_subcommand(1);

  ExplainArgs ex;
  CLI::App* explain = app.add_subcommand("explain", "find a stable symbolic correction");
  explain->add_option("--network", ex.network, "network JSON or builtin:NAME")->required();
  explain->add_option("--instance", ex.instance, "comma-separated input or file")->required();
  explain->add_option("--config", ex.config, "configuration JSON");
  explain->add_option("--features", ex.features, "mutable features, e.g. 0,1");
  explain->add_option("--n", ex.n, "feature subset size");
  explain->add_option("--m", ex.m, "maximum number of regions");
  explain->add_option("--e", ex.e, "stability radius scale");
  explain->add_option("--shape", ex.shape, "box or simplex");
  explain->add_option("--sigma", ex.sigma, "drop centers within this distance");
  explain->add_option("--seed", ex.seed, "random seed");
  explain->add_option("--epsilon-strict", ex.epsilon_strict, "strict inequality margin");
  explain->add_option("--threads", ex.threads, "parallel feature subsets");
  explain->add_flag("--timing", ex.timing, "record elapsed times in the result");
  explain->add_option("--out", ex.out, "result JSON path (default stdout)");

  std::string v_network, v_result;
  int v_samples = 10000;
  std::uint64_t v_seed = 0;
  CLI::App* verify = app.add_subcommand("verify", "re-check a stored correction");
  verify->add_option("--network", v_network)->required();
  verify->add_option("--result", v_result)->required();
  verify->add_option("--samples", v_samples);
  verify->add_option("--seed", v_seed);

  std::string o_network, o_instance, o_features, o_config, o_out;
  int o_grid = 200;
  CLI::App* oracle = app.add_subcommand("oracle", "brute-force grid cross-check");
  oracle->add_option("--network", o_network)->required();
  oracle->add_option("--instance", o_instance)->required();
  oracle->add_option("--features", o_features)->required();
  oracle->add_option("--grid", o_grid);
  oracle->add_option("--config", o_config);
  oracle->add_option("--out", o_out);

  std::string p_result, p_project, p_out;
  CLI::App* plot = app.add_subcommand("plotdata", "CSV for plotting a 2-D result");
  plot->add_option("--result", p_result)->required();
  plot->add_option("--project", p_project, "two feature indices");
  plot->add_option("--out", p_out);

  std::string gn_builtin, gn_hidden = "8", gn_out;
  int gn_input_dim = 2;
  std::uint64_t gn_seed = 0;
  CLI::App* gen_net = app.add_subcommand("gen-network", "random or builtin network");
  gen_net->add_option("--builtin", gn_builtin, "N1 or N2");
  gen_net->add_option("--input-dim", gn_input_dim);
  gen_net->add_option("--hidden", gn_hidden, "hidden sizes, e.g. 8,8");
  gen_net->add_option("--seed", gn_seed);
  gen_net->add_option("--out", gn_out);

  int gd_input_dim = 2, gd_size = 1000;
  double gd_lo = -1.0, gd_hi = 1.0, gd_threshold = 0.0;
  std::string gd_rule = "linear", gd_weights, gd_out;
  std::uint64_t gd_seed = 0;
  CLI::App* gen_data = app.add_subcommand("gen-dataset", "synthetic labelled dataset CSV");
  gen_data->add_option("--input-dim", gd_input_dim);
  gen_data->add_option("--size", gd_size);
  gen_data->add_option("--lo", gd_lo);
  gen_data->add_option("--hi", gd_hi);
  gen_data->add_option("--rule", gd_rule, "linear or hinge (random rule)");
  gen_data->add_option("--weights", gd_weights, "explicit linear rule weights");
  gen_data->add_option("--threshold", gd_threshold, "threshold of the explicit rule");
  gen_data->add_option("--seed", gd_seed);
  gen_data->add_option("--out", gd_out);

  std::string t_data, t_hidden = "8", t_out;
  int t_epochs = 200;
  double t_lr = 0.5;
  std::uint64_t t_seed = 0;
  CLI::App* train = app.add_subcommand("train", "train a small network on a dataset CSV");
  train->add_option("--data", t_data)->required();
  train->add_option("--hidden", t_hidden);
  train->add_option("--epochs", t_epochs);
  train->add_option("--lr", t_lr);
  train->add_option("--seed", t_seed);
  train->add_option("--out", t_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (explain->parsed()) return CmdExplain(ex, out, err);
    if (verify->parsed()) return CmdVerify(v_network, v_result, v_samples, v_seed, out, err);
    if (oracle->parsed()) {
      return CmdOracle(o_network, o_instance, o_features, o_grid, o_config, o_out, out);
    }
    if (plot->parsed()) return CmdPlotData(p_result, p_project, p_out, out);
    if (gen_net->parsed()) {
      Network net = [&] {
        if (!gn_builtin.empty()) return BuiltinNetwork(gn_builtin);
        TaskSpec spec;
        spec.input_dim = gn_input_dim;
        spec.hidden_sizes = ParseSizeList(gn_hidden);
        spec.seed = gn_seed;
        return GenNetwork(spec);
      }();
      WriteOutput(gn_out, SaveNetwork(net), out);
      return kExitOk;
    }
    if (gen_data->parsed()) {
      TaskSpec spec;
      spec.input_dim = gd_input_dim;
      spec.dataset_size = gd_size;
      spec.lo = gd_lo;
      spec.hi = gd_hi;
      spec.seed = gd_seed;
      if (!(gd_lo < gd_hi) || gd_size < 0 || gd_input_dim < 1) throw UsageError("bad dataset spec");
      if (!gd_weights.empty()) {
        std::optional<std::vector<double>> w = ParseNumberList(gd_weights);
        if (!w || static_cast<int>(w->size()) != gd_input_dim) throw UsageError("bad --weights");
        spec.rule.w = Eigen::Map<Eigen::VectorXd>(w->data(), gd_input_dim);
        spec.rule.threshold = gd_threshold;
      } else if (gd_rule == "hinge") {
        spec.rule = RandomRule(spec, LabelRule::Kind::kHinge);
      } else if (gd_rule != "linear") {
        throw UsageError("--rule must be linear or hinge");
      }
      WriteOutput(gd_out, DatasetToCsv(GenDataset(spec)), out);
      return kExitOk;
    }
    if (train->parsed()) {
      const Dataset data = DatasetFromCsv(ReadFile(t_data));
      TrainOptions opts;
      opts.hidden_sizes = ParseSizeList(t_hidden);
      opts.epochs = t_epochs;
      opts.lr = t_lr;
      opts.seed = t_seed;
      const Network net = TrainTiny(data, opts);
      WriteOutput(t_out, SaveNetwork(net), out);
      (t_out.empty() ? err : out) << "train accuracy " << Accuracy(net, data) << '\n';
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "parse error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StructuralError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace symcorr::cli
