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

#include "symcorr/geometry.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "json.hpp"

namespace symcorr {
namespace {

using nlohmann::json;

constexpr int kMaxExactCornerDims = 12;
constexpr int kMaxGrowthSteps = 20000;
constexpr int kMaxRegionPicks = 10;

double Factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Barycentric coordinate matrix: lambda = inv * [x; 1].
Eigen::MatrixXd BarycentricInverse(const ConvexCorrection& c) {
  const int n = c.dim();
  Eigen::MatrixXd m(n + 1, n + 1);
  for (int k = 0; k <= n; ++k) {
    m.block(0, k, n, 1) = c.vertices[k];
    m(n, k) = 1.0;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) throw StructuralError("degenerate simplex");
  return lu.inverse();
}

Eigen::VectorXd ToVector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> ToStd(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Vertices of a regular simplex centered at the origin with unit
// circumradius.
std::vector<Eigen::VectorXd> RegularSimplex(int n) {
  // Center the n+1 unit vectors of R^{n+1} and express them in an
  // orthonormal basis of the hyperplane sum(x) = 0.
  Eigen::MatrixXd centered = Eigen::MatrixXd::Identity(n + 1, n + 1) -
                             Eigen::MatrixXd::Constant(n + 1, n + 1, 1.0 / (n + 1));
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeFullU);
  Eigen::MatrixXd basis = svd.matrixU().leftCols(n);
  std::vector<Eigen::VectorXd> out;
  for (int k = 0; k <= n; ++k) {
    Eigen::VectorXd y = basis.transpose() * centered.col(k);
    out.push_back(y / y.norm());
  }
  return out;
}

Eigen::MatrixXd RandomRotation(int n, Rng& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

// Largest scaled inscribed cube (L1 row norms) or ball (L2 row norms):
// maximize h subject to a.x + b - h * ||a o scale|| >= 0, 0 <= h <= cap.
std::optional<std::pair<Eigen::VectorXd, double>> InscribedCenter(
    const Region& region, ShapeKind kind, const Eigen::VectorXd& scale,
    double cap, LpSolver& solver) {
  const int n = region.dim();
  ConstraintSystem lifted(n + 1);
  auto row_norm = [&](const Eigen::VectorXd& a) {
    Eigen::VectorXd s = a.cwiseProduct(scale);
    return kind == ShapeKind::kBox ? s.lpNorm<1>() : s.norm();
  };
  for (const LinearConstraint& c : region.system.constraints()) {
    Eigen::VectorXd coeffs(n + 1);
    coeffs.head(n) = c.coeffs;
    coeffs[n] = c.rel == Relation::kEq ? 0.0 : -row_norm(c.coeffs);
    lifted.Add(coeffs, c.offset, c.rel);
  }
  if (region.system.bounds()) {
    const Bounds& b = *region.system.bounds();
    for (int i = 0; i < n; ++i) {
      if (std::isfinite(b.lo[i])) {
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(n + 1);
        coeffs[i] = 1.0;
        coeffs[n] = -scale[i];
        lifted.Add(coeffs, -b.lo[i], Relation::kGe);
      }
      if (std::isfinite(b.hi[i])) {
        Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(n + 1);
        coeffs[i] = -1.0;
        coeffs[n] = -scale[i];
        lifted.Add(coeffs, b.hi[i], Relation::kGe);
      }
    }
  }
  Bounds hb = Bounds::Unbounded(n + 1);
  hb.lo[n] = 0.0;
  hb.hi[n] = cap;
  lifted.SetBounds(hb);
  Eigen::VectorXd objective = Eigen::VectorXd::Zero(n + 1);
  objective[n] = -1.0;
  SolverResult r = solver.Minimize(lifted, objective);
  if (!r.feasible()) return std::nullopt;
  const double h = (*r.point)[n];
  if (!(h > 1e-12)) return std::nullopt;
  return std::make_pair(Eigen::VectorXd(r.point->head(n)), h);
}

std::vector<Eigen::VectorXd> EdgeMidpoints(const ConvexCorrection& c,
                                           const std::vector<Eigen::VectorXd>& verts) {
  std::vector<Eigen::VectorXd> mids;
  const int n = c.dim();
  if (c.kind == ShapeKind::kSimplex) {
    for (std::size_t i = 0; i < verts.size(); ++i) {
      for (std::size_t j = i + 1; j < verts.size(); ++j) {
        mids.push_back(0.5 * (verts[i] + verts[j]));
      }
    }
    return mids;
  }
  if (n > kMaxExactCornerDims) return mids;
  // Corners are enumerated in binary order, so the neighbours of corner m
  // across axis i are m and m ^ (1 << i).
  for (std::size_t m = 0; m < verts.size(); ++m) {
    for (int i = 0; i < n; ++i) {
      const std::size_t other = m ^ (std::size_t{1} << i);
      if (other > m) mids.push_back(0.5 * (verts[m] + verts[other]));
    }
  }
  return mids;
}

}  // namespace

std::string ShapeKindName(ShapeKind kind) {
  return kind == ShapeKind::kBox ? "box" : "simplex";
}

ShapeKind ParseShapeKind(const std::string& name) {
  if (name == "box") return ShapeKind::kBox;
  if (name == "simplex") return ShapeKind::kSimplex;
  throw ParseError("unknown shape '" + name + "' (expected box or simplex)");
}

ConvexCorrection ConvexCorrection::Box(Eigen::VectorXd lo, Eigen::VectorXd hi,
                                       std::vector<int> features,
                                       Eigen::VectorXd base) {
  if (lo.size() != hi.size()) throw StructuralError("box bounds differ in length");
  ConvexCorrection c;
  c.kind = ShapeKind::kBox;
  if (features.empty()) {
    features.resize(lo.size());
    std::iota(features.begin(), features.end(), 0);
  }
  c.lo = std::move(lo);
  c.hi = std::move(hi);
  c.features = std::move(features);
  c.base = std::move(base);
  return c;
}

ConvexCorrection ConvexCorrection::Simplex(std::vector<Eigen::VectorXd> vertices,
                                           std::vector<int> features,
                                           Eigen::VectorXd base) {
  if (vertices.empty()) throw StructuralError("simplex needs vertices");
  const auto n = vertices.front().size();
  if (static_cast<Eigen::Index>(vertices.size()) != n + 1) {
    throw StructuralError("simplex in dimension " + std::to_string(n) +
                          " needs " + std::to_string(n + 1) + " vertices");
  }
  ConvexCorrection c;
  c.kind = ShapeKind::kSimplex;
  if (features.empty()) {
    features.resize(n);
    std::iota(features.begin(), features.end(), 0);
  }
  c.vertices = std::move(vertices);
  c.features = std::move(features);
  c.base = std::move(base);
  return c;
}

bool ConvexCorrection::operator==(const ConvexCorrection& other) const {
  if (kind != other.kind || features != other.features) return false;
  if (base.size() != other.base.size() || base != other.base) return false;
  if (kind == ShapeKind::kBox) return lo == other.lo && hi == other.hi;
  if (vertices.size() != other.vertices.size()) return false;
  for (std::size_t k = 0; k < vertices.size(); ++k) {
    if (vertices[k] != other.vertices[k]) return false;
  }
  return true;
}

double Volume(const ConvexCorrection& c) {
  const int n = c.dim();
  if (c.kind == ShapeKind::kBox) {
    double v = 1.0;
    for (int i = 0; i < n; ++i) v *= std::max(0.0, c.hi[i] - c.lo[i]);
    return v;
  }
  Eigen::MatrixXd edges(n, n);
  for (int k = 1; k <= n; ++k) edges.col(k - 1) = c.vertices[k] - c.vertices[0];
  return std::abs(edges.determinant()) / Factorial(n);
}

ConstraintSystem Facets(const ConvexCorrection& c) {
  const int n = c.dim();
  ConstraintSystem sys(n);
  if (c.kind == ShapeKind::kBox) {
    for (int i = 0; i < n; ++i) {
      sys.Add(Eigen::VectorXd::Unit(n, i), -c.lo[i], Relation::kGe);
      sys.Add(-Eigen::VectorXd::Unit(n, i), c.hi[i], Relation::kGe);
    }
    return sys;
  }
  const Eigen::MatrixXd inv = BarycentricInverse(c);
  for (int k = 0; k <= n; ++k) {
    sys.Add(inv.block(k, 0, 1, n).transpose(), inv(k, n), Relation::kGe);
  }
  return sys;
}

bool InsideShape(const ConvexCorrection& c, const Eigen::VectorXd& x, double slack) {
  if (c.kind == ShapeKind::kBox) {
    for (int i = 0; i < c.dim(); ++i) {
      if (x[i] < c.lo[i] - slack || x[i] > c.hi[i] + slack) return false;
    }
    return true;
  }
  return Facets(c).Contains(x, slack);
}

Eigen::VectorXd Centroid(const ConvexCorrection& c) {
  if (c.kind == ShapeKind::kBox) return 0.5 * (c.lo + c.hi);
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(c.dim());
  for (const Eigen::VectorXd& v : c.vertices) sum += v;
  return sum / static_cast<double>(c.vertices.size());
}

Eigen::VectorXd SampleUniform(const ConvexCorrection& c, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int n = c.dim();
  if (c.kind == ShapeKind::kBox) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = c.lo[i] + unit(rng) * (c.hi[i] - c.lo[i]);
    return x;
  }
  // Flat Dirichlet weights via normalized exponentials.
  std::exponential_distribution<double> expo(1.0);
  Eigen::VectorXd w(n + 1);
  for (int k = 0; k <= n; ++k) w[k] = expo(rng);
  w /= w.sum();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (int k = 0; k <= n; ++k) x += w[k] * c.vertices[k];
  return x;
}

std::vector<Eigen::VectorXd> ShapeVertices(const ConvexCorrection& c, Rng& rng,
                                           int max_sampled) {
  if (c.kind == ShapeKind::kSimplex) return c.vertices;
  const int n = c.dim();
  std::vector<Eigen::VectorXd> out;
  auto corner = [&](auto bit) {
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x[i] = bit(i) ? c.hi[i] : c.lo[i];
    return x;
  };
  if (n <= kMaxExactCornerDims) {
    const std::size_t count = std::size_t{1} << n;
    out.reserve(count);
    for (std::size_t m = 0; m < count; ++m) {
      out.push_back(corner([m](int i) { return (m >> i) & 1U; }));
    }
    return out;
  }
  std::bernoulli_distribution coin(0.5);
  for (int s = 0; s < max_sampled; ++s) {
    out.push_back(corner([&](int) { return coin(rng); }));
  }
  return out;
}

int FindContainingRegion(const std::vector<Region>& regions,
                         const Eigen::VectorXd& x, int hint) {
  if (hint >= 0 && hint < static_cast<int>(regions.size()) &&
      Membership(regions[hint], x)) {
    return hint;
  }
  for (int i = 0; i < static_cast<int>(regions.size()); ++i) {
    if (i != hint && Membership(regions[i], x)) return i;
  }
  return -1;
}

bool ContainedInOneRegion(const ConvexCorrection& c,
                          const std::vector<Region>& regions, Rng& rng) {
  const std::vector<Eigen::VectorXd> verts = ShapeVertices(c, rng);
  const int home = FindContainingRegion(regions, verts.front());
  if (home < 0) return false;
  for (const Eigen::VectorXd& v : verts) {
    if (!Membership(regions[home], v)) return false;
  }
  return true;
}

bool Contained(const ConvexCorrection& c, const std::vector<Region>& regions,
               const GrowthParams& params, Rng& rng) {
  const std::vector<Eigen::VectorXd> verts = ShapeVertices(c, rng);
  int hint = FindContainingRegion(regions, verts.front());
  if (hint < 0) return false;
  bool single = true;
  for (const Eigen::VectorXd& v : verts) {
    if (!Membership(regions[hint], v)) {
      single = false;
      break;
    }
  }
  if (single) return true;
  auto covered = [&](const Eigen::VectorXd& x) {
    const int idx = FindContainingRegion(regions, x, hint);
    if (idx < 0) return false;
    hint = idx;
    return true;
  };
  for (const Eigen::VectorXd& v : verts) {
    if (!covered(v)) return false;
  }
  for (const Eigen::VectorXd& m : EdgeMidpoints(c, verts)) {
    if (!covered(m)) return false;
  }
  if (!covered(Centroid(c))) return false;
  for (int s = 0; s < params.containment_samples; ++s) {
    if (!covered(SampleUniform(c, rng))) return false;
  }
  return true;
}

std::optional<ConvexCorrection> SampleInitial(const std::vector<Region>& regions,
                                              ShapeKind kind,
                                              const GrowthParams& params,
                                              Rng& rng, LpSolver& solver) {
  if (regions.empty()) throw StructuralError("no regions to sample from");
  const int n = regions.front().dim();
  Eigen::VectorXd scale(n);
  for (int i = 0; i < n; ++i) scale[i] = params.AxisScale(i);
  std::uniform_int_distribution<std::size_t> pick(0, regions.size() - 1);
  const int picks = std::min<int>(kMaxRegionPicks, static_cast<int>(regions.size()));
  for (int attempt = 0; attempt < picks; ++attempt) {
    const Region& region = regions[pick(rng)];
    auto center = InscribedCenter(region, kind, scale, params.init_scale, solver);
    if (!center) continue;
    const auto& [x0, radius] = *center;
    double r = radius;
    const Eigen::MatrixXd rotation =
        kind == ShapeKind::kSimplex ? RandomRotation(n, rng) : Eigen::MatrixXd();
    const std::vector<Eigen::VectorXd> unit_simplex =
        kind == ShapeKind::kSimplex ? RegularSimplex(n) : std::vector<Eigen::VectorXd>();
    for (int halving = 0; halving <= params.max_halvings; ++halving, r *= 0.5) {
      ConvexCorrection shape;
      if (kind == ShapeKind::kBox) {
        shape = ConvexCorrection::Box(x0 - r * scale, x0 + r * scale,
                                      region.features, region.base);
      } else {
        std::vector<Eigen::VectorXd> verts;
        for (const Eigen::VectorXd& u : unit_simplex) {
          verts.push_back(x0 + r * scale.cwiseProduct(rotation * u));
        }
        shape = ConvexCorrection::Simplex(std::move(verts), region.features,
                                          region.base);
      }
      if (ContainedInOneRegion(shape, regions, rng)) return shape;
    }
  }
  return std::nullopt;
}

ConvexCorrection Grow(const ConvexCorrection& c,
                      const std::vector<Region>& regions,
                      const GrowthParams& params, Rng& rng,
                      std::vector<double>* volumes) {
  ConvexCorrection current = c;
  double volume = Volume(current);
  const int n = current.dim();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal;
  int stalls = 0;
  int cursor = 0;
  for (int step = 0; step < kMaxGrowthSteps && stalls < params.max_stalls; ++step) {
    ConvexCorrection proposal = current;
    if (current.kind == ShapeKind::kBox) {
      const int face = cursor++ % (2 * n);
      const int axis = face / 2;
      const double amount = params.step * params.AxisScale(axis) * (1.0 - unit(rng));
      if (face % 2 == 0) {
        proposal.lo[axis] -= amount;
      } else {
        proposal.hi[axis] += amount;
      }
    } else {
      const int vertex = cursor++ % (n + 1);
      Eigen::VectorXd dir(n);
      for (int i = 0; i < n; ++i) dir[i] = normal(rng);
      dir /= dir.norm();
      for (int i = 0; i < n; ++i) dir[i] *= params.AxisScale(i);
      proposal.vertices[vertex] += params.step * dir;
    }
    const double proposed_volume = Volume(proposal);
    if (proposed_volume > volume && Contained(proposal, regions, params, rng)) {
      current = std::move(proposal);
      volume = proposed_volume;
      stalls = 0;
      if (volumes) volumes->push_back(volume);
    } else {
      ++stalls;
    }
  }
  return current;
}

std::optional<ConvexCorrection> InferConvexCorrection(
    const std::vector<Region>& regions, ShapeKind kind,
    const GrowthParams& params, Rng& rng, LpSolver& solver,
    const ShapeFilter& filter) {
  if (regions.empty()) throw StructuralError("no regions to grow in");
  std::optional<ConvexCorrection> best;
  double best_volume = -1.0;
  for (int attempt = 0; attempt < std::max(1, params.retries); ++attempt) {
    std::optional<ConvexCorrection> initial =
        SampleInitial(regions, kind, params, rng, solver);
    if (!initial) continue;
    ConvexCorrection grown = Grow(*initial, regions, params, rng);
    std::optional<ConvexCorrection> candidate =
        filter ? filter(grown) : std::optional<ConvexCorrection>(std::move(grown));
    if (!candidate) continue;
    const double v = Volume(*candidate);
    if (v > best_volume) {
      best_volume = v;
      best = std::move(candidate);
    }
  }
  return best;
}

std::string CorrectionToJson(const ConvexCorrection& c) {
  json doc;
  doc["kind"] = ShapeKindName(c.kind);
  doc["features"] = c.features;
  if (c.kind == ShapeKind::kBox) {
    doc["lo"] = ToStd(c.lo);
    doc["hi"] = ToStd(c.hi);
  } else {
    doc["vertices"] = json::array();
    for (const Eigen::VectorXd& v : c.vertices) doc["vertices"].push_back(ToStd(v));
  }
  if (c.base.size() > 0) doc["base"] = ToStd(c.base);
  return doc.dump();
}

ConvexCorrection CorrectionFromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("$: invalid JSON: ") + e.what());
  }
  try {
    const ShapeKind kind = ParseShapeKind(doc.at("kind").get<std::string>());
    auto features = doc.at("features").get<std::vector<int>>();
    Eigen::VectorXd base;
    if (doc.contains("base")) base = ToVector(doc["base"].get<std::vector<double>>());
    if (kind == ShapeKind::kBox) {
      Eigen::VectorXd lo = ToVector(doc.at("lo").get<std::vector<double>>());
      Eigen::VectorXd hi = ToVector(doc.at("hi").get<std::vector<double>>());
      if (lo.size() != static_cast<Eigen::Index>(features.size()) || lo.size() != hi.size()) {
        throw ParseError("$.lo/$.hi: length must equal the number of features");
      }
      if ((lo.array() > hi.array()).any()) throw ParseError("$.lo: exceeds hi");
      return ConvexCorrection::Box(std::move(lo), std::move(hi), std::move(features),
                                   std::move(base));
    }
    std::vector<Eigen::VectorXd> verts;
    for (const json& v : doc.at("vertices")) {
      verts.push_back(ToVector(v.get<std::vector<double>>()));
      if (verts.back().size() != static_cast<Eigen::Index>(features.size())) {
        throw ParseError("$.vertices: vertex length must equal the number of features");
      }
    }
    return ConvexCorrection::Simplex(std::move(verts), std::move(features), std::move(base));
  } catch (const json::exception& e) {
    throw ParseError(std::string("correction: ") + e.what());
  } catch (const StructuralError& e) {
    throw ParseError(std::string("correction: ") + e.what());
  }
}

}  // namespace symcorr
