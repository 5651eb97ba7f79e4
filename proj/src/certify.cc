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

#include "symcorr/certify.h"

#include <deque>
#include <unordered_set>

namespace symcorr {

CertificateResult CertifyLabel(const Network& net, const ConvexCorrection& shape,
                               int desired, LpSolver& solver, double margin,
                               int max_pieces) {
  CertificateResult result;
  const ConstraintSystem facets = Facets(shape);
  const Eigen::VectorXd& base = shape.base;
  const std::vector<int>& features = shape.features;

  std::deque<ActivationPattern> queue;
  std::unordered_set<ActivationPattern, ActivationPatternHash> seen;
  const ActivationPattern start =
      GetActivations(net, Embed(base, features, Centroid(shape)));
  queue.push_back(start);
  seen.insert(start);

  while (!queue.empty()) {
    if (result.pieces >= max_pieces) return result;
    const ActivationPattern pattern = queue.front();
    queue.pop_front();
    ConstraintSystem piece = facets;
    piece.Append(ActivationConstraints(net, pattern, base, features,
                                       Strictness::kClosed));
    if (!solver.CheckFeasible(piece).feasible()) continue;
    ++result.pieces;

    const AffineMap logits = FixedAffine(net, pattern).Restrict(base, features);
    for (int c = 0; c < net.output_dim(); ++c) {
      if (c == desired) continue;
      const Eigen::VectorXd coeffs =
          (logits.matrix.row(desired) - logits.matrix.row(c)).transpose();
      const double offset = logits.offset[desired] - logits.offset[c];
      SolverResult low = solver.Minimize(piece, coeffs);
      if (!low.feasible()) {
        throw SolverError("label margin has no finite minimum on a bounded piece");
      }
      if (*low.objective_value + offset <= margin) {
        ConstraintSystem bad = piece;
        bad.Add(-coeffs, margin - offset, Relation::kGe);
        result.violating_piece = std::move(bad);
        result.violating_point = *low.point;
        return result;
      }
    }

    const AffineMap pre =
        HiddenPreactivationAffine(net, pattern).Restrict(base, features);
    for (int p = 0; p < net.num_hidden(); ++p) {
      ActivationPattern next = pattern;
      next.flip(p);
      if (seen.contains(next)) continue;
      ConstraintSystem face = piece;
      face.Add(pre.matrix.row(p).transpose(), pre.offset[p], Relation::kEq);
      if (solver.CheckFeasible(face).feasible()) {
        seen.insert(next);
        queue.push_back(std::move(next));
      }
    }
  }
  result.certified = true;
  return result;
}

}  // namespace symcorr
