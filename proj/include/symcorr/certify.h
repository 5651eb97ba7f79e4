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

// Exact label certificate for a convex correction.
//
// The shape is partitioned into closed linear pieces of the network (one per
// activation pattern whose closure meets the shape). Pieces are discovered
// breadth-first from the piece holding the centroid by crossing one neuron
// boundary at a time, and on each piece the margin of the desired logit
// over every other logit is minimized by LP. A positive minimum on every
// piece proves that every point of the shape receives the desired label.

#ifndef SYMCORR_CERTIFY_H_
#define SYMCORR_CERTIFY_H_

#include <optional>

#include <Eigen/Dense>

#include "symcorr/geometry.h"
#include "symcorr/lincons.h"
#include "symcorr/lp_solver.h"
#include "symcorr/relunet.h"

namespace symcorr {

struct CertificateResult {
  bool certified = false;
  int pieces = 0;
  // On failure: the part of the offending piece where the margin is at most
  // `margin`, and the minimizing point.
  std::optional<ConstraintSystem> violating_piece;
  std::optional<Eigen::VectorXd> violating_point;
};

CertificateResult CertifyLabel(const Network& net, const ConvexCorrection& shape,
                               int desired, LpSolver& solver,
                               double margin = 1e-9, int max_pieces = 100000);

}  // namespace symcorr

#endif  // SYMCORR_CERTIFY_H_
