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

// Command implementations behind the symcorr executable. The verifier,
// grid oracle and plot-data builders are exposed so tests can call them
// without going through argv.

#ifndef SYMCORR_TOOLS_CLI_H_
#define SYMCORR_TOOLS_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symcorr/json_io.h"
#include "symcorr/relunet.h"
#include "symcorr/search.h"

namespace symcorr::cli {

enum ExitCode {
  kExitOk = 0,
  kExitUsage = 1,
  kExitNoInterpretation = 2,
  kExitAlreadyAccepted = 3,
  kExitVerificationFailed = 4,
};

// Runs one command line; argv[0] is the program name.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "builtin:N1" or a network JSON path.
Network LoadNetworkArg(const std::string& arg);
// Inline "0.2,0.1" or a file holding a JSON array or one CSV row.
Eigen::VectorXd LoadVectorArg(const std::string& arg);
std::vector<int> ParseIndexList(const std::string& text);
// Positive layer widths, e.g. "8,8".
std::vector<int> ParseSizeList(const std::string& text);

struct VerifyReport {
  int samples = 0;
  int flipped = 0;
  int outside_regions = 0;  // audit against the regions stored in the result
  bool center_inside = false;
  bool ball_inside = false;
  bool ball_flips = false;

  double flip_rate() const { return samples ? static_cast<double>(flipped) / samples : 0.0; }
  bool passed() const { return samples > 0 && flipped == samples && ball_inside && ball_flips; }
};

// Independent re-check of a stored interpretation: uniform samples of the
// correction, and the stability ball around the stored center.
VerifyReport VerifyInterpretation(const Network& net, const ResultFile& result, int samples,
                                  std::uint64_t seed);

struct OracleReport {
  int grid = 0;
  std::vector<int> features;
  std::int64_t accepted = 0;
  std::int64_t total = 0;
  // Minimum weighted-L1 correction among accepted lattice points.
  std::optional<double> min_distance;
  std::optional<Eigen::VectorXd> min_correction;
  double spacing_distance = 0.0;  // weighted size of one lattice step summed over axes
  // Largest box of lattice points that are all accepted, in correction
  // coordinates.
  std::optional<Eigen::VectorXd> box_lo;
  std::optional<Eigen::VectorXd> box_hi;
  double box_volume = 0.0;
  std::vector<std::string> mask;  // 2-D grids only: one row per second-axis value
};

constexpr int kMaxOracleFeatures = 3;

// Evaluates the network on a grid^|features| lattice over the domain of the
// selected features, other coordinates held at `input`.
OracleReport GridOracle(const Network& net, const Eigen::VectorXd& input,
                        const std::vector<int>& features, int grid, const ExplainConfig& cfg);

// CSV rows "element,id,x,y": region polygons (closed), the correction
// polygon, the original point and the stable center, on the plane of the two
// given input features (a slice through the stable center when the
// correction has more dimensions).
std::string PlotDataCsv(const ResultFile& result, const std::vector<int>& plane);

}  // namespace symcorr::cli

#endif  // SYMCORR_TOOLS_CLI_H_
