// Copyright 2026 The dynconn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dynconn/params.hpp"

#include <algorithm>
#include <cmath>

namespace dynconn {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kSelfLoop: return "SelfLoop";
    case ErrorCode::kDuplicateEdge: return "DuplicateEdge";
    case ErrorCode::kVertexOutOfRange: return "VertexOutOfRange";
    case ErrorCode::kNoSuchEdge: return "NoSuchEdge";
    case ErrorCode::kLevelOverflow: return "LevelOverflow";
    case ErrorCode::kLevelMismatch: return "LevelMismatch";
    case ErrorCode::kNotAChild: return "NotAChild";
    case ErrorCode::kInvariantViolation: return "InvariantViolation";
    case ErrorCode::kNoSuchAncestor: return "NoSuchAncestor";
    case ErrorCode::kNoSpecialParent: return "NoSpecialParent";
  }
  return "Unknown";
}

Params Params::make(std::uint64_t n, double epsilon, double alpha) {
  if (n == 0 || n > (std::uint64_t{1} << 32)) {
    throw ConnectivityError(ErrorCode::kVertexOutOfRange,
                            "vertex count must be in [1, 2^32]");
  }
  Params p;
  p.n = n;
  p.epsilon = epsilon;
  p.alpha = alpha;
  p.max_level = floor_log2(n);
  p.log_n = std::log2(static_cast<double>(n));
  p.log_log_n = p.log_n > 1.0 ? std::log2(p.log_n) : 0.0;
  p.heavy_shift = std::max(0, static_cast<int>(std::lround(epsilon * p.log_log_n)));
  p.black_spacing = std::max(1, static_cast<int>(std::floor(epsilon * p.log_log_n)));
  p.special_spacing =
      std::max(1, static_cast<int>(std::floor(p.log_log_n)) * p.black_spacing);
  const long cap_exp = std::clamp(std::lround(alpha * p.log_log_n), 0L, 40L);
  p.buffer_capacity = std::uint64_t{1} << cap_exp;
  return p;
}

}  // namespace dynconn
