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

#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace dynconn {

using VertexId = std::uint32_t;
using NodeId = std::uint32_t;
using EdgeKey = std::uint32_t;
using Level = int;

// One bit per edge level; n <= 2^32 keeps floor(log n) + 1 <= 33 bits.
using LevelBitmap = std::uint64_t;

inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();
inline constexpr EdgeKey kNoEdge = std::numeric_limits<EdgeKey>::max();

inline constexpr LevelBitmap level_bit(Level i) { return LevelBitmap{1} << i; }
inline constexpr bool has_level(LevelBitmap m, Level i) { return (m >> i) & 1U; }

enum class Variant { kSimple, kImproved };

enum class ErrorCode {
  kSelfLoop,
  kDuplicateEdge,
  kVertexOutOfRange,
  kNoSuchEdge,
  kLevelOverflow,
  kLevelMismatch,
  kNotAChild,
  kInvariantViolation,
  kNoSuchAncestor,
  kNoSpecialParent,
};

const char* to_string(ErrorCode code);

class ConnectivityError : public std::runtime_error {
 public:
  ConnectivityError(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// floor(log2(x)) for x >= 1.
inline int floor_log2(std::uint64_t x) {
  return 63 - std::countl_zero(x);
}

}  // namespace dynconn
