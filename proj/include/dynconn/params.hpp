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

#include <cstdint>

#include "dynconn/types.hpp"

namespace dynconn {

// Constants fitted once against the structural bounds and then frozen. The
// validator asserts them; the acceptance suite re-checks them at larger n.
struct Calibration {
  // depth(leaf of C_L) <= height_factor * ceil(log n).
  double simple_height_factor = 3.0;
  double improved_height_factor = 6.0;
  // depth(v in L(u)) <= log(n(u)/n(v)) + lazy_depth_slope * log log n + lazy_depth_offset.
  // The slope defaults to 3 * alpha when left negative.
  double lazy_depth_slope = -1.0;
  double lazy_depth_offset = 8.0;
  // black-induced children per node <= bic_factor * (log n)^(3 epsilon) + bic_offset.
  double bic_factor = 2.0;
  double bic_offset = 4.0;
  // Induced shortcut path length <= path_factor * (log log n)^4 + path_offset.
  double path_factor = 1.0;
  double path_offset = 8.0;
  // Nodes touched by one ancestor_at_level call <= ancestor_factor *
  // (log n / log log n) + ancestor_offset.
  double ancestor_factor = 5.0;
  double ancestor_offset = 12.0;
};

struct Config {
  double epsilon = 0.5;
  double alpha = 3.0;
  // Run the full validator after every k-th public update; 0 disables it.
  std::uint64_t validate_every = 0;
  Calibration calibration{};
};

// Thresholds derived from n, epsilon and alpha. Every divisor is a power of two
// so division is a shift.
struct Params {
  std::uint64_t n = 0;
  Level max_level = 0;     // floor(log n)
  double log_n = 0.0;      // log2 n
  double log_log_n = 0.0;  // log2 log2 n, 0 for n < 4
  int heavy_shift = 0;     // round(epsilon * log log n), >= 0
  int black_spacing = 1;   // max(1, floor(epsilon * log log n))
  int special_spacing = 1; // max(1, floor(log log n) * black_spacing)
  std::uint64_t buffer_capacity = 1;  // 2^round(alpha * log log n)
  double epsilon = 0.5;
  double alpha = 3.0;

  static Params make(std::uint64_t n, double epsilon, double alpha);

  // A zero shift means the divisor rounded down to 1; every child is heavy.
  bool is_heavy(std::uint64_t child_size, std::uint64_t parent_size) const {
    return heavy_shift == 0 || child_size >= (parent_size >> heavy_shift);
  }
  std::uint64_t heavy_threshold(std::uint64_t parent_size) const {
    return heavy_shift == 0 ? 0 : parent_size >> heavy_shift;
  }
  // Largest cluster size allowed at level i.
  std::uint64_t level_capacity(Level i) const { return n >> i; }
};

}  // namespace dynconn
