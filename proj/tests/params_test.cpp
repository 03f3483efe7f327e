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

#include <gtest/gtest.h>

#include <cmath>

namespace dynconn {
namespace {

TEST(Params, DerivedThresholds) {
  const Params p = Params::make(1 << 16, 0.5, 3.0);
  EXPECT_EQ(p.max_level, 16);
  EXPECT_DOUBLE_EQ(p.log_log_n, 4.0);
  EXPECT_EQ(p.heavy_shift, 2);
  EXPECT_EQ(p.black_spacing, 2);
  EXPECT_EQ(p.special_spacing, 8);
  EXPECT_EQ(p.buffer_capacity, std::uint64_t{1} << 12);
  EXPECT_TRUE(p.is_heavy(1 << 14, 1 << 16));
  EXPECT_FALSE(p.is_heavy((1 << 14) - 1, 1 << 16));
  EXPECT_EQ(p.level_capacity(3), std::uint64_t{1} << 13);

  const Params q = Params::make(1024, 0.5, 3.0);
  const double ll = std::log2(10.0);
  EXPECT_EQ(q.heavy_shift, std::lround(0.5 * ll));
  EXPECT_EQ(q.black_spacing, 1);
  EXPECT_EQ(q.special_spacing, 3);
  EXPECT_EQ(q.buffer_capacity, std::uint64_t{1} << std::lround(3 * ll));
}

TEST(Params, TinyGraphsMakeEveryChildHeavy) {
  const Params p = Params::make(2, 0.5, 3.0);
  EXPECT_EQ(p.heavy_shift, 0);
  EXPECT_TRUE(p.is_heavy(1, 100));
  EXPECT_EQ(p.buffer_capacity, 1u);
  EXPECT_THROW(Params::make(0, 0.5, 3.0), ConnectivityError);
}

}  // namespace
}  // namespace dynconn
