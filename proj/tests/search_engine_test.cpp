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

#include "dynconn/search_engine.hpp"

#include <gtest/gtest.h>

#include <thread>
#include <vector>

#include "test_support.hpp"

namespace dynconn {
namespace {

using testing_support::replay;
using testing_support::small_buffers;

class EngineRandom : public ::testing::TestWithParam<Variant> {};

TEST_P(EngineRandom, SmallRandomValidatedEveryOp) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Workload w = generate_workload(seed, 16, 400, Mix{}, Topology::kMixed);
    EXPECT_EQ(replay(w, GetParam(), small_buffers(), 1), "") << "seed " << seed;
  }
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const ConnectivityError& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::kInvariantViolation;
}

class EngineBasics : public ::testing::TestWithParam<Variant> {};

TEST_P(EngineBasics, RejectsBadUpdatesWithoutSideEffects) {
  DynamicConnectivity dc(8, GetParam());
  dc.insert(0, 1);
  EXPECT_EQ(code_of([&] { dc.insert(3, 3); }), ErrorCode::kSelfLoop);
  EXPECT_EQ(code_of([&] { dc.insert(1, 0); }), ErrorCode::kDuplicateEdge);
  EXPECT_EQ(code_of([&] { dc.insert(0, 8); }), ErrorCode::kVertexOutOfRange);
  EXPECT_EQ(code_of([&] { dc.connected(9, 0); }), ErrorCode::kVertexOutOfRange);
  EXPECT_EQ(code_of([&] { dc.remove(2, 3); }), ErrorCode::kNoSuchEdge);
  EXPECT_TRUE(dc.connected(0, 1));
  EXPECT_FALSE(dc.connected(0, 2));
  EXPECT_TRUE(dc.connected(5, 5));
  EXPECT_EQ(dc.graph().edge_count(), 1u);
  EXPECT_TRUE(dc.validate().ok()) << dc.validate().first_failure();
}

TEST_P(EngineBasics, CutPathEdgeSplits) {
  const std::uint32_t n = 32;
  DynamicConnectivity dc(n, GetParam());
  for (VertexId v = 0; v + 1 < n; ++v) dc.insert(v, v + 1);
  dc.remove(15, 16);
  const Counters c = dc.counters_snapshot();
  EXPECT_FALSE(dc.connected(0, n - 1));
  EXPECT_TRUE(dc.connected(0, 15));
  EXPECT_TRUE(dc.connected(16, n - 1));
  EXPECT_GE(c.splits, 1u);
  EXPECT_GE(c.case2, 1u);
  EXPECT_EQ(c.case1, 0u);
  EXPECT_TRUE(dc.validate().ok()) << dc.validate().first_failure();
}

TEST_P(EngineBasics, CycleEdgeFindsReplacement) {
  const std::uint32_t n = 32;
  DynamicConnectivity dc(n, GetParam());
  for (VertexId v = 0; v < n; ++v) dc.insert(v, (v + 1) % n);
  dc.remove(7, 8);
  const Counters c = dc.counters_snapshot();
  EXPECT_TRUE(dc.connected(7, 8));
  EXPECT_GE(c.case1, 1u);
  EXPECT_EQ(c.case2, 0u);
  EXPECT_EQ(c.promotions, dc.graph().total_promotions());
  EXPECT_TRUE(dc.validate().ok()) << dc.validate().first_failure();
}

TEST_P(EngineBasics, CliquesWithBridgesSplit) {
  const Workload w = generate_workload(4, 128, 20000, Mix{}, Topology::kCliquesWithBridges);
  DynamicConnectivity dc(w.n, GetParam());
  BfsOracle oracle(w.n);
  for (const Op& op : w.ops) {
    if (op.kind == OpKind::kInsert) {
      dc.insert(op.u, op.v);
      oracle.insert(op.u, op.v);
    } else if (op.kind == OpKind::kDelete) {
      dc.remove(op.u, op.v);
      oracle.remove(op.u, op.v);
    } else {
      ASSERT_EQ(dc.connected(op.u, op.v), oracle.connected(op.u, op.v));
    }
  }
  EXPECT_GT(dc.counters_snapshot().splits, 0u);
  EXPECT_TRUE(dc.validate().ok()) << dc.validate().first_failure();
}

TEST_P(EngineBasics, DefaultBuffersSampledValidation) {
  const Workload w = generate_workload(21, 200, 6000, Mix{}, Topology::kMixed);
  EXPECT_EQ(replay(w, GetParam(), Config{}, 50), "");
}

TEST_P(EngineBasics, ConcurrentReadersAgree) {
  const std::uint32_t n = 64;
  DynamicConnectivity dc(n, GetParam());
  for (VertexId v = 0; v + 1 < n; v += 2) dc.insert(v, v + 1);
  for (VertexId v = 0; v + 4 < n; v += 4) dc.insert(v, v + 4);
  std::vector<std::vector<char>> seen(4);
  std::vector<std::thread> pool;
  for (int t = 0; t < 4; ++t) {
    pool.emplace_back([&, t] {
      for (VertexId u = 0; u < n; ++u) {
        for (VertexId v = 0; v < n; ++v) seen[t].push_back(dc.connected(u, v));
      }
    });
  }
  for (auto& th : pool) th.join();
  for (int t = 1; t < 4; ++t) EXPECT_EQ(seen[t], seen[0]);
  EXPECT_EQ(dc.counters_snapshot().queries, 4u * n * n);
}

TEST(Engine, ValidateEveryRaisesOnCorruption) {
  Config cfg;
  cfg.validate_every = 1;
  DynamicConnectivity dc(16, Variant::kImproved, cfg);
  dc.insert(0, 1);
  dc.insert(1, 2);
  TestAccess::arena(dc)[dc.forest().root_of(0)].size += 1;
  EXPECT_EQ(code_of([&] { dc.insert(5, 6); }), ErrorCode::kInvariantViolation);
}

INSTANTIATE_TEST_SUITE_P(Variants, EngineBasics,
                         ::testing::Values(Variant::kSimple, Variant::kImproved));

INSTANTIATE_TEST_SUITE_P(Variants, EngineRandom,
                         ::testing::Values(Variant::kSimple, Variant::kImproved));

}  // namespace
}  // namespace dynconn
