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


#include "dynconn/induced_shortcut_layer.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "dynconn/search_engine.hpp"
#include "dynconn/validation_oracle.hpp"
#include "dynconn/workload.hpp"
#include "test_support.hpp"

namespace dynconn {
namespace {

void churn(DynamicConnectivity& dc, int ops, std::uint64_t seed) {
  const Workload w =
      generate_workload(seed, dc.vertex_count(), ops, Mix{0.5, 0.3, 0.2}, Topology::kMixed);
  for (const Op& op : w.ops) {
    if (op.kind == OpKind::kInsert) dc.insert(op.u, op.v);
    if (op.kind == OpKind::kDelete) dc.remove(op.u, op.v);
  }
}

LevelBitmap subtree_mask(const DynamicConnectivity& dc, NodeId x) {
  const NodeArena& a = dc.forest().arena();
  LevelBitmap m = 0;
  std::vector<NodeId> stack{x};
  while (!stack.empty()) {
    const NodeId y = stack.back();
    stack.pop_back();
    if (a[y].kind == NodeKind::kLeaf) m |= dc.graph().level_mask(y);
    for (NodeId c : a[y].child) {
      if (c != kNoNode) stack.push_back(c);
    }
  }
  return m;
}

// Nearest special strict descendants of u.
std::vector<NodeId> special_children(const NodeArena& a, NodeId u) {
  std::vector<NodeId> out;
  std::vector<NodeId> stack;
  for (NodeId c : a[u].child) {
    if (c != kNoNode) stack.push_back(c);
  }
  while (!stack.empty()) {
    const NodeId y = stack.back();
    stack.pop_back();
    if (a[y].is_special()) {
      out.push_back(y);
      continue;
    }
    for (NodeId c : a[y].child) {
      if (c != kNoNode) stack.push_back(c);
    }
  }
  return out;
}

using Snapshot = std::map<NodeId, std::tuple<LevelBitmap, LevelBitmap, std::vector<std::tuple<Level, NodeId, NodeId>>>>;

Snapshot snapshot(const DynamicConnectivity& dc) {
  const NodeArena& a = dc.forest().arena();
  Snapshot s;
  for (NodeId x = 0; x < a.capacity(); ++x) {
    if (!a[x].alive) continue;
    std::vector<std::tuple<Level, NodeId, NodeId>> links;
    for (const InducedLink& l : a[x].induced) links.emplace_back(l.level, l.down, l.up);
    s[x] = {a[x].edge_bits, a[x].induced_bits, links};
  }
  return s;
}

TEST(InducedShortcuts, CanonicalAgainstSubtreeMasks) {
  DynamicConnectivity dc(4096, Variant::kImproved);
  churn(dc, 30000, 3);
  ASSERT_GT(dc.params().special_spacing, 1);
  const NodeArena& a = dc.forest().arena();
  const InducedShortcutLayer& ind = *dc.induced();
  const double bound = std::pow(dc.params().log_log_n, 4) + 8;
  std::size_t links = 0;
  for (NodeId u = 0; u < a.capacity(); ++u) {
    if (!a[u].alive || !a[u].is_special()) continue;
    ASSERT_EQ(ind.classify_special(u), a[u].special_types);
    const std::vector<NodeId> kids = special_children(a, u);
    std::vector<LevelBitmap> masks;
    for (NodeId w : kids) masks.push_back(subtree_mask(dc, w));
    for (Level i = 0; i <= dc.params().max_level; ++i) {
      NodeId want = kNoNode;
      int carriers = 0;
      for (std::size_t k = 0; k < kids.size(); ++k) {
        if (has_level(masks[k], i)) {
          ++carriers;
          want = kids[k];
        }
      }
      if (carriers != 1) want = kNoNode;
      ASSERT_EQ(ind.down(u, i), want) << "node " << u << " level " << i;
      if (want != kNoNode) {
        ++links;
        EXPECT_EQ(ind.up(want, i), u);
      }
    }
    if (a[u].parent == kNoNode) {
      for (Level i = 0; i <= dc.params().max_level; ++i) {
        EXPECT_LE(ind.shortcut_path_length(u, i), bound);
      }
    }
  }
  EXPECT_GT(links, 100u);
}

TEST(InducedShortcuts, ShortcutsToSpecialParent) {
  DynamicConnectivity dc(4096, Variant::kImproved);
  churn(dc, 20000, 4);
  const NodeArena& a = dc.forest().arena();
  const InducedShortcutLayer& ind = *dc.induced();
  std::size_t checked = 0;
  for (NodeId u = 0; u < a.capacity(); ++u) {
    if (!a[u].alive || !a[u].is_special()) continue;
    const NodeId p = ind.special_parent(u);
    if (p == kNoNode) {
      try {
        ind.shortcuts_to_special_parent(u);
        ADD_FAILURE() << "expected NoSpecialParent for " << u;
      } catch (const ConnectivityError& e) {
        EXPECT_EQ(e.code(), ErrorCode::kNoSpecialParent);
      }
      continue;
    }
    LevelBitmap want = 0;
    for (Level i = 0; i <= dc.params().max_level; ++i) {
      if (ind.down(p, i) == u) want |= level_bit(i);
    }
    EXPECT_EQ(ind.shortcuts_to_special_parent(u), want) << "node " << u;
    ++checked;
  }
  EXPECT_GT(checked, 100u);
}

TEST(InducedShortcuts, RootPathUpdateIsIdempotent) {
  DynamicConnectivity dc(1024, Variant::kImproved);
  churn(dc, 8000, 5);
  const Snapshot before = snapshot(dc);
  const NodeArena& a = dc.forest().arena();
  for (VertexId v = 0; v < 1024; v += 37) {
    std::vector<NodeId> path;
    for (NodeId y = v; y != kNoNode; y = a[y].parent) path.push_back(y);
    TestAccess::induced(dc).update_on_root_path(path);
  }
  EXPECT_EQ(snapshot(dc), before);
  EXPECT_TRUE(dc.validate().ok());
}

TEST(InducedShortcuts, DepartureThenArrivalRestores) {
  DynamicConnectivity dc(1024, Variant::kImproved);
  churn(dc, 8000, 6);
  const Snapshot before = snapshot(dc);
  InducedShortcutLayer& ind = TestAccess::induced(dc);
  std::size_t tried = 0;
  for (VertexId v = 0; v < 1024; ++v) {
    const LevelBitmap m = dc.graph().level_mask(v);
    if (m == 0) continue;
    const Level i = std::countr_zero(m);
    // pretend the last level-i edge left, then came back
    ind.on_level_departure(v, i);
    ind.on_level_arrival(v, i);
    ++tried;
  }
  EXPECT_GT(tried, 500u);
  EXPECT_EQ(snapshot(dc), before);
}

TEST(InducedShortcuts, BottomLeafRemovalWithNothingGoneIsNoop) {
  DynamicConnectivity dc(1024, Variant::kImproved);
  churn(dc, 8000, 7);
  const Snapshot before = snapshot(dc);
  const Counters c0 = dc.counters_snapshot();
  const NodeArena& a = dc.forest().arena();
  std::uint64_t bits = 0;
  for (NodeId u = 0; u < a.capacity(); ++u) {
    if (!a[u].alive || !a[u].is_special() || a[u].kind == NodeKind::kLeaf) continue;
    TestAccess::induced(dc).update_on_bottom_leaf_removed(u, a[u].edge_bits, 0);
    bits += std::popcount(a[u].edge_bits);
  }
  const Counters c1 = dc.counters_snapshot();
  EXPECT_EQ(c1.branch_nodes_observed - c0.branch_nodes_observed, bits);
  EXPECT_EQ(c1.branch_recomputations, c0.branch_recomputations);
  EXPECT_EQ(snapshot(dc), before);
}

}  // namespace
}  // namespace dynconn
