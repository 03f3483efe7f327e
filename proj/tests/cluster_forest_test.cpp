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


#include "dynconn/cluster_forest.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace dynconn {
namespace {

// Reference C-tree: parent pointer per live C-node, kNoNode at roots.
class Model {
 public:
  explicit Model(std::uint32_t n) : n_(n) {
    for (NodeId v = 0; v < n; ++v) parent_[v] = kNoNode;
  }
  std::map<NodeId, NodeId> parent_;
  std::uint32_t n_;

  std::vector<NodeId> kids(NodeId u) const {
    std::vector<NodeId> out;
    for (auto& [x, p] : parent_) {
      if (p == u) out.push_back(x);
    }
    return out;
  }
  std::uint64_t size(NodeId u) const {
    if (u < n_) return 1;
    std::uint64_t s = 0;
    for (NodeId c : kids(u)) s += size(c);
    return s;
  }
  Level level(NodeId u) const {
    Level l = 0;
    for (NodeId y = parent_.at(u); y != kNoNode; y = parent_.at(y)) ++l;
    return l;
  }
};

void check(const ClusterForest& f, const Model& m) {
  const NodeArena& arena = f.arena();
  const double height =
      (f.lazy() ? 6.0 : 3.0) * std::ceil(f.params().log_n);
  for (auto& [x, p] : m.parent_) {
    ASSERT_TRUE(arena[x].alive) << x;
    EXPECT_EQ(f.cparent(x), p) << "cparent of " << x;
    EXPECT_EQ(f.size(x), m.size(x)) << "size of " << x;
    EXPECT_EQ(f.level(x), m.level(x)) << "level of " << x;
    if (x >= m.n_) {
      std::vector<NodeId> got = f.children(x);
      std::sort(got.begin(), got.end());
      EXPECT_EQ(got, m.kids(x)) << "children of " << x;
      EXPECT_EQ(f.child_count(x), got.size());
      for (NodeId c : got) {
        const bool heavy = arena[c].slot == ChildSlot::kHeavy;
        if (!f.lazy()) EXPECT_TRUE(heavy);
        else EXPECT_EQ(heavy, f.params().is_heavy(f.size(c), f.size(x))) << "slot of " << c;
      }
    } else {
      NodeId root = x;
      while (m.parent_.at(root) != kNoNode) root = m.parent_.at(root);
      EXPECT_EQ(f.root_of(x), root);
      int depth = 0;
      for (NodeId y = x; arena[y].parent != kNoNode; y = arena[y].parent) ++depth;
      EXPECT_LE(depth, height) << "leaf " << x;
    }
  }
}

class ForestRandom : public ::testing::TestWithParam<std::tuple<Variant, double>> {};

TEST_P(ForestRandom, MergeAndSplitFollowModel) {
  const auto [variant, alpha] = GetParam();
  const std::uint32_t n = 64;
  Counters counters;
  ClusterForest f(Params::make(n, 0.5, alpha), variant, &counters);
  Model m(n);
  std::mt19937_64 rng(3);
  std::uint64_t merges = 0, splits = 0;
  for (int step = 0; step < 3000; ++step) {
    std::vector<NodeId> nodes;
    for (auto& [x, p] : m.parent_) nodes.push_back(x);
    const NodeId a = nodes[rng() % nodes.size()];
    const NodeId pa = m.parent_[a];
    if (rng() % 2 == 0) {
      // merge a with a random sibling
      std::vector<NodeId> sib;
      for (auto& [x, p] : m.parent_) {
        if (p == pa && x != a) sib.push_back(x);
      }
      if (sib.empty() || m.level(a) + 1 >= f.params().max_level) continue;
      const NodeId b = sib[rng() % sib.size()];
      const bool a_leaf = a < n, b_leaf = b < n;
      const NodeId s = f.merge_cnodes(a, b);
      if (a_leaf && b_leaf) {
        ASSERT_GE(s, n);
        m.parent_[s] = pa;
        m.parent_[a] = m.parent_[b] = s;
      } else if (a_leaf || b_leaf) {
        ASSERT_EQ(s, a_leaf ? b : a);
        m.parent_[a_leaf ? a : b] = s;
      } else {
        ASSERT_EQ(s, a);
        for (NodeId c : m.kids(b)) m.parent_[c] = a;
        m.parent_.erase(b);
      }
      ++merges;
    } else {
      if (pa == kNoNode) continue;
      const NodeId grand = m.parent_[pa];
      NodeId kept = kNoNode;
      const NodeId fresh = f.split_to_new_parent(a, &kept);
      if (a < n) {
        ASSERT_EQ(fresh, a);
        m.parent_[a] = grand;
      } else {
        ASSERT_GE(fresh, n);
        m.parent_[fresh] = grand;
        m.parent_[a] = fresh;
      }
      const std::vector<NodeId> rest = m.kids(pa);
      if (rest.size() == 1 && rest[0] < n) {
        EXPECT_EQ(kept, rest[0]);
        m.parent_[rest[0]] = grand;
        m.parent_.erase(pa);
      } else {
        EXPECT_EQ(kept, pa);
      }
      ++splits;
    }
    check(f, m);
    if (::testing::Test::HasFailure()) FAIL() << "step " << step;
  }
  EXPECT_EQ(counters.splits, splits);
  EXPECT_GT(merges, 100u);
  EXPECT_GT(splits, 100u);
}

INSTANTIATE_TEST_SUITE_P(
    Variants, ForestRandom,
    ::testing::Values(std::tuple{Variant::kSimple, 3.0}, std::tuple{Variant::kImproved, 3.0},
                      std::tuple{Variant::kImproved, 1.0}));

TEST(ClusterForest, MergeRejectsNonSiblings) {
  ClusterForest f(Params::make(8, 0.5, 3.0), Variant::kImproved, nullptr);
  const NodeId u = f.merge_cnodes(0, 1);
  EXPECT_THROW(f.merge_cnodes(0, 2), ConnectivityError);
  EXPECT_THROW(f.merge_cnodes(u, u), ConnectivityError);
  EXPECT_THROW(f.split_to_new_parent(u, nullptr), ConnectivityError);
}

}  // namespace
}  // namespace dynconn
