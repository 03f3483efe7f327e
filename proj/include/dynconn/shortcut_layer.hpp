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
#include <vector>

#include "dynconn/cluster_forest.hpp"

namespace dynconn {

// Black type bits.
inline constexpr std::uint8_t kBlackLevel = 1;    // C-node on a level multiple of s
inline constexpr std::uint8_t kBlackRank = 2;     // rank crosses a multiple of s
inline constexpr std::uint8_t kBlackLeaf = 4;     // leaf of C_L or of a small tree
inline constexpr std::uint8_t kBlackDepth = 8;    // small-tree depth multiple of s

struct RepairLog {
  std::vector<NodeId> candidates;  // nodes whose colors were re-evaluated
  std::vector<NodeId> color_changed;
  std::vector<NodeId> bits_changed;
};

// Colors, standard shortcuts (black-induced parent/children) and the edge
// bitmaps of black nodes in the improved variant.
class ShortcutLayer {
 public:
  ShortcutLayer(ClusterForest& forest, Counters* counters);

  // Pure classification from node attributes.
  std::uint8_t classify_color(NodeId x) const;
  // Nearest strict ancestor that is a rank node, or kNoNode.
  NodeId rank_parent(NodeId x) const;
  NodeId black_ancestor(NodeId x) const;

  // Brings colors, links and black bitmaps up to date after structural
  // changes. touched: nodes whose neighbourhood or attributes changed.
  void repair(const std::vector<NodeId>& touched, const std::vector<NodeId>& rank_changed,
              RepairLog& log);

  // Deepest C-node ancestor-or-self of v with level <= i, via shortcuts.
  NodeId ancestor_at_level(NodeId v, Level i, std::uint64_t* touched) const;

  // Black-node bitmap recomputation starting at b and moving up while changed.
  void propagate_bits(NodeId b, std::vector<NodeId>* changed);
  void set_bip(NodeId x, NodeId parent);

  void on_destroy(NodeId x);

 private:
  void relink_region(NodeId b, std::vector<NodeId>& dirty);
  void drop_links(NodeId x, std::vector<NodeId>& dirty);
  void rank_descendants(NodeId x, std::vector<NodeId>& out) const;

  ClusterForest& forest_;
  NodeArena& arena_;
  Counters* counters_;
  int s_;
  std::vector<NodeId> pending_;  // black nodes that lost a black-induced child
  std::vector<std::uint32_t> seen_;
  std::uint32_t seen_epoch_ = 0;
  bool mark(NodeId x);
  void next_epoch();
};

}  // namespace dynconn
