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

#include "dynconn/shortcut_layer.hpp"

namespace dynconn {

inline constexpr std::uint8_t kSpecialLevel = 1;  // C-node on a level multiple of S
inline constexpr std::uint8_t kSpecialLeaf = 2;   // leaf of C_L
inline constexpr std::uint8_t kSpecialRank = 4;   // light rank node with rank multiple of S

// Per-level shortcuts between special nodes: u keeps a level-i link to its
// unique special descendant w such that no other special descendant of u
// reachable without crossing a special node has level-i edges below it.
class InducedShortcutLayer {
 public:
  InducedShortcutLayer(ClusterForest& forest, ShortcutLayer& standard, Counters* counters);

  std::uint8_t classify_special(NodeId x) const;
  bool is_special(NodeId x) const { return forest_.arena()[x].is_special(); }
  NodeId special_parent(NodeId u) const;

  NodeId down(NodeId u, Level i) const;
  NodeId up(NodeId w, Level i) const;

  // Levels i for which the special parent of u keeps an i-shortcut to u.
  // Throws NoSpecialParent when u has no special ancestor.
  LevelBitmap shortcuts_to_special_parent(NodeId u) const;
  // The unique special descendant reached through i-edges, or kNoNode.
  NodeId i_shortcut_to_special_child(NodeId u, Level i) const;

  // Recomputes the links of every special node on the root path whose
  // special descendants may have changed. path runs leaf-to-root.
  void update_on_root_path(const std::vector<NodeId>& path);
  // Bits of the path from u up to (excluding) special ancestor p, read
  // before u leaves a bottom tree.
  LevelBitmap branch_bits(NodeId u, NodeId p) const;
  void update_on_bottom_leaf_removed(NodeId p, LevelBitmap removed_bits, LevelBitmap branch);

  // Edge-level changes at vertex leaf u.
  void on_level_arrival(NodeId u, Level i);
  void on_level_departure(NodeId u, Level i);

  // Re-establishes all induced links after structural changes.
  void repair(const RepairLog& log, const std::vector<NodeId>& touched);
  void recompute(NodeId u);

  void on_destroy(NodeId x);

  // Path length of the induced i-shortcut walk from the root of v's tree
  // down to v (0 when the walk does not reach v).
  std::size_t shortcut_path_length(NodeId root, Level i) const;

 private:
  void set_down(NodeId u, Level i, NodeId w);
  void clear_down(NodeId u, Level i);
  void drop_all(NodeId x, std::vector<NodeId>& parents);
  InducedLink* find(NodeId x, Level i);
  const InducedLink* find(NodeId x, Level i) const;
  InducedLink& get(NodeId x, Level i);
  void prune(NodeId x);
  NodeId special_ancestor_or_self(NodeId x) const;

  ClusterForest& forest_;
  NodeArena& arena_;
  ShortcutLayer& standard_;
  Counters* counters_;
  Level levels_;
  std::vector<NodeId> pending_;
};

}  // namespace dynconn
