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

#include <array>
#include <cstdint>
#include <vector>

#include "dynconn/counters.hpp"
#include "dynconn/types.hpp"

namespace dynconn {

enum class NodeKind : std::uint8_t {
  kLeaf,            // graph vertex
  kCluster,         // internal C-node
  kRankTree,        // created by pairing two equal-rank roots
  kRankPath,        // spine node connecting rank-tree roots
  kBufferRoot,
  kBufferInterior,
  kBottomRoot,
  kBottomInterior,
  kTopRoot,
  kTopInterior,
};

// Where a C-node sits inside the local tree of its C-parent.
enum class ChildSlot : std::uint8_t { kNone, kHeavy, kBuffer, kBottom };

inline bool is_cnode(NodeKind k) { return k == NodeKind::kLeaf || k == NodeKind::kCluster; }
inline bool is_rank_kind(NodeKind k) {
  return k == NodeKind::kLeaf || k == NodeKind::kCluster || k == NodeKind::kRankTree ||
         k == NodeKind::kRankPath || k == NodeKind::kBottomRoot;
}
inline bool is_buffer_kind(NodeKind k) {
  return k == NodeKind::kBufferRoot || k == NodeKind::kBufferInterior;
}
inline bool is_bottom_kind(NodeKind k) {
  return k == NodeKind::kBottomRoot || k == NodeKind::kBottomInterior;
}
inline bool is_top_kind(NodeKind k) {
  return k == NodeKind::kTopRoot || k == NodeKind::kTopInterior;
}
inline bool is_small_tree_interior(NodeKind k) {
  return is_buffer_kind(k) || is_bottom_kind(k) || is_top_kind(k);
}

struct InducedLink {
  Level level = 0;
  NodeId down = kNoNode;  // unique special child carrying this level
  NodeId up = kNoNode;    // special parent holding a shortcut to this node
};

struct Node {
  NodeId parent = kNoNode;
  std::array<NodeId, 2> child{kNoNode, kNoNode};
  NodeKind kind = NodeKind::kLeaf;
  bool alive = false;
  bool light = false;  // rank-tree node of a light tree
  ChildSlot slot = ChildSlot::kNone;
  int rank = -1;
  Level level = 0;       // C-nodes only
  Level heavy_tag = -1;  // heavy-tree nodes: level of the owning C-node
  std::uint64_t size = 0;
  NodeId cparent = kNoNode;
  std::uint32_t cluster = 0;  // index of the local-tree record, C-clusters only
  NodeId bottom = kNoNode;    // bottom root holding this C-node

  // Balanced small-tree bookkeeping (buffer, bottom and top trees).
  std::uint64_t key = 0;  // order key while a leaf of such a tree
  std::uint64_t min_key = 0;
  std::uint64_t max_key = 0;
  std::uint32_t leaf_count = 0;
  std::uint32_t removed_since_rebuild = 0;
  std::uint32_t initial_leaves = 0;  // bottom roots
  std::uint64_t serial = 0;          // bottom roots
  int tree_depth = 0;

  LevelBitmap edge_bits = 0;
  std::uint8_t black_types = 0;    // bit t-1 set for black type t
  std::uint8_t special_types = 0;  // bit t-1 set for special type t
  NodeId bip = kNoNode;            // black-induced parent
  std::vector<NodeId> bic;         // black-induced children
  LevelBitmap induced_bits = 0;
  std::vector<InducedLink> induced;

  std::uint32_t mark_epoch = 0;
  std::uint8_t mark_proc = 0;
  std::uint32_t touch_epoch = 0;

  bool is_black() const { return black_types != 0; }
  bool is_special() const { return special_types != 0; }
  int child_count() const { return (child[0] != kNoNode) + (child[1] != kNoNode); }
};

class ArenaListener {
 public:
  virtual ~ArenaListener() = default;
  virtual void on_destroy(NodeId x) = 0;
};

// Owns every node of C_L. Vertex leaves occupy ids 0..n-1. Records which nodes
// had their neighbourhood changed so derived state can be repaired locally.
class NodeArena {
 public:
  explicit NodeArena(std::uint32_t vertices);

  Node& operator[](NodeId x) { return nodes_[x]; }
  const Node& operator[](NodeId x) const { return nodes_[x]; }
  std::size_t capacity() const { return nodes_.size(); }
  std::size_t live_count() const { return live_; }

  NodeId create(NodeKind kind);
  void destroy(NodeId x);

  void attach(NodeId parent, NodeId child);
  void attach_at(NodeId parent, int pos, NodeId child);
  void detach(NodeId child);
  int position(NodeId child) const;

  void touch(NodeId x);
  std::vector<NodeId> take_touched();
  bool tracking() const { return tracking_; }
  void set_tracking(bool on) { tracking_ = on; }

  void set_listener(ArenaListener* listener) { listener_ = listener; }
  void set_counters(Counters* counters) { counters_ = counters; }

 private:
  std::vector<Node> nodes_;
  std::vector<NodeId> free_;
  std::vector<NodeId> touched_;
  std::uint32_t touch_epoch_ = 1;
  std::size_t live_ = 0;
  bool tracking_ = true;
  ArenaListener* listener_ = nullptr;
  Counters* counters_ = nullptr;
};

}  // namespace dynconn
