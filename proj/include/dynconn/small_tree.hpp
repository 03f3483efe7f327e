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

#include "dynconn/node_arena.hpp"

namespace dynconn {

enum class TreeFamily : std::uint8_t { kBuffer, kBottom, kTop };

// Leaf-oriented balanced search trees embedded in C_L: buffer, bottom and top
// trees. The root node is persistent for the lifetime of the tree; interior
// nodes come and go. Leaves are ordered by Node::key. Balance is kept by
// partial rebuilding: an insertion rebuilds the highest ancestor whose heavier
// child holds more than 3/4 of its leaves, deletions leave unary nodes behind
// and trigger a full rebuild once they outnumber the live leaves.
namespace small_tree {

bool is_interior(const Node& node, TreeFamily family);

void insert(NodeArena& arena, NodeId root, NodeId leaf, TreeFamily family);
void remove(NodeArena& arena, NodeId root, NodeId leaf, TreeFamily family);
void rebuild(NodeArena& arena, NodeId subtree_root, TreeFamily family);

// Detaches every leaf and destroys every interior node below root. The root
// itself is left empty.
void clear(NodeArena& arena, NodeId root, TreeFamily family, std::vector<NodeId>* leaves);

void collect_leaves(const NodeArena& arena, NodeId root, TreeFamily family,
                    std::vector<NodeId>& out);
// Leaves with key >= min_key, in key order.
void collect_at_least(const NodeArena& arena, NodeId root, TreeFamily family,
                      std::uint64_t min_key, std::vector<NodeId>& out);
// Some leaf with lo <= key <= hi, or kNoNode.
NodeId find_in_range(const NodeArena& arena, NodeId root, TreeFamily family, std::uint64_t lo,
                     std::uint64_t hi);

inline std::uint32_t leaf_count(const NodeArena& arena, NodeId root) {
  return arena[root].leaf_count;
}
inline std::uint64_t max_key(const NodeArena& arena, NodeId root) { return arena[root].max_key; }

// Order keys. Sizes and ranks go to the high word, the node id breaks ties.
inline std::uint64_t size_key(std::uint64_t size, NodeId id) {
  const std::uint64_t capped = size > 0xffffffffULL ? 0xffffffffULL : size;
  return (capped << 32) | id;
}
inline std::uint64_t rank_key(int rank, NodeId id) {
  return (static_cast<std::uint64_t>(rank + 1) << 32) | id;
}
inline std::uint64_t key_high(std::uint64_t key) { return key >> 32; }

}  // namespace small_tree
}  // namespace dynconn
