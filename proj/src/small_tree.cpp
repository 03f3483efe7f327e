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

#include "dynconn/small_tree.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace dynconn::small_tree {
namespace {

NodeKind interior_kind(TreeFamily family) {
  switch (family) {
    case TreeFamily::kBuffer: return NodeKind::kBufferInterior;
    case TreeFamily::kBottom: return NodeKind::kBottomInterior;
    case TreeFamily::kTop: return NodeKind::kTopInterior;
  }
  return NodeKind::kTopInterior;
}

// Recomputes leaf_count / min_key / max_key of y from its children.
void augment(NodeArena& arena, NodeId y, TreeFamily family) {
  Node& node = arena[y];
  std::uint32_t count = 0;
  std::uint64_t lo = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t hi = 0;
  for (NodeId c : node.child) {
    if (c == kNoNode) continue;
    const Node& child = arena[c];
    if (is_interior(child, family)) {
      if (child.leaf_count == 0) continue;
      count += child.leaf_count;
      lo = std::min(lo, child.min_key);
      hi = std::max(hi, child.max_key);
    } else {
      ++count;
      lo = std::min(lo, child.key);
      hi = std::max(hi, child.key);
    }
  }
  node.leaf_count = count;
  node.min_key = count == 0 ? 0 : lo;
  node.max_key = hi;
}

std::uint32_t weight(const NodeArena& arena, NodeId c, TreeFamily family) {
  if (c == kNoNode) return 0;
  return is_interior(arena[c], family) ? arena[c].leaf_count : 1;
}

std::uint64_t min_of(const NodeArena& arena, NodeId c, TreeFamily family) {
  return is_interior(arena[c], family) ? arena[c].min_key : arena[c].key;
}

NodeId build(NodeArena& arena, const std::vector<NodeId>& leaves, std::size_t lo, std::size_t hi,
             int depth, TreeFamily family) {
  if (hi - lo == 1) return leaves[lo];
  const NodeId m = arena.create(interior_kind(family));
  arena[m].tree_depth = depth;
  const std::size_t mid = lo + (hi - lo) / 2;
  arena.attach_at(m, 0, build(arena, leaves, lo, mid, depth + 1, family));
  arena.attach_at(m, 1, build(arena, leaves, mid, hi, depth + 1, family));
  augment(arena, m, family);
  return m;
}

void fill(NodeArena& arena, NodeId y, const std::vector<NodeId>& leaves, TreeFamily family) {
  const int depth = arena[y].tree_depth;
  if (leaves.size() == 1) {
    arena.attach_at(y, 0, leaves[0]);
  } else if (leaves.size() > 1) {
    const std::size_t mid = leaves.size() / 2;
    arena.attach_at(y, 0, build(arena, leaves, 0, mid, depth + 1, family));
    arena.attach_at(y, 1, build(arena, leaves, mid, leaves.size(), depth + 1, family));
  }
  augment(arena, y, family);
}

void fix_upward(NodeArena& arena, NodeId from, NodeId root, TreeFamily family) {
  for (NodeId y = from;; y = arena[y].parent) {
    augment(arena, y, family);
    if (y == root) break;
  }
}

}  // namespace

bool is_interior(const Node& node, TreeFamily family) {
  switch (family) {
    case TreeFamily::kBuffer: return is_buffer_kind(node.kind);
    case TreeFamily::kBottom: return is_bottom_kind(node.kind);
    case TreeFamily::kTop: return is_top_kind(node.kind);
  }
  return false;
}

void collect_leaves(const NodeArena& arena, NodeId root, TreeFamily family,
                    std::vector<NodeId>& out) {
  collect_at_least(arena, root, family, 0, out);
}

void collect_at_least(const NodeArena& arena, NodeId root, TreeFamily family,
                      std::uint64_t min_key, std::vector<NodeId>& out) {
  // Explicit stack, right child pushed first so leaves come out in order.
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    const NodeId y = stack.back();
    stack.pop_back();
    const Node& node = arena[y];
    if (!is_interior(node, family)) {
      if (node.key >= min_key) out.push_back(y);
      continue;
    }
    if (node.leaf_count == 0 || node.max_key < min_key) continue;
    if (node.child[1] != kNoNode) stack.push_back(node.child[1]);
    if (node.child[0] != kNoNode) stack.push_back(node.child[0]);
  }
}

NodeId find_in_range(const NodeArena& arena, NodeId root, TreeFamily family, std::uint64_t lo,
                     std::uint64_t hi) {
  std::vector<NodeId> stack{root};
  while (!stack.empty()) {
    const NodeId y = stack.back();
    stack.pop_back();
    const Node& node = arena[y];
    if (!is_interior(node, family)) {
      if (node.key >= lo && node.key <= hi) return y;
      continue;
    }
    if (node.leaf_count == 0 || node.max_key < lo || node.min_key > hi) continue;
    for (NodeId c : node.child) {
      if (c != kNoNode) stack.push_back(c);
    }
  }
  return kNoNode;
}

void insert(NodeArena& arena, NodeId root, NodeId leaf, TreeFamily family) {
  const std::uint64_t key = arena[leaf].key;
  NodeId y = root;
  for (;;) {
    Node& node = arena[y];
    if (node.child[0] == kNoNode) {
      arena.attach_at(y, 0, leaf);
      break;
    }
    if (node.child[1] == kNoNode) {
      const NodeId only = node.child[0];
      if (!is_interior(arena[only], family)) {
        arena.attach_at(y, key < arena[only].key ? 0 : 1, leaf);
        break;
      }
      y = only;
      continue;
    }
    const int side = key < min_of(arena, node.child[1], family) ? 0 : 1;
    const NodeId next = node.child[side];
    if (is_interior(arena[next], family)) {
      y = next;
      continue;
    }
    const int depth = node.tree_depth + 1;
    const NodeId m = arena.create(interior_kind(family));
    arena[m].tree_depth = depth;
    arena.detach(next);
    arena.attach_at(y, side, m);
    const bool leaf_first = key < arena[next].key;
    arena.attach_at(m, 0, leaf_first ? leaf : next);
    arena.attach_at(m, 1, leaf_first ? next : leaf);
    y = m;
    break;
  }

  // Refresh augmentation and find the highest unbalanced ancestor.
  NodeId scapegoat = kNoNode;
  for (NodeId z = y;; z = arena[z].parent) {
    augment(arena, z, family);
    const Node& node = arena[z];
    const std::uint32_t heavier = std::max(weight(arena, node.child[0], family),
                                           weight(arena, node.child[1], family));
    if (node.leaf_count >= 4 && 4 * heavier > 3 * node.leaf_count) scapegoat = z;
    if (z == root) break;
  }
  if (scapegoat != kNoNode) {
    rebuild(arena, scapegoat, family);
    if (scapegoat != root) fix_upward(arena, arena[scapegoat].parent, root, family);
  }
}

void remove(NodeArena& arena, NodeId root, NodeId leaf, TreeFamily family) {
  NodeId y = arena[leaf].parent;
  assert(y != kNoNode);
  arena.detach(leaf);
  while (y != root && arena[y].child[0] == kNoNode) {
    const NodeId up = arena[y].parent;
    arena.destroy(y);
    y = up;
  }
  fix_upward(arena, y, root, family);
  Node& r = arena[root];
  ++r.removed_since_rebuild;
  if (r.removed_since_rebuild >= std::max<std::uint32_t>(8, r.leaf_count)) rebuild(arena, root, family);
}

void clear(NodeArena& arena, NodeId root, TreeFamily family, std::vector<NodeId>* leaves) {
  std::vector<NodeId> stack;
  for (NodeId c : arena[root].child) {
    if (c != kNoNode) stack.push_back(c);
  }
  std::vector<NodeId> interiors;
  std::vector<NodeId> found;
  while (!stack.empty()) {
    const NodeId y = stack.back();
    stack.pop_back();
    if (!is_interior(arena[y], family)) {
      found.push_back(y);
      continue;
    }
    interiors.push_back(y);
    for (NodeId c : arena[y].child) {
      if (c != kNoNode) stack.push_back(c);
    }
  }
  for (NodeId leaf : found) arena.detach(leaf);
  for (NodeId y : interiors) arena.destroy(y);
  while (arena[root].child[0] != kNoNode) arena.detach(arena[root].child[0]);
  arena[root].leaf_count = 0;
  arena[root].min_key = 0;
  arena[root].max_key = 0;
  arena[root].removed_since_rebuild = 0;
  if (leaves != nullptr) {
    std::sort(found.begin(), found.end(),
              [&](NodeId a, NodeId b) { return arena[a].key < arena[b].key; });
    *leaves = std::move(found);
  }
}

void rebuild(NodeArena& arena, NodeId subtree_root, TreeFamily family) {
  std::vector<NodeId> leaves;
  clear(arena, subtree_root, family, &leaves);
  fill(arena, subtree_root, leaves, family);
}

}  // namespace dynconn::small_tree
