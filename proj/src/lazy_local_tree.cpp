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

// Light trees: buffer, bottom and top trees of a cluster's lazy local tree.
// All entry points run while L(u) is taken apart by detach_layout.

#include <algorithm>
#include <cassert>

#include "dynconn/cluster_forest.hpp"
#include "dynconn/small_tree.hpp"

namespace dynconn {

using small_tree::rank_key;
using small_tree::size_key;

namespace {

constexpr std::uint64_t kIdMask = 0xffffffffULL;

int max_leaf_rank(const NodeArena& arena, NodeId bottom_root) {
  const std::uint64_t size = small_tree::key_high(small_tree::max_key(arena, bottom_root));
  return floor_log2(std::max<std::uint64_t>(size, 1));
}

}  // namespace

NodeId ClusterForest::ensure_top(NodeId u) {
  LocalTree& t = lt(u);
  if (t.top == kNoNode) {
    const NodeId top = arena_.create(NodeKind::kTopRoot);
    lt(u).top = top;
  }
  return lt(u).top;
}

void ClusterForest::drop_top_if_empty(NodeId u) {
  LocalTree& t = lt(u);
  if (t.top == kNoNode || t.light_count != 0) return;
  assert(arena_[t.top].child[0] == kNoNode);
  const NodeId top = t.top;
  t.top = kNoNode;
  arena_.destroy(top);
}

void ClusterForest::light_add(NodeId u, NodeId c) {
  ++lt(u).light_count;
  buffer_insert(u, c);
}

void ClusterForest::buffer_insert(NodeId u, NodeId c) {
  const NodeId top = ensure_top(u);
  if (lt(u).buffer == kNoNode) {
    const NodeId buf = arena_.create(NodeKind::kBufferRoot);
    arena_[buf].key = rank_key(-1, buf);
    lt(u).buffer = buf;
    small_tree::insert(arena_, top, buf, TreeFamily::kTop);
  }
  Node& node = arena_[c];
  node.slot = ChildSlot::kBuffer;
  node.bottom = kNoNode;
  node.key = size_key(node.size, c);
  const NodeId buf = lt(u).buffer;
  small_tree::insert(arena_, buf, c, TreeFamily::kBuffer);
  if (counters_ != nullptr) ++counters_->buffer_moves;
  if (small_tree::leaf_count(arena_, buf) > params_.buffer_capacity) buffer_to_bottom(u);
}

void ClusterForest::buffer_to_bottom(NodeId u) {
  const NodeId buf = lt(u).buffer;
  small_tree::remove(arena_, lt(u).top, buf, TreeFamily::kTop);
  lt(u).buffer = kNoNode;
  std::vector<NodeId> stack{buf};
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    Node& node = arena_[x];
    if (node.kind == NodeKind::kBufferRoot || node.kind == NodeKind::kBufferInterior) {
      node.kind = node.kind == NodeKind::kBufferRoot ? NodeKind::kBottomRoot
                                                     : NodeKind::kBottomInterior;
      arena_.touch(x);
      for (NodeId c : node.child) {
        if (c != kNoNode) stack.push_back(c);
      }
    } else {
      node.slot = ChildSlot::kBottom;
      node.bottom = buf;
      arena_.touch(x);
    }
  }
  Node& root = arena_[buf];
  root.initial_leaves = root.leaf_count;
  root.serial = ++bottom_serial_;
  set_rank(buf, max_leaf_rank(arena_, buf));
  if (counters_ != nullptr) ++counters_->bottoms_created;
  top_add_root(u, buf);
}

// Pairs x with equal-rank top leaves until its rank is unique, then inserts it.
void ClusterForest::top_add_root(NodeId u, NodeId x) {
  const NodeId top = ensure_top(u);
  for (;;) {
    const int r = arena_[x].rank;
    const NodeId y = small_tree::find_in_range(arena_, top, TreeFamily::kTop, rank_key(r, 0),
                                               rank_key(r, 0) | kIdMask);
    if (y == kNoNode) break;
    small_tree::remove(arena_, top, y, TreeFamily::kTop);
    const NodeId z = make_rank_node(NodeKind::kRankTree, r + 1, true, -1);
    arena_.attach_at(z, 0, std::min(x, y));
    arena_.attach_at(z, 1, std::max(x, y));
    x = z;
  }
  arena_[x].key = rank_key(arena_[x].rank, x);
  small_tree::insert(arena_, top, x, TreeFamily::kTop);
  if (counters_ != nullptr) ++counters_->top_leaf_moves;
}

void ClusterForest::top_remove_root(NodeId u, NodeId b) {
  std::vector<NodeId> chain;
  std::vector<NodeId> freed;
  NodeId cur = b;
  while (arena_[cur].parent != kNoNode && arena_[arena_[cur].parent].kind == NodeKind::kRankTree) {
    const NodeId par = arena_[cur].parent;
    const Node& pn = arena_[par];
    freed.push_back(pn.child[0] == cur ? pn.child[1] : pn.child[0]);
    chain.push_back(par);
    cur = par;
  }
  small_tree::remove(arena_, lt(u).top, cur, TreeFamily::kTop);
  for (NodeId x : chain) destroy_rank_node(x);
  for (NodeId f : freed) {
    if (f != kNoNode) top_add_root(u, f);
  }
}

void ClusterForest::repair_bottom(NodeId u, NodeId b) {
  const int now = max_leaf_rank(arena_, b);
  if (now >= arena_[b].rank) return;
  if (counters_ != nullptr) ++counters_->bottom_rank_repairs;
  top_remove_root(u, b);
  set_rank(b, now);
  top_add_root(u, b);
}

void ClusterForest::light_remove(NodeId u, NodeId c) {
  Node& node = arena_[c];
  if (node.slot == ChildSlot::kBuffer) {
    const NodeId buf = lt(u).buffer;
    small_tree::remove(arena_, buf, c, TreeFamily::kBuffer);
    if (small_tree::leaf_count(arena_, buf) == 0) {
      small_tree::remove(arena_, lt(u).top, buf, TreeFamily::kTop);
      lt(u).buffer = kNoNode;
      arena_.destroy(buf);
    }
  } else {
    assert(node.slot == ChildSlot::kBottom);
    const NodeId b = node.bottom;
    small_tree::remove(arena_, b, c, TreeFamily::kBottom);
    if (small_tree::leaf_count(arena_, b) == 0) {
      top_remove_root(u, b);
      arena_.destroy(b);
    } else {
      repair_bottom(u, b);
    }
  }
  Node& again = arena_[c];
  again.slot = ChildSlot::kNone;
  again.bottom = kNoNode;
  --lt(u).light_count;
  drop_top_if_empty(u);
}

void ClusterForest::light_leaves(NodeId u, std::vector<NodeId>& out) const {
  const LocalTree& t = local(u);
  if (t.top == kNoNode) return;
  std::vector<NodeId> stack{t.top};
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    const Node& node = arena_[x];
    switch (node.kind) {
      case NodeKind::kBufferRoot:
        small_tree::collect_leaves(arena_, x, TreeFamily::kBuffer, out);
        break;
      case NodeKind::kBottomRoot:
        small_tree::collect_leaves(arena_, x, TreeFamily::kBottom, out);
        break;
      default:
        for (NodeId c : node.child) {
          if (c != kNoNode) stack.push_back(c);
        }
    }
  }
}

// Light children that reach the heavy threshold t. Bottom trees are only
// entered below top leaves and rank nodes whose rank allows such a leaf.
void ClusterForest::collect_newly_heavy(NodeId u, std::uint64_t t,
                                        std::vector<NodeId>& out) const {
  const LocalTree& lt_u = local(u);
  if (lt_u.top == kNoNode) return;
  if (lt_u.buffer != kNoNode) {
    small_tree::collect_at_least(arena_, lt_u.buffer, TreeFamily::kBuffer, size_key(t, 0), out);
  }
  const int r0 = floor_log2(std::max<std::uint64_t>(t, 1));
  std::vector<NodeId> stack;
  small_tree::collect_at_least(arena_, lt_u.top, TreeFamily::kTop, rank_key(r0, 0), stack);
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    const Node& node = arena_[x];
    if (node.rank < r0) continue;
    if (node.kind == NodeKind::kBottomRoot) {
      small_tree::collect_at_least(arena_, x, TreeFamily::kBottom, size_key(t, 0), out);
    } else if (node.kind == NodeKind::kRankTree) {
      for (NodeId c : node.child) {
        if (c != kNoNode) stack.push_back(c);
      }
    }
  }
}

// u absorbs the light tree of v. The smaller buffer and the smaller top tree
// are the ones taken apart.
void ClusterForest::light_merge(NodeId u, NodeId v) {
  if (lt(v).top == kNoNode) return;
  for (NodeId w : {u, v}) {
    if (lt(w).buffer != kNoNode) {
      small_tree::remove(arena_, lt(w).top, lt(w).buffer, TreeFamily::kTop);
    }
  }
  // Top trees.
  if (lt(u).top == kNoNode) {
    lt(u).top = lt(v).top;
  } else {
    NodeId big = lt(u).top;
    NodeId small = lt(v).top;
    if (small_tree::leaf_count(arena_, small) > small_tree::leaf_count(arena_, big)) {
      std::swap(big, small);
    }
    lt(u).top = big;
    std::vector<NodeId> moved;
    small_tree::clear(arena_, small, TreeFamily::kTop, &moved);
    arena_.destroy(small);
    for (NodeId x : moved) top_add_root(u, x);
  }
  lt(v).top = kNoNode;

  // Buffers.
  NodeId bu = lt(u).buffer;
  NodeId bv = lt(v).buffer;
  lt(v).buffer = kNoNode;
  if (bu == kNoNode) {
    bu = bv;
  } else if (bv != kNoNode) {
    if (small_tree::leaf_count(arena_, bv) > small_tree::leaf_count(arena_, bu)) std::swap(bu, bv);
    std::vector<NodeId> moved;
    small_tree::clear(arena_, bv, TreeFamily::kBuffer, &moved);
    arena_.destroy(bv);
    for (NodeId c : moved) {
      small_tree::insert(arena_, bu, c, TreeFamily::kBuffer);
      if (counters_ != nullptr) ++counters_->buffer_moves;
    }
  }
  lt(u).buffer = bu;
  lt(u).light_count += lt(v).light_count;
  lt(v).light_count = 0;
  if (bu != kNoNode) {
    arena_[bu].key = rank_key(-1, bu);
    small_tree::insert(arena_, lt(u).top, bu, TreeFamily::kTop);
    if (small_tree::leaf_count(arena_, bu) > params_.buffer_capacity) buffer_to_bottom(u);
  }
}

}  // namespace dynconn
