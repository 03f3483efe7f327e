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

#include <algorithm>
#include <cassert>

namespace dynconn {

ClusterForest::ClusterForest(const Params& params, Variant variant, Counters* counters)
    : params_(params),
      variant_(variant),
      counters_(counters),
      arena_(static_cast<std::uint32_t>(params.n)) {
  arena_.set_counters(counters_);
}

NodeId ClusterForest::cparent(NodeId x) const {
  NodeId y = arena_[x].parent;
  while (y != kNoNode && !is_cnode(arena_[y].kind)) y = arena_[y].parent;
  return y;
}

NodeId ClusterForest::root_of(NodeId x) const {
  while (arena_[x].parent != kNoNode) x = arena_[x].parent;
  return x;
}

std::uint32_t ClusterForest::child_count(NodeId u) const {
  if (!is_cluster(u)) return 0;
  const LocalTree& t = local(u);
  return t.heavy_count + t.light_count;
}

std::vector<NodeId> ClusterForest::children(NodeId u) const {
  std::vector<NodeId> out;
  if (!is_cluster(u)) return out;
  heavy_leaves(u, out);
  light_leaves(u, out);
  return out;
}

std::vector<NodeId> ClusterForest::take_rank_changed() {
  std::vector<NodeId> out;
  out.swap(rank_changed_);
  return out;
}

void ClusterForest::set_rank(NodeId x, int rank) {
  Node& node = arena_[x];
  if (node.rank == rank) return;
  node.rank = rank;
  arena_.touch(x);
  rank_changed_.push_back(x);
}

void ClusterForest::set_size(NodeId u, std::uint64_t size) {
  arena_[u].size = size;
  set_rank(u, size == 0 ? 0 : floor_log2(size));
}

NodeId ClusterForest::new_cluster(Level level) {
  const NodeId u = arena_.create(NodeKind::kCluster);
  arena_[u].level = level;
  std::uint32_t slot;
  if (!free_locals_.empty()) {
    slot = free_locals_.back();
    free_locals_.pop_back();
  } else {
    slot = static_cast<std::uint32_t>(locals_.size());
    locals_.emplace_back();
  }
  locals_[slot] = LocalTree{};
  locals_[slot].in_use = true;
  arena_[u].cluster = slot;
  return u;
}

void ClusterForest::destroy_cluster(NodeId u) {
  detach_layout(u);
  const std::uint32_t slot = arena_[u].cluster;
  assert(locals_[slot].heavy_count == 0 && locals_[slot].light_count == 0);
  locals_[slot] = LocalTree{};
  free_locals_.push_back(slot);
  arena_.destroy(u);
}

void ClusterForest::make_root(NodeId x) {
  Node& node = arena_[x];
  node.slot = ChildSlot::kNone;
  node.bottom = kNoNode;
  if (node.level != 0) {
    node.level = 0;
    arena_.touch(x);
  }
}

NodeId ClusterForest::make_rank_node(NodeKind kind, int rank, bool light, Level tag) {
  const NodeId x = arena_.create(kind);
  Node& node = arena_[x];
  node.rank = rank;
  node.light = light;
  node.heavy_tag = light ? -1 : tag;
  if (counters_ != nullptr) {
    ++counters_->rank_nodes_created;
    if (light) ++counters_->light_rank_nodes_created;
  }
  return x;
}

void ClusterForest::destroy_rank_node(NodeId x) {
  if (counters_ != nullptr) {
    ++counters_->rank_nodes_deleted;
    if (arena_[x].light) ++counters_->light_rank_nodes_deleted;
  }
  arena_.destroy(x);
}

// ---- heavy rank forest -------------------------------------------------

void ClusterForest::heavy_insert_root(NodeId u, NodeId x) {
  LocalTree& t = lt(u);
  for (;;) {
    auto it = t.heavy_roots.find(arena_[x].rank);
    if (it == t.heavy_roots.end()) break;
    const NodeId y = it->second;
    t.heavy_roots.erase(it);
    const NodeId z =
        make_rank_node(NodeKind::kRankTree, arena_[x].rank + 1, false, arena_[u].level);
    arena_.attach_at(z, 0, std::min(x, y));
    arena_.attach_at(z, 1, std::max(x, y));
    x = z;
  }
  t.heavy_roots.emplace(arena_[x].rank, x);
}

void ClusterForest::heavy_add(NodeId u, NodeId c) {
  arena_[c].slot = ChildSlot::kHeavy;
  arena_[c].bottom = kNoNode;
  ++lt(u).heavy_count;
  heavy_insert_root(u, c);
}

// Deletes the rank nodes above c and re-pairs the subtrees they held.
void ClusterForest::heavy_remove(NodeId u, NodeId c) {
  std::vector<NodeId> chain;
  std::vector<NodeId> freed;
  NodeId cur = c;
  while (arena_[cur].parent != kNoNode) {
    const NodeId par = arena_[cur].parent;
    const Node& pn = arena_[par];
    freed.push_back(pn.child[0] == cur ? pn.child[1] : pn.child[0]);
    chain.push_back(par);
    cur = par;
  }
  LocalTree& t = lt(u);
  auto it = t.heavy_roots.find(arena_[cur].rank);
  assert(it != t.heavy_roots.end() && it->second == cur);
  t.heavy_roots.erase(it);
  for (NodeId x : chain) destroy_rank_node(x);
  --t.heavy_count;
  arena_[c].slot = ChildSlot::kNone;
  for (NodeId f : freed) {
    if (f != kNoNode) heavy_insert_root(u, f);
  }
}

void ClusterForest::heavy_leaves(NodeId u, std::vector<NodeId>& out) const {
  std::vector<NodeId> stack;
  for (const auto& [rank, root] : local(u).heavy_roots) stack.push_back(root);
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    const Node& node = arena_[x];
    if (is_cnode(node.kind)) {
      out.push_back(x);
      continue;
    }
    for (NodeId c : node.child) {
      if (c != kNoNode) stack.push_back(c);
    }
  }
}

// Drops every heavy rank node; the heavy C-children are left detached.
void ClusterForest::heavy_clear(NodeId u) {
  std::vector<NodeId> stack;
  for (const auto& [rank, root] : lt(u).heavy_roots) stack.push_back(root);
  while (!stack.empty()) {
    const NodeId x = stack.back();
    stack.pop_back();
    Node& node = arena_[x];
    if (is_cnode(node.kind)) {
      arena_.detach(x);
      node.slot = ChildSlot::kNone;
      continue;
    }
    for (NodeId c : node.child) {
      if (c != kNoNode) stack.push_back(c);
    }
  }
  // Children were pushed before their parents were destroyed, so collect the
  // interior rank nodes in a second pass.
  std::vector<NodeId> interiors;
  for (const auto& [rank, root] : lt(u).heavy_roots) {
    if (!is_cnode(arena_[root].kind)) interiors.push_back(root);
  }
  for (std::size_t k = 0; k < interiors.size(); ++k) {
    for (NodeId c : arena_[interiors[k]].child) {
      if (c != kNoNode && !is_cnode(arena_[c].kind)) interiors.push_back(c);
    }
  }
  for (auto it = interiors.rbegin(); it != interiors.rend(); ++it) destroy_rank_node(*it);
  LocalTree& t = lt(u);
  t.heavy_roots.clear();
  t.heavy_count = 0;
}

// Takes L(u) apart to the level of heavy rank-tree roots and the top root.
void ClusterForest::detach_layout(NodeId u) {
  LocalTree& t = lt(u);
  for (NodeId x : t.path) destroy_rank_node(x);
  t.path.clear();
  for (const auto& [rank, root] : t.heavy_roots) arena_.detach(root);
  if (t.top != kNoNode) arena_.detach(t.top);
  assert(arena_[u].child[0] == kNoNode);
}

// Hangs the heavy roots off a rank path and places the top tree. With no
// light children (or in the simple variant) u itself is the first path node.
void ClusterForest::layout(NodeId u) {
  LocalTree& t = lt(u);
  assert(t.path.empty());
  std::vector<NodeId> roots;
  for (auto it = t.heavy_roots.rbegin(); it != t.heavy_roots.rend(); ++it) {
    roots.push_back(it->second);
  }
  const Level tag = arena_[u].level;
  NodeId anchor = u;
  if (!roots.empty() && t.top != kNoNode) {
    if (roots.size() == 1) {
      arena_.attach_at(u, 0, roots[0]);
      anchor = kNoNode;
    } else {
      anchor = make_rank_node(NodeKind::kRankPath, arena_[roots[0]].rank, false, tag);
      lt(u).path.push_back(anchor);
      arena_.attach_at(u, 0, anchor);
    }
  }
  if (anchor != kNoNode && !roots.empty()) {
    if (roots.size() == 1) {
      arena_.attach_at(anchor, 0, roots[0]);
    } else {
      NodeId at = anchor;
      for (std::size_t j = 0; j + 1 < roots.size(); ++j) {
        arena_.attach_at(at, 0, roots[j]);
        if (j + 2 == roots.size()) {
          arena_.attach_at(at, 1, roots[j + 1]);
        } else {
          const NodeId next =
              make_rank_node(NodeKind::kRankPath, arena_[roots[j + 1]].rank, false, tag);
          lt(u).path.push_back(next);
          arena_.attach_at(at, 1, next);
          at = next;
        }
      }
    }
  }
  LocalTree& t2 = lt(u);
  if (t2.top != kNoNode) arena_.attach_at(u, arena_[u].child[0] == kNoNode ? 0 : 1, t2.top);
}

// ---- membership -------------------------------------------------------

void ClusterForest::link(NodeId p, NodeId c) {
  Node& node = arena_[c];
  assert(node.parent == kNoNode);
  const Level want = arena_[p].level + 1;
  if (node.kind == NodeKind::kLeaf) {
    if (node.level != want) {
      node.level = want;
      arena_.touch(c);
    }
  } else if (node.level != want) {
    throw ConnectivityError(ErrorCode::kLevelMismatch, "child level must be parent level + 1");
  }
  const std::uint64_t size = node.size;
  detach_layout(p);
  if (!lazy() || params_.is_heavy(size, arena_[p].size)) {
    heavy_add(p, c);
  } else {
    light_add(p, c);
  }
  layout(p);
}

void ClusterForest::unlink(NodeId p, NodeId c) {
  detach_layout(p);
  if (arena_[c].slot == ChildSlot::kHeavy) {
    heavy_remove(p, c);
  } else {
    light_remove(p, c);
  }
  layout(p);
}

void ClusterForest::reclassify(NodeId u, std::uint64_t old_size) {
  if (!lazy()) return;
  const std::uint64_t now = arena_[u].size;
  if (now == old_size) return;
  detach_layout(u);
  if (now > old_size) {
    std::vector<NodeId> heavy;
    heavy_leaves(u, heavy);
    for (NodeId c : heavy) {
      if (params_.is_heavy(arena_[c].size, now)) continue;
      heavy_remove(u, c);
      light_add(u, c);
    }
  } else {
    std::vector<NodeId> up;
    collect_newly_heavy(u, params_.heavy_threshold(now), up);
    for (NodeId c : up) {
      light_remove(u, c);
      heavy_add(u, c);
      if (counters_ != nullptr) ++counters_->heavy_promotions;
    }
  }
  layout(u);
}

void ClusterForest::reposition(NodeId u) {
  const NodeId q = cparent(u);
  if (q == kNoNode) return;
  unlink(q, u);
  link(q, u);
}

void ClusterForest::adjust_sizes_upward(NodeId p, std::int64_t delta, NodeId child) {
  NodeId x = p;
  NodeId prev = child;
  while (x != kNoNode) {
    const NodeId par = cparent(x);
    if (par != kNoNode) unlink(par, x);
    const std::uint64_t old = arena_[x].size;
    set_size(x, static_cast<std::uint64_t>(static_cast<std::int64_t>(old) + delta));
    if (arena_[x].size > params_.level_capacity(arena_[x].level)) {
      throw ConnectivityError(ErrorCode::kInvariantViolation, "cluster exceeds n/2^level");
    }
    reclassify(x, old);
    if (prev != kNoNode) link(x, prev);
    prev = x;
    x = par;
  }
}

void ClusterForest::detach_child(NodeId p, NodeId w) {
  if (!is_cluster(p) || cparent(w) != p) {
    throw ConnectivityError(ErrorCode::kNotAChild, "node is not a child of p");
  }
  unlink(p, w);
  if (arena_[w].kind == NodeKind::kLeaf) make_root(w);
  adjust_sizes_upward(p, -static_cast<std::int64_t>(arena_[w].size), kNoNode);
}

void ClusterForest::attach_child(NodeId p, NodeId w) {
  if (arena_[w].kind == NodeKind::kCluster && arena_[w].level != arena_[p].level + 1) {
    throw ConnectivityError(ErrorCode::kLevelMismatch, "child level must be parent level + 1");
  }
  adjust_sizes_upward(p, static_cast<std::int64_t>(arena_[w].size), w);
}

// ---- merge and split --------------------------------------------------

NodeId ClusterForest::merge_cnodes(NodeId a, NodeId b) {
  if (a == b || arena_[a].level != arena_[b].level || cparent(a) != cparent(b)) {
    throw ConnectivityError(ErrorCode::kLevelMismatch, "merge needs two siblings of equal level");
  }
  const NodeId q = cparent(a);
  if (q != kNoNode) {
    unlink(q, a);
    unlink(q, b);
  }
  NodeId survivor;
  const bool a_leaf = arena_[a].kind == NodeKind::kLeaf;
  const bool b_leaf = arena_[b].kind == NodeKind::kLeaf;
  if (a_leaf && b_leaf) {
    survivor = new_cluster(arena_[a].level);
    set_size(survivor, 2);
    link(survivor, a);
    link(survivor, b);
  } else if (a_leaf || b_leaf) {
    survivor = a_leaf ? b : a;
    const NodeId leaf = a_leaf ? a : b;
    const std::uint64_t old = arena_[survivor].size;
    set_size(survivor, old + 1);
    reclassify(survivor, old);
    link(survivor, leaf);
  } else {
    survivor = a;
    const std::uint64_t old = arena_[a].size;
    set_size(a, old + arena_[b].size);
    detach_layout(a);
    detach_layout(b);
    if (!lazy()) {
      LocalTree& tb = lt(b);
      std::vector<NodeId> roots;
      for (const auto& [rank, root] : tb.heavy_roots) roots.push_back(root);
      const std::uint32_t moved = tb.heavy_count;
      tb.heavy_roots.clear();
      tb.heavy_count = 0;
      lt(a).heavy_count += moved;
      for (NodeId r : roots) heavy_insert_root(a, r);
    } else {
      std::vector<NodeId> heavy;
      heavy_leaves(a, heavy);
      heavy_leaves(b, heavy);
      heavy_clear(a);
      heavy_clear(b);
      light_merge(a, b);
      const std::uint64_t now = arena_[a].size;
      for (NodeId c : heavy) {
        if (params_.is_heavy(arena_[c].size, now)) {
          heavy_add(a, c);
        } else {
          light_add(a, c);
        }
      }
    }
    layout(a);
    destroy_cluster(b);
  }
  if (q != kNoNode) {
    link(q, survivor);
  } else {
    make_root(survivor);
  }
  if (counters_ != nullptr) ++counters_->merges;
  return survivor;
}

NodeId ClusterForest::split_to_new_parent(NodeId w, NodeId* p_out) {
  const NodeId p = cparent(w);
  if (p == kNoNode) throw ConnectivityError(ErrorCode::kNotAChild, "node has no parent");
  const NodeId q = cparent(p);
  if (q != kNoNode) unlink(q, p);
  unlink(p, w);
  const std::uint64_t old = arena_[p].size;
  set_size(p, old - arena_[w].size);
  reclassify(p, old);

  NodeId fresh = w;
  if (arena_[w].kind != NodeKind::kLeaf) {
    fresh = new_cluster(arena_[p].level);
    set_size(fresh, arena_[w].size);
    link(fresh, w);
  }
  NodeId kept = p;
  if (child_count(p) == 1) {
    const std::vector<NodeId> only = children(p);
    if (arena_[only[0]].kind == NodeKind::kLeaf) {
      unlink(p, only[0]);
      destroy_cluster(p);
      kept = only[0];
    }
  }
  if (q != kNoNode) {
    link(q, kept);
    link(q, fresh);
  } else {
    make_root(kept);
    make_root(fresh);
  }
  if (counters_ != nullptr) ++counters_->splits;
  if (p_out != nullptr) *p_out = kept;
  return fresh;
}

void ClusterForest::rebuild_local_tree(NodeId u) {
  std::vector<NodeId> kids = children(u);
  detach_layout(u);
  for (NodeId c : kids) {
    if (arena_[c].slot == ChildSlot::kHeavy) {
      heavy_remove(u, c);
    } else {
      light_remove(u, c);
    }
  }
  layout(u);
  std::sort(kids.begin(), kids.end());
  for (NodeId c : kids) link(u, c);
}

// ---- bitmaps (simple variant keeps them on every node) -----------------

void ClusterForest::refresh_bitmaps(NodeId x) {
  NodeId y = arena_[x].kind == NodeKind::kLeaf ? arena_[x].parent : x;
  while (y != kNoNode) {
    Node& node = arena_[y];
    LevelBitmap bits = 0;
    for (NodeId c : node.child) {
      if (c != kNoNode) bits |= arena_[c].edge_bits;
    }
    if (bits == node.edge_bits) break;
    node.edge_bits = bits;
    y = node.parent;
  }
}

void ClusterForest::refresh_bitmaps_touched(const std::vector<NodeId>& touched) {
  for (NodeId x : touched) {
    if (arena_[x].alive && arena_[x].kind != NodeKind::kLeaf) refresh_bitmaps(x);
  }
}

}  // namespace dynconn
