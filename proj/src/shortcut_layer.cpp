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

#include "dynconn/shortcut_layer.hpp"

#include <algorithm>

namespace dynconn {

ShortcutLayer::ShortcutLayer(ClusterForest& forest, Counters* counters)
    : forest_(forest), arena_(forest.arena()), counters_(counters),
      s_(forest.params().black_spacing) {}

void ShortcutLayer::next_epoch() {
  if (seen_.size() < arena_.capacity()) seen_.resize(arena_.capacity() * 2, 0);
  ++seen_epoch_;
}

bool ShortcutLayer::mark(NodeId x) {
  if (seen_[x] == seen_epoch_) return false;
  seen_[x] = seen_epoch_;
  return true;
}

NodeId ShortcutLayer::rank_parent(NodeId x) const {
  for (NodeId y = arena_[x].parent; y != kNoNode; y = arena_[y].parent) {
    if (is_rank_kind(arena_[y].kind)) return y;
  }
  return kNoNode;
}

NodeId ShortcutLayer::black_ancestor(NodeId x) const {
  for (NodeId y = arena_[x].parent; y != kNoNode; y = arena_[y].parent) {
    if (arena_[y].is_black()) return y;
  }
  return kNoNode;
}

std::uint8_t ShortcutLayer::classify_color(NodeId x) const {
  const Node& node = arena_[x];
  std::uint8_t types = 0;
  if (is_cnode(node.kind) && node.level % s_ == 0) types |= kBlackLevel;
  if (is_rank_kind(node.kind)) {
    const NodeId y = rank_parent(x);
    if (y != kNoNode) {
      const int top = arena_[y].rank - 1;
      if (top >= node.rank && node.rank >= 0 && (top / s_) * s_ >= node.rank) types |= kBlackRank;
    }
  }
  if (node.kind == NodeKind::kLeaf ||
      (is_cnode(node.kind) && (node.slot == ChildSlot::kBuffer || node.slot == ChildSlot::kBottom)) ||
      (node.parent != kNoNode && is_top_kind(arena_[node.parent].kind))) {
    types |= kBlackLeaf;
  }
  if (is_small_tree_interior(node.kind) && node.tree_depth % s_ == 0) types |= kBlackDepth;
  return types;
}

void ShortcutLayer::rank_descendants(NodeId x, std::vector<NodeId>& out) const {
  std::vector<NodeId> stack{x};
  while (!stack.empty()) {
    const NodeId y = stack.back();
    stack.pop_back();
    for (NodeId c : arena_[y].child) {
      if (c == kNoNode) continue;
      const NodeKind k = arena_[c].kind;
      if (is_rank_kind(k)) {
        out.push_back(c);
      } else if (!is_buffer_kind(k)) {
        stack.push_back(c);
      }
    }
  }
}

void ShortcutLayer::set_bip(NodeId x, NodeId parent) {
  Node& node = arena_[x];
  if (node.bip == parent) return;
  if (node.bip != kNoNode && arena_[node.bip].alive) {
    auto& list = arena_[node.bip].bic;
    list.erase(std::remove(list.begin(), list.end(), x), list.end());
  }
  node.bip = parent;
  if (parent != kNoNode && counters_ != nullptr) ++counters_->standard_links_set;
}

void ShortcutLayer::drop_links(NodeId x, std::vector<NodeId>& dirty) {
  Node& node = arena_[x];
  if (node.bip != kNoNode) {
    if (arena_[node.bip].alive) dirty.push_back(node.bip);
    set_bip(x, kNoNode);
  }
  for (NodeId c : node.bic) {
    if (arena_[c].bip == x) arena_[c].bip = kNoNode;
  }
  node.bic.clear();
  node.edge_bits = 0;
}

void ShortcutLayer::relink_region(NodeId b, std::vector<NodeId>& dirty) {
  std::vector<NodeId> frontier;
  std::vector<NodeId> stack;
  auto push_children = [&](NodeId y) {
    const Node& node = arena_[y];
    if (node.child[1] != kNoNode) stack.push_back(node.child[1]);
    if (node.child[0] != kNoNode) stack.push_back(node.child[0]);
  };
  push_children(b);
  while (!stack.empty()) {
    const NodeId y = stack.back();
    stack.pop_back();
    if (arena_[y].is_black()) {
      frontier.push_back(y);
    } else {
      push_children(y);
    }
  }
  for (NodeId f : frontier) {
    const NodeId old = arena_[f].bip;
    if (old == b) continue;
    if (old != kNoNode && old < arena_.capacity() && arena_[old].alive) dirty.push_back(old);
    set_bip(f, kNoNode);
    arena_[f].bip = b;
    if (counters_ != nullptr) ++counters_->standard_links_set;
  }
  for (NodeId c : arena_[b].bic) {
    if (arena_[c].bip == b && std::find(frontier.begin(), frontier.end(), c) == frontier.end()) {
      arena_[c].bip = kNoNode;
    }
  }
  arena_[b].bic = std::move(frontier);
}

void ShortcutLayer::propagate_bits(NodeId b, std::vector<NodeId>* changed) {
  for (NodeId y = b; y != kNoNode;) {
    Node& node = arena_[y];
    if (!node.alive || !node.is_black()) break;
    if (node.kind != NodeKind::kLeaf) {
      LevelBitmap bits = 0;
      for (NodeId c : node.bic) bits |= arena_[c].edge_bits;
      if (bits == node.edge_bits) break;
      node.edge_bits = bits;
      if (changed != nullptr) changed->push_back(y);
    }
    y = node.bip;
  }
}

void ShortcutLayer::repair(const std::vector<NodeId>& touched,
                           const std::vector<NodeId>& rank_changed, RepairLog& log) {
  next_epoch();
  std::vector<NodeId> raw;
  for (NodeId x : touched) {
    if (!arena_[x].alive) continue;
    raw.push_back(x);
    if (is_top_kind(arena_[x].kind)) rank_descendants(x, raw);
  }
  for (NodeId x : rank_changed) {
    if (!arena_[x].alive) continue;
    raw.push_back(x);
    rank_descendants(x, raw);
  }
  for (NodeId x : raw) {
    if (!mark(x)) continue;
    log.candidates.push_back(x);
    const std::uint8_t types = classify_color(x);
    if (types != arena_[x].black_types) {
      arena_[x].black_types = types;
      log.color_changed.push_back(x);
    }
  }

  next_epoch();
  std::vector<NodeId> regions;
  std::vector<NodeId> dirty;
  auto add_region = [&](NodeId b) {
    if (b != kNoNode && mark(b)) regions.push_back(b);
  };
  auto visit = [&](NodeId x) {
    if (!arena_[x].alive) return;
    if (arena_[x].is_black()) {
      add_region(x);
      dirty.push_back(x);
    } else {
      drop_links(x, dirty);
    }
    add_region(black_ancestor(x));
  };
  for (NodeId x : touched) visit(x);
  for (NodeId x : log.color_changed) visit(x);
  for (NodeId b : pending_) {
    if (arena_[b].alive && arena_[b].is_black()) {
      add_region(b);
      dirty.push_back(b);
    }
  }
  pending_.clear();
  for (NodeId b : regions) relink_region(b, dirty);
  for (NodeId b : regions) dirty.push_back(b);
  for (NodeId d : dirty) propagate_bits(d, &log.bits_changed);
}

NodeId ShortcutLayer::ancestor_at_level(NodeId v, Level i, std::uint64_t* touched) const {
  std::uint64_t steps = 0;
  NodeId x = v;
  for (;;) {
    ++steps;
    const Node& node = arena_[x];
    if (is_cnode(node.kind) && node.level <= i) break;
    NodeId next = node.parent;
    if (node.is_black() && node.bip != kNoNode) {
      const Node& b = arena_[node.bip];
      bool ok;
      if (is_cnode(b.kind)) {
        ok = b.level >= i;
      } else if (b.heavy_tag >= 0) {
        ok = b.heavy_tag >= i;
      } else {
        ok = true;
      }
      if (ok) next = node.bip;
    }
    if (next == kNoNode) {
      if (touched != nullptr) *touched += steps;
      throw ConnectivityError(ErrorCode::kNoSuchAncestor, "no ancestor at requested level");
    }
    x = next;
  }
  if (touched != nullptr) *touched += steps;
  return x;
}

void ShortcutLayer::on_destroy(NodeId x) {
  Node& node = arena_[x];
  if (node.bip != kNoNode && arena_[node.bip].alive) {
    auto& list = arena_[node.bip].bic;
    list.erase(std::remove(list.begin(), list.end(), x), list.end());
    pending_.push_back(node.bip);
  }
  node.bip = kNoNode;
  for (NodeId c : node.bic) {
    if (arena_[c].bip == x) arena_[c].bip = kNoNode;
  }
  node.bic.clear();
}

}  // namespace dynconn
