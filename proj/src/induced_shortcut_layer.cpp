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

#include <algorithm>
#include <array>
#include <bit>

namespace dynconn {

InducedShortcutLayer::InducedShortcutLayer(ClusterForest& forest, ShortcutLayer& standard,
                                           Counters* counters)
    : forest_(forest), arena_(forest.arena()), standard_(standard), counters_(counters),
      levels_(forest.params().max_level + 1) {}

std::uint8_t InducedShortcutLayer::classify_special(NodeId x) const {
  const Node& node = arena_[x];
  const int big = forest_.params().special_spacing;
  std::uint8_t types = 0;
  if (is_cnode(node.kind) && node.level % big == 0) types |= kSpecialLevel;
  if (node.kind == NodeKind::kLeaf) types |= kSpecialLeaf;
  const bool light_rank = (node.kind == NodeKind::kRankTree && node.light) ||
                          node.kind == NodeKind::kBottomRoot;
  if (light_rank && node.rank >= 0 && node.rank % big == 0) types |= kSpecialRank;
  return types;
}

NodeId InducedShortcutLayer::special_parent(NodeId u) const {
  for (NodeId y = arena_[u].parent; y != kNoNode; y = arena_[y].parent) {
    if (arena_[y].is_special()) return y;
  }
  return kNoNode;
}

NodeId InducedShortcutLayer::special_ancestor_or_self(NodeId x) const {
  return arena_[x].is_special() ? x : special_parent(x);
}

InducedLink* InducedShortcutLayer::find(NodeId x, Level i) {
  for (InducedLink& l : arena_[x].induced) {
    if (l.level == i) return &l;
  }
  return nullptr;
}

const InducedLink* InducedShortcutLayer::find(NodeId x, Level i) const {
  for (const InducedLink& l : arena_[x].induced) {
    if (l.level == i) return &l;
  }
  return nullptr;
}

InducedLink& InducedShortcutLayer::get(NodeId x, Level i) {
  auto& links = arena_[x].induced;
  auto it = std::lower_bound(links.begin(), links.end(), i,
                             [](const InducedLink& l, Level lv) { return l.level < lv; });
  if (it == links.end() || it->level != i) it = links.insert(it, InducedLink{i, kNoNode, kNoNode});
  return *it;
}

void InducedShortcutLayer::prune(NodeId x) {
  auto& links = arena_[x].induced;
  links.erase(std::remove_if(links.begin(), links.end(),
                             [](const InducedLink& l) {
                               return l.down == kNoNode && l.up == kNoNode;
                             }),
              links.end());
}

NodeId InducedShortcutLayer::down(NodeId u, Level i) const {
  const InducedLink* l = find(u, i);
  return l == nullptr ? kNoNode : l->down;
}

NodeId InducedShortcutLayer::up(NodeId w, Level i) const {
  const InducedLink* l = find(w, i);
  return l == nullptr ? kNoNode : l->up;
}

void InducedShortcutLayer::clear_down(NodeId u, Level i) {
  InducedLink* l = find(u, i);
  if (l == nullptr || l->down == kNoNode) return;
  const NodeId w = l->down;
  l->down = kNoNode;
  arena_[u].induced_bits &= ~level_bit(i);
  prune(u);
  if (InducedLink* wl = find(w, i); wl != nullptr && wl->up == u) {
    wl->up = kNoNode;
    prune(w);
  }
  if (counters_ != nullptr) ++counters_->shortcuts_deleted;
}

void InducedShortcutLayer::set_down(NodeId u, Level i, NodeId w) {
  if (down(u, i) == w) return;
  clear_down(u, i);
  if (w == kNoNode) return;
  const NodeId stale = up(w, i);
  if (stale != kNoNode) clear_down(stale, i);
  get(w, i).up = u;
  get(u, i).down = w;
  arena_[u].induced_bits |= level_bit(i);
  if (counters_ != nullptr) ++counters_->shortcuts_created;
}

LevelBitmap InducedShortcutLayer::shortcuts_to_special_parent(NodeId u) const {
  const NodeId p = special_parent(u);
  if (p == kNoNode) throw ConnectivityError(ErrorCode::kNoSpecialParent, "no special parent");
  std::vector<NodeId> path;
  for (NodeId y = u; y != p; y = arena_[y].parent) path.push_back(y);
  LevelBitmap others = 0;
  std::vector<NodeId> stack{p};
  while (!stack.empty()) {
    const NodeId y = stack.back();
    stack.pop_back();
    for (NodeId c : arena_[y].child) {
      if (c == kNoNode || c == u) continue;
      if (std::find(path.begin(), path.end(), c) != path.end()) {
        stack.push_back(c);
      } else if (arena_[c].is_black()) {
        others |= arena_[c].edge_bits;
      } else {
        stack.push_back(c);
      }
    }
  }
  return arena_[u].edge_bits & ~others;
}

NodeId InducedShortcutLayer::i_shortcut_to_special_child(NodeId u, Level i) const {
  NodeId cur = u;
  for (;;) {
    NodeId found = kNoNode;
    for (NodeId c : arena_[cur].bic) {
      if (!has_level(arena_[c].edge_bits, i)) continue;
      if (found != kNoNode) return kNoNode;
      found = c;
    }
    if (found == kNoNode || arena_[found].is_special()) return found;
    cur = found;
  }
}

void InducedShortcutLayer::recompute(NodeId u) {
  if (counters_ != nullptr) ++counters_->special_recomputes;
  std::array<int, 64> count{};
  std::array<NodeId, 64> who{};
  LevelBitmap interesting = levels_ >= 64 ? ~LevelBitmap{0} : level_bit(levels_) - 1;
  std::vector<NodeId> stack(arena_[u].bic.rbegin(), arena_[u].bic.rend());
  while (!stack.empty() && interesting != 0) {
    const NodeId y = stack.back();
    stack.pop_back();
    const Node& node = arena_[y];
    const LevelBitmap bits = node.edge_bits & interesting;
    if (bits == 0) continue;
    if (!node.is_special()) {
      stack.insert(stack.end(), node.bic.rbegin(), node.bic.rend());
      continue;
    }
    for (LevelBitmap m = bits; m != 0; m &= m - 1) {
      const int i = std::countr_zero(m);
      if (++count[i] == 1) {
        who[i] = y;
      } else {
        interesting &= ~level_bit(i);
      }
    }
  }
  LevelBitmap target = 0;
  for (Level i = 0; i < levels_; ++i) {
    if (count[i] == 1) target |= level_bit(i);
  }
  for (LevelBitmap m = target | arena_[u].induced_bits; m != 0; m &= m - 1) {
    const int i = std::countr_zero(m);
    set_down(u, i, has_level(target, i) ? who[i] : kNoNode);
  }
}

void InducedShortcutLayer::repair(const RepairLog& log, const std::vector<NodeId>& touched) {
  std::vector<NodeId> dirty;
  for (NodeId x : log.candidates) {
    if (!arena_[x].alive) continue;
    const std::uint8_t types = classify_special(x);
    if (types == arena_[x].special_types) continue;
    arena_[x].special_types = types;
    dirty.push_back(x);
    if (types != 0) continue;
    drop_all(x, dirty);
  }
  auto note = [&](NodeId x) {
    if (x < arena_.capacity() && arena_[x].alive) dirty.push_back(x);
  };
  for (NodeId x : touched) note(x);
  for (NodeId x : log.color_changed) note(x);
  for (NodeId x : log.bits_changed) note(x);
  for (NodeId x : pending_) note(x);
  pending_.clear();

  std::vector<NodeId> work;
  for (NodeId x : dirty) {
    if (!arena_[x].alive) continue;
    if (arena_[x].is_special()) work.push_back(x);
    const NodeId p = special_parent(x);
    if (p != kNoNode) work.push_back(p);
  }
  std::sort(work.begin(), work.end());
  work.erase(std::unique(work.begin(), work.end()), work.end());
  for (NodeId u : work) recompute(u);
}

void InducedShortcutLayer::drop_all(NodeId x, std::vector<NodeId>& parents) {
  const std::vector<InducedLink> links = arena_[x].induced;
  for (const InducedLink& l : links) {
    if (l.down != kNoNode) clear_down(x, l.level);
    if (l.up != kNoNode) {
      clear_down(l.up, l.level);
      parents.push_back(l.up);
    }
  }
  arena_[x].induced.clear();
  arena_[x].induced_bits = 0;
}

void InducedShortcutLayer::on_destroy(NodeId x) { drop_all(x, pending_); }

void InducedShortcutLayer::on_level_arrival(NodeId u, Level i) {
  const LevelBitmap bit = level_bit(i);
  arena_[u].edge_bits |= bit;
  NodeId last = u;
  NodeId y = arena_[u].bip;
  while (y != kNoNode && !(arena_[y].edge_bits & bit)) {
    arena_[y].edge_bits |= bit;
    if (arena_[y].is_special()) {
      set_down(y, i, last);
      last = y;
    }
    y = arena_[y].bip;
  }
  if (y == kNoNode) return;
  // A second special child now carries level i.
  const NodeId s = special_ancestor_or_self(y);
  if (s != kNoNode) clear_down(s, i);
}

void InducedShortcutLayer::on_level_departure(NodeId u, Level i) {
  const LevelBitmap bit = level_bit(i);
  NodeId v = u;
  for (NodeId p = up(v, i); p != kNoNode; p = up(v, i)) {
    clear_down(p, i);
    v = p;
  }
  for (NodeId y = u;; y = arena_[y].bip) {
    arena_[y].edge_bits &= ~bit;
    if (y == v) break;
  }
  NodeId y = arena_[v].bip;
  while (y != kNoNode && !arena_[y].is_special()) {
    LevelBitmap bits = 0;
    for (NodeId c : arena_[y].bic) bits |= arena_[c].edge_bits;
    if (bits & bit) break;
    arena_[y].edge_bits &= ~bit;
    y = arena_[y].bip;
  }
  // The special ancestor w lost one level-i child and may now have a unique one.
  const NodeId w = y == kNoNode ? kNoNode : special_ancestor_or_self(y);
  if (w != kNoNode) set_down(w, i, i_shortcut_to_special_child(w, i));
}

void InducedShortcutLayer::update_on_root_path(const std::vector<NodeId>& path) {
  std::vector<NodeId> specials;
  for (NodeId x : path) {
    if (arena_[x].is_special()) specials.push_back(x);
  }
  for (std::size_t j = 0; j < specials.size(); ++j) {
    const NodeId u = specials[j];
    const LevelBitmap mine = arena_[u].edge_bits;
    LevelBitmap direct = 0;
    LevelBitmap below = 0;
    if (j > 0) {
      direct = shortcuts_to_special_parent(specials[j - 1]);
      below = arena_[specials[j - 1]].edge_bits;
    }
    for (LevelBitmap m = mine | arena_[u].induced_bits; m != 0; m &= m - 1) {
      const int i = std::countr_zero(m);
      NodeId target = kNoNode;
      if (has_level(direct, i)) {
        target = specials[j - 1];
      } else if (has_level(mine, i) && !has_level(below, i)) {
        target = i_shortcut_to_special_child(u, i);
      }
      set_down(u, i, target);
    }
  }
}

LevelBitmap InducedShortcutLayer::branch_bits(NodeId u, NodeId p) const {
  LevelBitmap bits = 0;
  for (NodeId y = arena_[u].parent; y != kNoNode && y != p; y = arena_[y].parent) {
    if (arena_[y].is_black()) bits |= arena_[y].edge_bits;
  }
  return bits;
}

void InducedShortcutLayer::update_on_bottom_leaf_removed(NodeId p, LevelBitmap removed_bits,
                                                         LevelBitmap /*branch*/) {
  if (counters_ != nullptr) counters_->branch_nodes_observed += std::popcount(removed_bits);
  for (LevelBitmap m = removed_bits; m != 0; m &= m - 1) {
    const int i = std::countr_zero(m);
    // A branch below p on this level means p may still see a unique child.
    const NodeId target =
        has_level(arena_[p].edge_bits, i) ? i_shortcut_to_special_child(p, i) : kNoNode;
    if (target != down(p, i)) {
      set_down(p, i, target);
      if (counters_ != nullptr) ++counters_->branch_recomputations;
    }
  }
}

std::size_t InducedShortcutLayer::shortcut_path_length(NodeId root, Level i) const {
  std::size_t steps = 0;
  for (NodeId x = down(root, i); x != kNoNode; x = down(x, i)) ++steps;
  return steps;
}

}  // namespace dynconn
