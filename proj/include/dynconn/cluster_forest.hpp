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
#include <map>
#include <vector>

#include "dynconn/counters.hpp"
#include "dynconn/node_arena.hpp"
#include "dynconn/params.hpp"
#include "dynconn/types.hpp"

namespace dynconn {

// Per-cluster record for L(u). The heavy part is a rank forest whose roots hang
// off a rank path; the light part is rooted at a top tree.
struct LocalTree {
  std::map<int, NodeId> heavy_roots;  // rank -> rank-tree root
  std::vector<NodeId> path;           // rank path nodes we own
  std::uint32_t heavy_count = 0;
  std::uint32_t light_count = 0;
  NodeId buffer = kNoNode;  // buffer root, present iff the buffer is nonempty
  NodeId top = kNoNode;     // top root, present iff light_count > 0
  bool in_use = false;
};

// The cluster forest C and its binary embedding C_L. Vertex v is node v of
// the arena. A vertex sits below the deepest cluster properly containing it;
// clusters always have at least two vertices.
class ClusterForest {
 public:
  ClusterForest(const Params& params, Variant variant, Counters* counters);

  ClusterForest(const ClusterForest&) = delete;
  ClusterForest& operator=(const ClusterForest&) = delete;

  NodeArena& arena() { return arena_; }
  const NodeArena& arena() const { return arena_; }
  const Params& params() const { return params_; }
  Variant variant() const { return variant_; }
  bool lazy() const { return variant_ == Variant::kImproved; }

  bool is_cluster(NodeId x) const { return arena_[x].kind == NodeKind::kCluster; }
  std::uint64_t size(NodeId x) const { return arena_[x].size; }
  Level level(NodeId x) const { return arena_[x].level; }

  // Nearest C-node strictly above x, if any.
  NodeId cparent(NodeId x) const;
  NodeId root_of(NodeId x) const;
  // C-children of u in local-tree order.
  std::vector<NodeId> children(NodeId u) const;
  std::uint32_t child_count(NodeId u) const;
  const LocalTree& local(NodeId u) const { return locals_[arena_[u].cluster]; }

  // a and b are siblings (or both roots) at the same level. Returns the
  // surviving node, which may be freshly created when both are vertices.
  NodeId merge_cnodes(NodeId a, NodeId b);
  // Removes w from L(p) without deleting anything; n(p) shrinks.
  void detach_child(NodeId p, NodeId w);
  // Adds w below p; n(p) grows by n(w).
  void attach_child(NodeId p, NodeId w);
  // Moves w out of its parent p into a new level-l(p) node below parent(p).
  // Returns the new node (w itself when w is a vertex). If p is left with a
  // single vertex child, p is dissolved and *p_out receives that vertex.
  NodeId split_to_new_parent(NodeId w, NodeId* p_out);
  // Rebuilds L(u) from scratch from its current children.
  void rebuild_local_tree(NodeId u);

  // Simple variant: recompute edge bits of x and ancestors until stable.
  void refresh_bitmaps(NodeId x);
  void refresh_bitmaps_touched(const std::vector<NodeId>& touched);

  // Nodes whose rank changed since the last call.
  std::vector<NodeId> take_rank_changed();

  void set_rank(NodeId x, int rank);

 private:
  NodeId new_cluster(Level level);
  void destroy_cluster(NodeId u);
  LocalTree& lt(NodeId u) { return locals_[arena_[u].cluster]; }

  // L(p) membership without touching n(p).
  void link(NodeId p, NodeId c);
  void unlink(NodeId p, NodeId c);
  void set_size(NodeId u, std::uint64_t size);
  // Restores heavy/light classification of u's children after n(u) changed.
  void reclassify(NodeId u, std::uint64_t old_size);
  // Re-inserts u in L(parent(u)) after n(u) changed.
  void reposition(NodeId u);
  void make_root(NodeId x);
  // Adds delta to n(x) for p and every C-ancestor, keeping every L() valid.
  // child, if given, is linked below p once n(p) is updated.
  void adjust_sizes_upward(NodeId p, std::int64_t delta, NodeId child);

  // Heavy rank forest.
  NodeId make_rank_node(NodeKind kind, int rank, bool light, Level tag);
  void destroy_rank_node(NodeId x);
  void heavy_insert_root(NodeId u, NodeId x);
  void heavy_add(NodeId u, NodeId c);
  void heavy_remove(NodeId u, NodeId c);
  void heavy_leaves(NodeId u, std::vector<NodeId>& out) const;
  void heavy_clear(NodeId u);
  void detach_layout(NodeId u);
  void layout(NodeId u);

  // Light tree (lazy_local_tree.cpp).
  void light_add(NodeId u, NodeId c);
  void light_remove(NodeId u, NodeId c);
  void light_leaves(NodeId u, std::vector<NodeId>& out) const;
  void light_merge(NodeId u, NodeId v);
  void buffer_insert(NodeId u, NodeId c);
  void buffer_to_bottom(NodeId u);
  void top_add_root(NodeId u, NodeId x);
  // Detaches b from the top forest of u, re-pairing whatever it shared rank
  // nodes with. b itself is left detached.
  void top_remove_root(NodeId u, NodeId b);
  void repair_bottom(NodeId u, NodeId b);
  NodeId ensure_top(NodeId u);
  void drop_top_if_empty(NodeId u);
  void collect_newly_heavy(NodeId u, std::uint64_t threshold, std::vector<NodeId>& out) const;

 public:
  // Exposed for the lazy-local-tree unit tests.
  void lazy_merge(NodeId u, NodeId v) { merge_cnodes(u, v); }
  void repair_bottom_root_rank(NodeId u, NodeId bottom_root) { repair_bottom(u, bottom_root); }
  std::uint64_t bottom_serial() const { return bottom_serial_; }

 private:
  Params params_;
  Variant variant_;
  Counters* counters_;
  NodeArena arena_;
  std::vector<LocalTree> locals_;
  std::vector<std::uint32_t> free_locals_;
  std::vector<NodeId> rank_changed_;
  std::uint64_t bottom_serial_ = 0;
};

}  // namespace dynconn
