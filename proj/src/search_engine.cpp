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

#include "dynconn/search_engine.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <string>

#include "dynconn/validation_oracle.hpp"

namespace dynconn {

LevelEdgeIterator::LevelEdgeIterator(const DynamicConnectivity& dc, NodeId root, Level i,
                                     Counters* counters)
    : dc_(&dc), counters_(counters), level_(i), stack_{root} {}

void LevelEdgeIterator::advance() {
  const NodeArena& arena = dc_->forest_->arena();
  const bool improved = dc_->induced_ != nullptr;
  const LevelBitmap bit = level_bit(level_);
  while (!stack_.empty()) {
    const NodeId y = stack_.back();
    stack_.pop_back();
    if (counters_ != nullptr) ++counters_->iterator_touched;
    const Node& node = arena[y];
    if (node.kind == NodeKind::kLeaf) {
      len_ = dc_->graph_.edges_at_level(y, level_).size();
      if (len_ == 0) continue;
      leaf_ = y;
      pos_ = 0;
      on_leaf_ = true;
      return;
    }
    if ((!improved || node.is_black()) && !(node.edge_bits & bit)) continue;
    if (improved && node.is_special()) {
      const NodeId w = dc_->induced_->down(y, level_);
      if (w != kNoNode) {
        stack_.push_back(w);
        continue;
      }
    }
    if (node.child[1] != kNoNode) stack_.push_back(node.child[1]);
    if (node.child[0] != kNoNode) stack_.push_back(node.child[0]);
  }
}

bool LevelEdgeIterator::next(EdgeKey& edge, VertexId& from) {
  for (;;) {
    if (on_leaf_ && pos_ < len_) {
      edge = dc_->graph_.edges_at_level(leaf_, level_)[pos_++];
      from = leaf_;
      return true;
    }
    on_leaf_ = false;
    advance();
    if (!on_leaf_) return false;
  }
}

struct DynamicConnectivity::Search {
  std::uint8_t id = 0;
  std::vector<NodeId> clusters;
  std::size_t next = 0;
  LevelEdgeIterator it;
  bool scanning = false;
  std::vector<EdgeKey> edges;
  std::uint64_t volume = 0;
};

DynamicConnectivity::DynamicConnectivity(std::uint64_t n, Variant variant, Config config)
    : params_(Params::make(n, config.epsilon, config.alpha)),
      variant_(variant),
      config_(config),
      graph_(static_cast<std::uint32_t>(n), params_.max_level) {
  forest_ = std::make_unique<ClusterForest>(params_, variant, &counters_);
  NodeArena& arena = forest_->arena();
  if (variant == Variant::kImproved) {
    shortcuts_ = std::make_unique<ShortcutLayer>(*forest_, &counters_);
    induced_ = std::make_unique<InducedShortcutLayer>(*forest_, *shortcuts_, &counters_);
    arena.set_listener(this);
    for (NodeId v = 0; v < n; ++v) {
      arena[v].black_types = shortcuts_->classify_color(v);
      arena[v].special_types = induced_->classify_special(v);
    }
  }
  arena.take_touched();
}

DynamicConnectivity::~DynamicConnectivity() { forest_->arena().set_listener(nullptr); }

void DynamicConnectivity::on_destroy(NodeId x) {
  shortcuts_->on_destroy(x);
  induced_->on_destroy(x);
}

void DynamicConnectivity::repair() {
  NodeArena& arena = forest_->arena();
  std::vector<NodeId> touched = arena.take_touched();
  std::vector<NodeId> ranks = forest_->take_rank_changed();
  if (variant_ == Variant::kSimple) {
    forest_->refresh_bitmaps_touched(touched);
    return;
  }
  RepairLog log;
  shortcuts_->repair(touched, ranks, log);
  induced_->repair(log, touched);
}

NodeId DynamicConnectivity::ancestor_by_parent_walk(NodeId v, Level i) const {
  const NodeArena& arena = forest_->arena();
  for (NodeId x = v; x != kNoNode; x = arena[x].parent) {
    if (is_cnode(arena[x].kind) && arena[x].level <= i) return x;
  }
  throw ConnectivityError(ErrorCode::kNoSuchAncestor, "no ancestor at requested level");
}

NodeId DynamicConnectivity::ancestor_at_level(NodeId v, Level i, std::uint64_t* touched) const {
  if (shortcuts_ != nullptr) return shortcuts_->ancestor_at_level(v, i, touched);
  const NodeArena& arena = forest_->arena();
  std::uint64_t steps = 0;
  for (NodeId x = v; x != kNoNode; x = arena[x].parent) {
    ++steps;
    if (is_cnode(arena[x].kind) && arena[x].level <= i) {
      if (touched != nullptr) *touched += steps;
      return x;
    }
  }
  throw ConnectivityError(ErrorCode::kNoSuchAncestor, "no ancestor at requested level");
}

NodeId DynamicConnectivity::ancestor_at_level(NodeId v, Level i) const {
  std::uint64_t touched = 0;
  const NodeId x = ancestor_at_level(v, i, &touched);
  ancestor_calls_.fetch_add(1, std::memory_order_relaxed);
  ancestor_touched_.fetch_add(touched, std::memory_order_relaxed);
  return x;
}

std::vector<std::pair<EdgeKey, VertexId>> DynamicConnectivity::level_edges(NodeId root,
                                                                           Level i) const {
  std::vector<std::pair<EdgeKey, VertexId>> out;
  LevelEdgeIterator it(*this, root, i);
  EdgeKey e;
  VertexId from;
  while (it.next(e, from)) out.emplace_back(e, from);
  return out;
}

bool DynamicConnectivity::connected(VertexId u, VertexId v) const {
  std::shared_lock lock(mutex_);
  if (u >= params_.n || v >= params_.n) {
    throw ConnectivityError(ErrorCode::kVertexOutOfRange, "vertex out of range");
  }
  queries_.fetch_add(1, std::memory_order_relaxed);
  if (u == v) return true;
  std::uint64_t touched = 0;
  const NodeId ru = ancestor_at_level(u, 0, &touched);
  const NodeId rv = ancestor_at_level(v, 0, &touched);
  query_touched_.fetch_add(touched, std::memory_order_relaxed);
  return ru == rv;
}

Counters DynamicConnectivity::counters_snapshot() const {
  std::shared_lock lock(mutex_);
  Counters c = counters_;
  c.queries = queries_.load();
  c.query_touched = query_touched_.load();
  c.ancestor_calls = ancestor_calls_.load();
  c.ancestor_touched = ancestor_touched_.load();
  return c;
}

ValidationReport DynamicConnectivity::validate() const {
  std::shared_lock lock(mutex_);
  return validate_structure(*this);
}

void DynamicConnectivity::maybe_validate() {
  ++updates_;
  if (config_.validate_every == 0 || updates_ % config_.validate_every != 0) return;
  const ValidationReport report = validate_structure(*this);
  if (!report.ok()) {
    throw ConnectivityError(ErrorCode::kInvariantViolation,
                            "validator: " + report.first_failure());
  }
}

void DynamicConnectivity::set_leaf_mask(VertexId v, LevelBitmap old_mask) {
  const LevelBitmap mask = graph_.level_mask(v);
  if (mask == old_mask) return;
  if (variant_ == Variant::kSimple) {
    forest_->arena()[v].edge_bits = mask;
    forest_->refresh_bitmaps(v);
    return;
  }
  for (LevelBitmap m = old_mask & ~mask; m != 0; m &= m - 1) {
    induced_->on_level_departure(v, std::countr_zero(m));
  }
  for (LevelBitmap m = mask & ~old_mask; m != 0; m &= m - 1) {
    induced_->on_level_arrival(v, std::countr_zero(m));
  }
}

void DynamicConnectivity::promote(EdgeKey e) {
  const EdgeRecord rec = graph_.edge(e);
  const LevelBitmap mu = graph_.level_mask(rec.u);
  const LevelBitmap mv = graph_.level_mask(rec.v);
  graph_.promote_edge(e);
  ++counters_.promotions;
  set_leaf_mask(rec.u, mu);
  set_leaf_mask(rec.v, mv);
}

void DynamicConnectivity::insert(VertexId u, VertexId v) {
  std::unique_lock lock(mutex_);
  if (u >= params_.n || v >= params_.n) {
    throw ConnectivityError(ErrorCode::kVertexOutOfRange, "vertex out of range");
  }
  const LevelBitmap mu = graph_.level_mask(u);
  const LevelBitmap mv = graph_.level_mask(v);
  graph_.insert_edge(u, v);
  ++counters_.inserts;
  const NodeId ru = forest_->root_of(u);
  const NodeId rv = forest_->root_of(v);
  if (ru != rv) {
    forest_->merge_cnodes(ru, rv);
    repair();
  }
  set_leaf_mask(u, mu);
  set_leaf_mask(v, mv);
  maybe_validate();
}

void DynamicConnectivity::remove(VertexId u, VertexId v) {
  std::unique_lock lock(mutex_);
  if (u >= params_.n || v >= params_.n) {
    throw ConnectivityError(ErrorCode::kVertexOutOfRange, "vertex out of range");
  }
  const LevelBitmap mu = graph_.level_mask(u);
  const LevelBitmap mv = graph_.level_mask(v);
  const EdgeRecord rec = graph_.delete_edge(u, v);
  ++counters_.deletes;
  set_leaf_mask(u, mu);
  set_leaf_mask(v, mv);
  delete_at_level(u, v, rec.level);
  maybe_validate();
}

void DynamicConnectivity::delete_at_level(VertexId u, VertexId v, Level top) {
  for (Level i = top; i >= 0; --i) {
    const NodeId cu = ancestor_at_level(u, i + 1);
    const NodeId cv = ancestor_at_level(v, i + 1);
    if (cu == cv) return;
    if (search_and_restructure(cu, cv, i)) return;
  }
}

NodeId DynamicConnectivity::merge_all(const std::vector<NodeId>& clusters) {
  NodeId s = clusters.front();
  for (std::size_t k = 1; k < clusters.size(); ++k) s = forest_->merge_cnodes(s, clusters[k]);
  return s;
}

bool DynamicConnectivity::search_and_restructure(NodeId cu, NodeId cv, Level i) {
  NodeArena& arena = forest_->arena();
  ++mark_epoch_;
  Search a;
  Search b;
  a.id = 1;
  b.id = 2;
  for (auto [s, c] : {std::pair{&a, cu}, std::pair{&b, cv}}) {
    s->clusters.push_back(c);
    s->volume = arena[c].size;
    arena[c].mark_epoch = mark_epoch_;
    arena[c].mark_proc = s->id;
  }

  enum class Step { kContinue, kCollision, kExhausted };
  auto step = [&](Search& s) {
    for (;;) {
      if (!s.scanning) {
        if (s.next == s.clusters.size()) return Step::kExhausted;
        s.it = LevelEdgeIterator(*this, s.clusters[s.next++], i, &counters_);
        s.scanning = true;
      }
      EdgeKey e;
      VertexId from;
      if (!s.it.next(e, from)) {
        s.scanning = false;
        continue;
      }
      ++counters_.search_steps;
      ++counters_.iterator_yields;
      const NodeId c = ancestor_at_level(graph_.edge(e).other(from), i + 1);
      s.edges.push_back(e);
      Node& node = arena[c];
      if (node.mark_epoch == mark_epoch_) {
        return node.mark_proc == s.id ? Step::kContinue : Step::kCollision;
      }
      node.mark_epoch = mark_epoch_;
      node.mark_proc = s.id;
      s.clusters.push_back(c);
      s.volume += node.size;
      return Step::kContinue;
    }
  };

  const std::uint64_t half = params_.level_capacity(i + 1);
  auto finish = [&](std::vector<EdgeKey> edges, const std::vector<NodeId>& clusters) {
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    for (EdgeKey e : edges) promote(e);
    const NodeId w = merge_all(clusters);
    repair();
    return w;
  };

  Search* procs[2] = {&a, &b};
  for (int turn = 0;; turn ^= 1) {
    Search& s = *procs[turn];
    Search& other = *procs[1 - turn];
    const Step r = step(s);
    if (r == Step::kContinue) continue;
    if (r == Step::kCollision) {
      ++counters_.case1;
      Search& small = a.volume <= b.volume ? a : b;
      if (small.volume > half) {
        throw ConnectivityError(ErrorCode::kInvariantViolation, "search volume above capacity");
      }
      std::vector<EdgeKey> edges = small.edges;
      if (&small == &s) edges.pop_back();
      finish(std::move(edges), small.clusters);
      return true;
    }
    ++counters_.case2;
    Search* done = &s;
    if (s.volume > half) {
      for (Step r2 = step(other); r2 != Step::kExhausted; r2 = step(other)) {
        if (r2 == Step::kCollision) {
          throw ConnectivityError(ErrorCode::kInvariantViolation, "collision after exhaustion");
        }
      }
      if (other.volume > half) {
        throw ConnectivityError(ErrorCode::kInvariantViolation, "search volume above capacity");
      }
      done = &other;
    }
    const NodeId w = finish(done->edges, done->clusters);
    NodeId p_out = kNoNode;
    forest_->split_to_new_parent(w, &p_out);
    repair();
    return false;
  }
}

}  // namespace dynconn
