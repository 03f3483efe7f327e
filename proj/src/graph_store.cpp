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

#include "dynconn/graph_store.hpp"

#include <algorithm>
#include <string>

namespace dynconn {

std::span<const EdgeKey> LeveledAdjacency::group(Level i) const {
  auto it = groups_.find(i);
  if (it == groups_.end()) return {};
  return it->second;
}

std::size_t LeveledAdjacency::degree() const {
  std::size_t d = 0;
  for (const auto& [level, bucket] : groups_) d += bucket.size();
  return d;
}

GraphStore::GraphStore(std::uint32_t n, Level max_level)
    : n_(n), max_level_(max_level), adjacency_(n) {}

std::uint64_t GraphStore::pair_key(VertexId u, VertexId v) {
  if (u > v) std::swap(u, v);
  return (std::uint64_t{u} << 32) | v;
}

void GraphStore::check_vertex(VertexId x) const {
  if (x >= n_) {
    throw ConnectivityError(ErrorCode::kVertexOutOfRange,
                            "vertex " + std::to_string(x) + " out of range");
  }
}

void GraphStore::add_to_group(VertexId x, EdgeKey e, Level i) {
  auto& adj = adjacency_[x];
  auto& bucket = adj.groups_[i];
  (edges_[e].u == x ? slot_u_ : slot_v_)[e] = static_cast<std::uint32_t>(bucket.size());
  bucket.push_back(e);
  adj.mask_ |= level_bit(i);
}

void GraphStore::remove_from_group(VertexId x, EdgeKey e, Level i) {
  auto& adj = adjacency_[x];
  auto it = adj.groups_.find(i);
  auto& bucket = it->second;
  const std::uint32_t slot = (edges_[e].u == x ? slot_u_ : slot_v_)[e];
  const EdgeKey moved = bucket.back();
  bucket[slot] = moved;
  (edges_[moved].u == x ? slot_u_ : slot_v_)[moved] = slot;
  bucket.pop_back();
  if (bucket.empty()) {
    adj.groups_.erase(it);
    adj.mask_ &= ~level_bit(i);
  }
}

EdgeKey GraphStore::insert_edge(VertexId u, VertexId v) {
  check_vertex(u);
  check_vertex(v);
  if (u == v) {
    throw ConnectivityError(ErrorCode::kSelfLoop,
                            "self-loop at vertex " + std::to_string(u));
  }
  const auto key = pair_key(u, v);
  if (by_pair_.contains(key)) {
    throw ConnectivityError(ErrorCode::kDuplicateEdge,
                            "edge (" + std::to_string(u) + "," + std::to_string(v) +
                                ") already present");
  }
  EdgeKey e;
  if (!free_keys_.empty()) {
    e = free_keys_.back();
    free_keys_.pop_back();
  } else {
    e = static_cast<EdgeKey>(edges_.size());
    edges_.emplace_back();
    live_.push_back(0);
    slot_u_.push_back(0);
    slot_v_.push_back(0);
  }
  edges_[e] = EdgeRecord{e, u, v, 0, 0};
  live_[e] = 1;
  by_pair_.emplace(key, e);
  add_to_group(u, e, 0);
  add_to_group(v, e, 0);
  ++live_edges_;
  return e;
}

EdgeRecord GraphStore::delete_edge(VertexId u, VertexId v) {
  check_vertex(u);
  check_vertex(v);
  auto it = by_pair_.find(pair_key(u, v));
  if (it == by_pair_.end()) {
    throw ConnectivityError(ErrorCode::kNoSuchEdge,
                            "no edge (" + std::to_string(u) + "," + std::to_string(v) + ")");
  }
  const EdgeKey e = it->second;
  by_pair_.erase(it);
  const EdgeRecord record = edges_[e];
  remove_from_group(record.u, e, record.level);
  remove_from_group(record.v, e, record.level);
  live_[e] = 0;
  free_keys_.push_back(e);
  --live_edges_;
  return record;
}

Level GraphStore::promote_edge(EdgeKey e) {
  EdgeRecord& record = edges_[e];
  if (record.level + 1 > max_level_) {
    throw ConnectivityError(ErrorCode::kLevelOverflow,
                            "edge " + std::to_string(e) + " already at max level");
  }
  remove_from_group(record.u, e, record.level);
  remove_from_group(record.v, e, record.level);
  ++record.level;
  add_to_group(record.u, e, record.level);
  add_to_group(record.v, e, record.level);
  ++record.promotions;
  ++total_promotions_;
  max_promotions_ = std::max(max_promotions_, record.promotions);
  return record.level;
}

std::span<const EdgeKey> GraphStore::edges_at_level(VertexId v, Level i) const {
  return adjacency_[v].group(i);
}

std::optional<EdgeKey> GraphStore::find_edge(VertexId u, VertexId v) const {
  if (u >= n_ || v >= n_) return std::nullopt;
  auto it = by_pair_.find(pair_key(u, v));
  if (it == by_pair_.end()) return std::nullopt;
  return it->second;
}

}  // namespace dynconn
