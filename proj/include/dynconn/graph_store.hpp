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
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "dynconn/types.hpp"

namespace dynconn {

struct EdgeRecord {
  EdgeKey id = kNoEdge;
  VertexId u = 0;
  VertexId v = 0;
  Level level = 0;
  std::uint32_t promotions = 0;

  VertexId other(VertexId x) const { return x == u ? v : u; }
};

// Incident edges of one vertex, grouped by level. Each group is an unordered
// bucket; an edge remembers its slot in both endpoint buckets so removal is
// a swap-and-pop after the O(log max_level) group lookup.
class LeveledAdjacency {
 public:
  std::span<const EdgeKey> group(Level i) const;
  LevelBitmap mask() const { return mask_; }
  std::size_t degree() const;
  const std::map<Level, std::vector<EdgeKey>>& groups() const { return groups_; }

 private:
  friend class GraphStore;
  std::map<Level, std::vector<EdgeKey>> groups_;
  LevelBitmap mask_ = 0;
};

// The dynamic graph: a fixed vertex set 0..n-1, simple undirected edges and
// their levels.
class GraphStore {
 public:
  GraphStore(std::uint32_t n, Level max_level);

  std::uint32_t vertex_count() const { return n_; }
  Level max_level() const { return max_level_; }
  std::size_t edge_count() const { return live_edges_; }

  EdgeKey insert_edge(VertexId u, VertexId v);
  EdgeRecord delete_edge(VertexId u, VertexId v);
  Level promote_edge(EdgeKey e);

  std::span<const EdgeKey> edges_at_level(VertexId v, Level i) const;
  bool has_edges_at_level(VertexId v, Level i) const {
    return has_level(adjacency_[v].mask_, i);
  }
  LevelBitmap level_mask(VertexId v) const { return adjacency_[v].mask_; }
  const LeveledAdjacency& adjacency(VertexId v) const { return adjacency_[v]; }

  std::optional<EdgeKey> find_edge(VertexId u, VertexId v) const;
  const EdgeRecord& edge(EdgeKey e) const { return edges_[e]; }
  bool is_live(EdgeKey e) const { return e < edges_.size() && live_[e]; }

  // Largest promotion count any edge reached over its lifetime.
  std::uint32_t max_lifetime_promotions() const { return max_promotions_; }
  std::uint64_t total_promotions() const { return total_promotions_; }

  template <typename Fn>
  void for_each_edge(Fn&& fn) const {
    for (EdgeKey e = 0; e < edges_.size(); ++e) {
      if (live_[e]) fn(edges_[e]);
    }
  }

 private:
  static std::uint64_t pair_key(VertexId u, VertexId v);
  void check_vertex(VertexId x) const;
  void add_to_group(VertexId x, EdgeKey e, Level i);
  void remove_from_group(VertexId x, EdgeKey e, Level i);

  std::uint32_t n_;
  Level max_level_;
  std::vector<LeveledAdjacency> adjacency_;
  std::vector<EdgeRecord> edges_;
  std::vector<char> live_;
  // slot of edge e inside the level group of each endpoint
  std::vector<std::uint32_t> slot_u_;
  std::vector<std::uint32_t> slot_v_;
  std::vector<EdgeKey> free_keys_;
  std::unordered_map<std::uint64_t, EdgeKey> by_pair_;
  std::size_t live_edges_ = 0;
  std::uint32_t max_promotions_ = 0;
  std::uint64_t total_promotions_ = 0;
};

}  // namespace dynconn
