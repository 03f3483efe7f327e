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

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <shared_mutex>
#include <vector>

#include "dynconn/cluster_forest.hpp"
#include "dynconn/counters.hpp"
#include "dynconn/graph_store.hpp"
#include "dynconn/induced_shortcut_layer.hpp"
#include "dynconn/params.hpp"
#include "dynconn/shortcut_layer.hpp"

namespace dynconn {

class DynamicConnectivity;
struct ValidationReport;

// Pull-style enumeration of the level-i edges incident to vertices below a
// level-(i+1) C-node.
class LevelEdgeIterator {
 public:
  LevelEdgeIterator() = default;
  LevelEdgeIterator(const DynamicConnectivity& dc, NodeId root, Level i,
                    Counters* counters = nullptr);

  // Yields the next (edge, endpoint below root) pair; false when exhausted.
  bool next(EdgeKey& edge, VertexId& from);

 private:
  void advance();

  const DynamicConnectivity* dc_ = nullptr;
  Counters* counters_ = nullptr;
  Level level_ = 0;
  std::vector<NodeId> stack_;
  VertexId leaf_ = 0;
  std::size_t pos_ = 0;
  std::size_t len_ = 0;
  bool on_leaf_ = false;
};

class DynamicConnectivity final : private ArenaListener {
 public:
  DynamicConnectivity(std::uint64_t n, Variant variant = Variant::kImproved, Config config = {});
  ~DynamicConnectivity() override;

  DynamicConnectivity(const DynamicConnectivity&) = delete;
  DynamicConnectivity& operator=(const DynamicConnectivity&) = delete;

  bool connected(VertexId u, VertexId v) const;
  void insert(VertexId u, VertexId v);
  void remove(VertexId u, VertexId v);

  Counters counters_snapshot() const;
  ValidationReport validate() const;

  std::uint64_t vertex_count() const { return params_.n; }
  Variant variant() const { return variant_; }
  const Params& params() const { return params_; }
  const Config& config() const { return config_; }

  // Introspection used by the validator, tests and the CLI.
  const GraphStore& graph() const { return graph_; }
  const ClusterForest& forest() const { return *forest_; }
  const ShortcutLayer* shortcuts() const { return shortcuts_.get(); }
  const InducedShortcutLayer* induced() const { return induced_.get(); }
  NodeId ancestor_at_level(NodeId v, Level i) const;
  NodeId ancestor_at_level(NodeId v, Level i, std::uint64_t* touched) const;
  NodeId ancestor_by_parent_walk(NodeId v, Level i) const;
  std::vector<std::pair<EdgeKey, VertexId>> level_edges(NodeId root, Level i) const;

  // Bottom-tree sizes seen by earlier validations, keyed by serial.
  std::map<std::uint64_t, std::uint32_t>& bottom_history() const { return bottom_history_; }

 private:
  friend class LevelEdgeIterator;
  // Defined only by the test suite, for fault injection.
  friend struct TestAccess;

  struct Search;

  void on_destroy(NodeId x) override;
  void repair();
  void set_leaf_mask(VertexId v, LevelBitmap old_mask);
  void promote(EdgeKey e);
  void delete_at_level(VertexId u, VertexId v, Level i);
  bool search_and_restructure(NodeId cu, NodeId cv, Level i);
  NodeId merge_all(const std::vector<NodeId>& clusters);
  void maybe_validate();

  Params params_;
  Variant variant_;
  Config config_;
  Counters counters_;
  mutable std::atomic<std::uint64_t> queries_{0};
  mutable std::atomic<std::uint64_t> query_touched_{0};
  mutable std::atomic<std::uint64_t> ancestor_calls_{0};
  mutable std::atomic<std::uint64_t> ancestor_touched_{0};
  GraphStore graph_;
  std::unique_ptr<ClusterForest> forest_;
  std::unique_ptr<ShortcutLayer> shortcuts_;
  std::unique_ptr<InducedShortcutLayer> induced_;
  mutable std::shared_mutex mutex_;
  std::uint32_t mark_epoch_ = 0;
  std::uint64_t updates_ = 0;
  mutable std::map<std::uint64_t, std::uint32_t> bottom_history_;
};

}  // namespace dynconn
