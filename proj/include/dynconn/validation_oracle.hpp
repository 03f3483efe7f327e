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
#include <string>
#include <utility>
#include <vector>

#include "dynconn/types.hpp"

namespace dynconn {

class DynamicConnectivity;

// Plain adjacency-list graph with breadth-first connectivity, used as ground truth.
class BfsOracle {
 public:
  explicit BfsOracle(std::uint32_t n) : adj_(n) {}

  void insert(VertexId u, VertexId v);
  void remove(VertexId u, VertexId v);
  bool has_edge(VertexId u, VertexId v) const;
  bool connected(VertexId u, VertexId v) const;
  // Component id per vertex, ids assigned in vertex order.
  std::vector<std::uint32_t> components() const;
  std::size_t edge_count() const { return edges_; }

 private:
  std::vector<std::vector<VertexId>> adj_;
  std::size_t edges_ = 0;
};

bool oracle_connected(const std::vector<std::pair<VertexId, VertexId>>& edges, std::uint32_t n,
                      VertexId u, VertexId v);

struct FamilyResult {
  std::string name;
  bool ok = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<FamilyResult> families;

  bool ok() const;
  std::string first_failure() const;
  const FamilyResult* find(const std::string& name) const;
};

// Recomputes every maintained invariant from scratch and compares.
ValidationReport validate_structure(const DynamicConnectivity& dc);

}  // namespace dynconn
