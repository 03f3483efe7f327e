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
#include <string>

namespace dynconn {

#define DYNCONN_COUNTER_FIELDS(X) \
  X(inserts)                      \
  X(deletes)                      \
  X(queries)                      \
  X(merges)                       \
  X(splits)                       \
  X(promotions)                   \
  X(case1)                        \
  X(case2)                        \
  X(search_steps)                 \
  X(iterator_yields)              \
  X(iterator_touched)             \
  X(ancestor_calls)               \
  X(ancestor_touched)             \
  X(query_touched)                \
  X(update_touched)               \
  X(rank_nodes_created)           \
  X(rank_nodes_deleted)           \
  X(light_rank_nodes_created)     \
  X(light_rank_nodes_deleted)     \
  X(buffer_moves)                 \
  X(top_leaf_moves)               \
  X(bottoms_created)              \
  X(bottom_rank_repairs)          \
  X(heavy_promotions)             \
  X(standard_links_set)           \
  X(shortcuts_created)            \
  X(shortcuts_deleted)            \
  X(special_recomputes)           \
  X(branch_nodes_observed)        \
  X(branch_recomputations)

// Instrumentation for the amortized bounds. Every field only ever grows.
struct Counters {
#define DYNCONN_DECLARE(name) std::uint64_t name = 0;
  DYNCONN_COUNTER_FIELDS(DYNCONN_DECLARE)
#undef DYNCONN_DECLARE

  std::map<std::string, std::uint64_t> to_map() const {
    std::map<std::string, std::uint64_t> out;
#define DYNCONN_EMIT(name) out.emplace(#name, name);
    DYNCONN_COUNTER_FIELDS(DYNCONN_EMIT)
#undef DYNCONN_EMIT
    return out;
  }
};

// Nodes visited on behalf of updates: structural writes, level-edge
// iteration and the ancestor lookups that searches issue.
inline std::uint64_t update_work(const Counters& c) {
  return c.update_touched + c.iterator_touched + c.ancestor_touched;
}

}  // namespace dynconn
