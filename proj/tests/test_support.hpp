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

#include <string>

#include "dynconn/search_engine.hpp"
#include "dynconn/validation_oracle.hpp"
#include "dynconn/workload.hpp"

namespace dynconn {

struct TestAccess {
  static NodeArena& arena(DynamicConnectivity& dc) { return dc.forest_->arena(); }
  static InducedShortcutLayer& induced(DynamicConnectivity& dc) { return *dc.induced_; }
};

}  // namespace dynconn

namespace dynconn::testing_support {

// Small light-tree buffers so that bottom and top trees appear at small n.
inline Config small_buffers() {
  Config c;
  c.alpha = 1.0;
  return c;
}

// Replays w on a fresh engine, comparing every query with a BFS oracle and
// validating every `validate_every` ops. Returns an empty string on success.
inline std::string replay(const Workload& w, Variant variant, Config config,
                          std::size_t validate_every, std::vector<char>* answers = nullptr) {
  DynamicConnectivity dc(w.n, variant, config);
  BfsOracle oracle(w.n);
  for (std::size_t k = 0; k < w.ops.size(); ++k) {
    const Op& op = w.ops[k];
    try {
      switch (op.kind) {
        case OpKind::kInsert:
          dc.insert(op.u, op.v);
          oracle.insert(op.u, op.v);
          break;
        case OpKind::kDelete:
          dc.remove(op.u, op.v);
          oracle.remove(op.u, op.v);
          break;
        case OpKind::kQuery: {
          const bool got = dc.connected(op.u, op.v);
          if (answers != nullptr) answers->push_back(got ? '1' : '0');
          if (got != oracle.connected(op.u, op.v)) {
            return "op " + std::to_string(k) + ": query disagrees with oracle";
          }
          break;
        }
      }
    } catch (const std::exception& e) {
      return "op " + std::to_string(k) + ": " + e.what();
    }
    if (validate_every != 0 && (k + 1) % validate_every == 0) {
      const ValidationReport r = dc.validate();
      if (!r.ok()) return "op " + std::to_string(k) + ": " + r.first_failure();
    }
  }
  return {};
}

}  // namespace dynconn::testing_support
