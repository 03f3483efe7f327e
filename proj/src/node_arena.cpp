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

#include "dynconn/node_arena.hpp"

#include <cassert>

namespace dynconn {

NodeArena::NodeArena(std::uint32_t vertices) : nodes_(vertices) {
  for (NodeId v = 0; v < vertices; ++v) {
    Node& leaf = nodes_[v];
    leaf.kind = NodeKind::kLeaf;
    leaf.alive = true;
    leaf.size = 1;
    leaf.rank = 0;
  }
  live_ = vertices;
}

NodeId NodeArena::create(NodeKind kind) {
  NodeId x;
  if (!free_.empty()) {
    x = free_.back();
    free_.pop_back();
  } else {
    x = static_cast<NodeId>(nodes_.size());
    nodes_.emplace_back();
  }
  Node& node = nodes_[x];
  node = Node{};
  node.kind = kind;
  node.alive = true;
  ++live_;
  touch(x);
  return x;
}

void NodeArena::destroy(NodeId x) {
  assert(nodes_[x].alive);
  if (listener_ != nullptr) listener_->on_destroy(x);
  Node& node = nodes_[x];
  if (node.parent != kNoNode) detach(x);
  for (NodeId c : node.child) {
    if (c != kNoNode) {
      nodes_[c].parent = kNoNode;
      touch(c);
    }
  }
  node = Node{};
  free_.push_back(x);
  --live_;
}

int NodeArena::position(NodeId child) const {
  const Node& p = nodes_[nodes_[child].parent];
  return p.child[0] == child ? 0 : 1;
}

void NodeArena::attach(NodeId parent, NodeId child) {
  Node& p = nodes_[parent];
  assert(p.child[1] == kNoNode);
  attach_at(parent, p.child[0] == kNoNode ? 0 : 1, child);
}

void NodeArena::attach_at(NodeId parent, int pos, NodeId child) {
  Node& p = nodes_[parent];
  Node& c = nodes_[child];
  assert(c.parent == kNoNode);
  if (pos == 0 && p.child[0] != kNoNode) {
    assert(p.child[1] == kNoNode);
    p.child[1] = p.child[0];
  }
  p.child[pos] = child;
  c.parent = parent;
  touch(parent);
  touch(child);
}

void NodeArena::detach(NodeId child) {
  Node& c = nodes_[child];
  if (c.parent == kNoNode) return;
  Node& p = nodes_[c.parent];
  if (p.child[0] == child) {
    p.child[0] = p.child[1];
  }
  p.child[1] = kNoNode;
  touch(c.parent);
  touch(child);
  c.parent = kNoNode;
}

void NodeArena::touch(NodeId x) {
  if (counters_ != nullptr) ++counters_->update_touched;
  if (!tracking_) return;
  Node& node = nodes_[x];
  if (node.touch_epoch == touch_epoch_) return;
  node.touch_epoch = touch_epoch_;
  touched_.push_back(x);
}

std::vector<NodeId> NodeArena::take_touched() {
  std::vector<NodeId> out;
  out.swap(touched_);
  ++touch_epoch_;
  return out;
}

}  // namespace dynconn
