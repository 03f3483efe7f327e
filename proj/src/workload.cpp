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

#include "dynconn/workload.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace dynconn {
namespace {

std::uint64_t key_of(VertexId u, VertexId v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Set of vertex pairs with O(1) uniform sampling.
class PairPool {
 public:
  bool contains(std::uint64_t k) const { return index_.count(k) != 0; }
  bool empty() const { return keys_.empty(); }
  void add(std::uint64_t k) {
    if (index_.emplace(k, keys_.size()).second) keys_.push_back(k);
  }
  void erase(std::uint64_t k) {
    auto it = index_.find(k);
    if (it == index_.end()) return;
    const std::size_t slot = it->second;
    index_.erase(it);
    if (slot + 1 != keys_.size()) {
      keys_[slot] = keys_.back();
      index_[keys_[slot]] = slot;
    }
    keys_.pop_back();
  }
  std::uint64_t sample(std::mt19937_64& rng) const {
    return keys_[std::uniform_int_distribution<std::size_t>(0, keys_.size() - 1)(rng)];
  }

 private:
  std::vector<std::uint64_t> keys_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
};

std::vector<std::uint64_t> structured_pairs(std::uint32_t n, Topology t) {
  std::vector<std::uint64_t> out;
  if (n < 2) return out;
  if (t == Topology::kPath || t == Topology::kCycle) {
    for (VertexId x = 0; x + 1 < n; ++x) out.push_back(key_of(x, x + 1));
    if (t == Topology::kCycle && n > 2) out.push_back(key_of(n - 1, 0));
  } else if (t == Topology::kCliquesWithBridges || t == Topology::kMixed) {
    const std::uint32_t k = std::clamp<std::uint32_t>(n / 4, 2, 8);
    for (VertexId base = 0; base < n; base += k) {
      const VertexId end = std::min<VertexId>(n, base + k);
      for (VertexId a = base; a < end; ++a) {
        for (VertexId b = a + 1; b < end; ++b) out.push_back(key_of(a, b));
      }
      if (end < n) out.push_back(key_of(base, end));
    }
  }
  return out;
}

}  // namespace

Workload generate_workload(std::uint64_t seed, std::uint32_t n, std::size_t ops, Mix mix,
                           Topology topology, std::size_t prefill) {
  const double total = mix.insert + mix.remove + mix.query;
  if (total <= 0 || mix.insert < 0 || mix.remove < 0 || mix.query < 0 ||
      std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("mix probabilities must be non-negative and sum to 1");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<VertexId> pick(0, n == 0 ? 0 : n - 1);
  Workload w;
  w.n = n;
  w.ops.reserve(prefill + ops);

  PairPool present;
  PairPool absent;  // structured candidates not currently present
  std::unordered_set<std::uint64_t> candidates;
  for (std::uint64_t k : structured_pairs(n, topology)) {
    candidates.insert(k);
    absent.add(k);
  }
  const bool random_pairs = topology == Topology::kRandom || topology == Topology::kMixed;

  auto random_pair = [&](VertexId& u, VertexId& v) {
    u = pick(rng);
    do {
      v = pick(rng);
    } while (v == u);
  };
  auto push_query = [&]() {
    Op op{OpKind::kQuery, 0, 0, 0};
    if (n >= 2) random_pair(op.u, op.v);
    w.ops.push_back(op);
  };
  auto try_insert = [&]() {
    std::uint64_t k = 0;
    bool found = false;
    const bool structured = !absent.empty() && (!random_pairs || coin(rng) < 0.5);
    if (structured) {
      k = absent.sample(rng);
      found = true;
    } else if (random_pairs && n >= 2) {
      for (int attempt = 0; attempt < 64 && !found; ++attempt) {
        VertexId u, v;
        random_pair(u, v);
        k = key_of(u, v);
        found = !present.contains(k);
      }
    }
    if (!found) return false;
    present.add(k);
    absent.erase(k);
    w.ops.push_back(Op{OpKind::kInsert, static_cast<VertexId>(k >> 32),
                       static_cast<VertexId>(k & 0xffffffffULL), 0});
    return true;
  };

  for (std::size_t step = 0; step < prefill; ++step) {
    if (!try_insert()) break;
  }
  for (std::size_t step = 0; step < ops; ++step) {
    const double r = coin(rng) * total;
    if (r < mix.insert) {
      if (!try_insert()) push_query();
    } else if (r < mix.insert + mix.remove) {
      if (present.empty()) {
        push_query();
        continue;
      }
      const std::uint64_t k = present.sample(rng);
      present.erase(k);
      if (candidates.count(k)) absent.add(k);
      w.ops.push_back(Op{OpKind::kDelete, static_cast<VertexId>(k >> 32),
                         static_cast<VertexId>(k & 0xffffffffULL), 0});
    } else {
      push_query();
    }
  }
  return w;
}

Workload parse_workload(std::istream& in) {
  Workload w;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  std::unordered_set<std::uint64_t> present;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (!have_header) {
      long long n = -1;
      if (tag != "n" || !(ls >> n) || n < 1 || n > 0xffffffffLL) {
        throw ParseError(lineno, "expected header 'n <N>'");
      }
      std::string rest;
      if (ls >> rest) throw ParseError(lineno, "trailing text after header");
      w.n = static_cast<std::uint32_t>(n);
      have_header = true;
      continue;
    }
    if (tag.size() != 1 || (tag[0] != 'I' && tag[0] != 'D' && tag[0] != 'Q')) {
      throw ParseError(lineno, "unknown operation '" + tag + "'");
    }
    long long u = -1;
    long long v = -1;
    std::string rest;
    if (!(ls >> u >> v) || (ls >> rest)) throw ParseError(lineno, "expected two vertex ids");
    if (u < 0 || v < 0 || u >= w.n || v >= w.n) throw WorkloadViolation(lineno, "vertex out of range");
    Op op{static_cast<OpKind>(tag[0]), static_cast<VertexId>(u), static_cast<VertexId>(v), lineno};
    if (op.kind != OpKind::kQuery) {
      if (u == v) throw WorkloadViolation(lineno, "self loop");
      const std::uint64_t k = key_of(op.u, op.v);
      if (op.kind == OpKind::kInsert && !present.insert(k).second) {
        throw WorkloadViolation(lineno, "insert of a present edge");
      }
      if (op.kind == OpKind::kDelete && present.erase(k) == 0) {
        throw WorkloadViolation(lineno, "delete of an absent edge");
      }
    }
    w.ops.push_back(op);
  }
  if (!have_header) throw ParseError(lineno, "missing header");
  return w;
}

void write_workload(std::ostream& out, const Workload& w) {
  out << "n " << w.n << '\n';
  for (const Op& op : w.ops) out << static_cast<char>(op.kind) << ' ' << op.u << ' ' << op.v << '\n';
}

Topology parse_topology(const std::string& name) {
  if (name == "random") return Topology::kRandom;
  if (name == "path") return Topology::kPath;
  if (name == "cycle") return Topology::kCycle;
  if (name == "cliques-with-bridges") return Topology::kCliquesWithBridges;
  if (name == "mixed") return Topology::kMixed;
  throw std::invalid_argument("unknown topology " + name);
}

const char* topology_name(Topology t) {
  switch (t) {
    case Topology::kRandom: return "random";
    case Topology::kPath: return "path";
    case Topology::kCycle: return "cycle";
    case Topology::kCliquesWithBridges: return "cliques-with-bridges";
    case Topology::kMixed: return "mixed";
  }
  return "random";
}

}  // namespace dynconn
