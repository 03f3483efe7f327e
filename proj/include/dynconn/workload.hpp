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
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "dynconn/types.hpp"

namespace dynconn {

enum class OpKind : char { kInsert = 'I', kDelete = 'D', kQuery = 'Q' };

struct Op {
  OpKind kind = OpKind::kQuery;
  VertexId u = 0;
  VertexId v = 0;
  std::size_t line = 0;  // source line when parsed, 0 when generated
};

struct Workload {
  std::uint32_t n = 0;
  std::vector<Op> ops;
};

enum class Topology { kRandom, kPath, kCycle, kCliquesWithBridges, kMixed };

struct Mix {
  double insert = 0.35;
  double remove = 0.35;
  double query = 0.30;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Same seed and arguments give the same workload.
// Well-formed line that breaks a workload rule: range, self-loop, or an
// insert/delete that does not match the current edge set.
class WorkloadViolation : public ParseError {
 public:
  using ParseError::ParseError;
};

// prefill inserts come first and are not drawn from the mix.
Workload generate_workload(std::uint64_t seed, std::uint32_t n, std::size_t ops, Mix mix,
                           Topology topology, std::size_t prefill = 0);
// Throws ParseError on malformed input, and on D of an absent edge or I of a
// present one.
Workload parse_workload(std::istream& in);
void write_workload(std::ostream& out, const Workload& w);

Topology parse_topology(const std::string& name);
const char* topology_name(Topology t);

}  // namespace dynconn
