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


// dynconn: replay, generate and benchmark connectivity workloads.
//
// Exit codes: 0 ok, 1 i/o error, 2 usage, 3 parse error, 4 precondition
// violation, 5 oracle mismatch, 6 validator failure.

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dynconn/search_engine.hpp"
#include "dynconn/validation_oracle.hpp"
#include "dynconn/workload.hpp"

namespace {

using namespace dynconn;

enum Exit { kOk = 0, kIo = 1, kUsage = 2, kParse = 3, kPrecondition = 4, kOracle = 5, kValidator = 6 };

struct EngineFlags {
  std::string variant = "improved";
  double epsilon = 0.5;
  double alpha = 3.0;

  void add(CLI::App* cmd, bool allow_both) {
    std::vector<std::string> choices{"simple", "improved"};
    if (allow_both) choices.push_back("both");
    cmd->add_option("--variant", variant, "engine variant")
        ->check(CLI::IsMember(choices))
        ->capture_default_str();
    cmd->add_option("--epsilon", epsilon, "heavy/black spacing exponent")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_option("--alpha", alpha, "buffer capacity exponent")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }
  Config config() const {
    Config c;
    c.epsilon = epsilon;
    c.alpha = alpha;
    return c;
  }
};

Variant variant_of(const std::string& name) {
  return name == "simple" ? Variant::kSimple : Variant::kImproved;
}

struct MixFlag {
  std::string text = "0.35,0.35,0.30";
  Mix parse() const {
    Mix m;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> m.insert >> c1 >> m.remove >> c2 >> m.query) || c1 != ',' || c2 != ',') {
      throw CLI::ValidationError("--mix", "expected three comma-separated probabilities");
    }
    std::string rest;
    if (in >> rest) throw CLI::ValidationError("--mix", "trailing text");
    const double total = m.insert + m.remove + m.query;
    if (m.insert < 0 || m.remove < 0 || m.query < 0 || std::abs(total - 1.0) > 1e-9) {
      throw CLI::ValidationError("--mix", "probabilities must be non-negative and sum to 1");
    }
    return m;
  }
};

// --- run ------------------------------------------------------------------

struct RunFlags {
  std::string input = "-";
  EngineFlags engine;
  bool check_oracle = false;
  std::uint64_t validate_every = 0;
  std::string stats;
};

void write_stats_header(std::ostream& out) {
  out << "# schema=1\n";
  out << "op,line,kind,u,v,answer";
  for (const auto& [name, value] : Counters{}.to_map()) out << ',' << name;
  out << '\n';
}

void write_stats_row(std::ostream& out, std::size_t k, const Op& op, int answer,
                     const Counters& before, const Counters& after) {
  out << k << ',' << op.line << ',' << static_cast<char>(op.kind) << ',' << op.u << ',' << op.v
      << ',';
  if (answer >= 0) out << answer;
  const auto a = before.to_map();
  const auto b = after.to_map();
  for (auto it = a.begin(), jt = b.begin(); it != a.end(); ++it, ++jt) {
    out << ',' << (jt->second - it->second);
  }
  out << '\n';
}

int run_command(const RunFlags& f) {
  Workload w;
  try {
    if (f.input == "-") {
      w = parse_workload(std::cin);
    } else {
      std::ifstream in(f.input);
      if (!in) {
        std::cerr << "cannot open " << f.input << '\n';
        return kIo;
      }
      w = parse_workload(in);
    }
  } catch (const WorkloadViolation& e) {
    std::cerr << "precondition violation: " << e.what() << '\n';
    return kPrecondition;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << '\n';
    return kParse;
  }

  std::ofstream stats;
  if (!f.stats.empty()) {
    stats.open(f.stats);
    if (!stats) {
      std::cerr << "cannot write " << f.stats << '\n';
      return kIo;
    }
    write_stats_header(stats);
  }

  std::unique_ptr<DynamicConnectivity> dc;
  try {
    dc = std::make_unique<DynamicConnectivity>(w.n, variant_of(f.engine.variant),
                                               f.engine.config());
  } catch (const ConnectivityError& e) {
    std::cerr << "precondition violation: " << e.what() << '\n';
    return kPrecondition;
  }
  std::optional<BfsOracle> oracle;
  if (f.check_oracle) oracle.emplace(w.n);

  Counters before = dc->counters_snapshot();
  for (std::size_t k = 0; k < w.ops.size(); ++k) {
    const Op& op = w.ops[k];
    int answer = -1;
    try {
      switch (op.kind) {
        case OpKind::kInsert:
          dc->insert(op.u, op.v);
          if (oracle) oracle->insert(op.u, op.v);
          break;
        case OpKind::kDelete:
          dc->remove(op.u, op.v);
          if (oracle) oracle->remove(op.u, op.v);
          break;
        case OpKind::kQuery:
          answer = dc->connected(op.u, op.v) ? 1 : 0;
          std::cout << answer << '\n';
          if (oracle && (answer == 1) != oracle->connected(op.u, op.v)) {
            std::cout.flush();
            std::cerr << "oracle mismatch at line " << op.line << ": engine answered " << answer
                      << '\n';
            return kOracle;
          }
          break;
      }
    } catch (const ConnectivityError& e) {
      std::cout.flush();
      std::cerr << "precondition violation at line " << op.line << ": " << e.what() << '\n';
      return kPrecondition;
    }
    if (f.validate_every != 0 && (k + 1) % f.validate_every == 0) {
      const ValidationReport r = dc->validate();
      if (!r.ok()) {
        std::cout.flush();
        std::cerr << "validator failure after line " << op.line << ": " << r.first_failure()
                  << '\n';
        return kValidator;
      }
    }
    if (stats.is_open()) {
      const Counters after = dc->counters_snapshot();
      write_stats_row(stats, k + 1, op, answer, before, after);
      before = after;
    }
  }
  std::cout.flush();
  return kOk;
}

// --- generate -------------------------------------------------------------

struct GenerateFlags {
  std::uint64_t seed = 1;
  std::uint32_t n = 0;
  std::size_t ops = 0;
  std::size_t prefill = 0;
  MixFlag mix;
  std::string topology = "random";
  std::string out = "-";
};

int generate_command(const GenerateFlags& f) {
  const Workload w =
      generate_workload(f.seed, f.n, f.ops, f.mix.parse(), parse_topology(f.topology), f.prefill);
  if (f.out == "-") {
    write_workload(std::cout, w);
    return kOk;
  }
  std::ofstream out(f.out);
  if (!out) {
    std::cerr << "cannot write " << f.out << '\n';
    return kIo;
  }
  write_workload(out, w);
  return out ? kOk : kIo;
}

// --- bench ----------------------------------------------------------------

struct BenchFlags {
  std::vector<std::uint32_t> sizes{1024, 4096, 16384, 65536};
  std::size_t reps = 1;
  std::size_t ops = 20000;
  double prefill = 2.0;  // random inserts per vertex before measuring
  MixFlag mix;
  std::string topology = "random";
  std::uint64_t seed = 1;
  EngineFlags engine;
  std::string out = "-";
};

struct BenchRow {
  double per_update = 0;
  double per_query = 0;
  double wall_us = 0;
};

BenchRow bench_one(const BenchFlags& f, std::uint32_t n, Variant variant) {
  BenchRow row;
  std::uint64_t updates = 0, queries = 0, work = 0, query_work = 0;
  double seconds = 0;
  for (std::size_t rep = 0; rep < f.reps; ++rep) {
    const auto prefill = static_cast<std::size_t>(f.prefill * n);
    const Workload w = generate_workload(f.seed + rep, n, f.ops, f.mix.parse(),
                                         parse_topology(f.topology), prefill);
    DynamicConnectivity dc(n, variant, f.engine.config());
    const std::size_t start = w.ops.size() - f.ops;
    for (std::size_t k = 0; k < start; ++k) dc.insert(w.ops[k].u, w.ops[k].v);
    const Counters c0 = dc.counters_snapshot();
    const auto t0 = std::chrono::steady_clock::now();
    for (std::size_t k = start; k < w.ops.size(); ++k) {
      const Op& op = w.ops[k];
      if (op.kind == OpKind::kInsert) dc.insert(op.u, op.v);
      if (op.kind == OpKind::kDelete) dc.remove(op.u, op.v);
      if (op.kind == OpKind::kQuery) dc.connected(op.u, op.v);
    }
    seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const Counters c1 = dc.counters_snapshot();
    updates += (c1.inserts - c0.inserts) + (c1.deletes - c0.deletes);
    queries += c1.queries - c0.queries;
    work += update_work(c1) - update_work(c0);
    query_work += c1.query_touched - c0.query_touched;
  }
  row.per_update = updates == 0 ? 0 : double(work) / double(updates);
  row.per_query = queries == 0 ? 0 : double(query_work) / double(queries);
  row.wall_us = 1e6 * seconds / double(f.reps * f.ops);
  return row;
}

double update_model(double n) {
  const double l = std::log2(n);
  return l * l / std::log2(l);
}
double query_model(double n) {
  const double l = std::log2(n);
  return l / std::log2(l);
}

int bench_command(const BenchFlags& f) {
  std::ofstream file;
  if (f.out != "-") {
    file.open(f.out);
    if (!file) {
      std::cerr << "cannot write " << f.out << '\n';
      return kIo;
    }
  }
  std::ostream& out = f.out == "-" ? std::cout : file;
  out << "# schema=1\n";
  out << "n,variant,reps,ops,touched_per_update,touched_per_query,wall_us_per_op,"
         "update_growth,update_growth_predicted,query_growth,query_growth_predicted\n";
  if (f.ops == 0 || f.reps == 0) return kOk;
  std::vector<std::string> variants{f.engine.variant};
  if (f.engine.variant == "both") variants = {"simple", "improved"};
  for (const std::string& name : variants) {
    std::optional<std::pair<std::uint32_t, BenchRow>> prev;
    for (std::uint32_t n : f.sizes) {
      const BenchRow row = bench_one(f, n, variant_of(name));
      out << n << ',' << name << ',' << f.reps << ',' << f.ops << ',' << row.per_update << ','
          << row.per_query << ',' << row.wall_us << ',';
      if (prev) {
        const double m = prev->first;
        out << row.per_update / prev->second.per_update << ','
            << update_model(n) / update_model(m) << ','
            << row.per_query / prev->second.per_query << ',' << query_model(n) / query_model(m);
      } else {
        out << ",,,";
      }
      out << '\n';
      out.flush();
      prev.emplace(n, row);
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  CLI::App app{"Fully dynamic connectivity: replay, generate and benchmark workloads"};
  app.require_subcommand(1);

  RunFlags run;
  CLI::App* run_cmd = app.add_subcommand("run", "replay a workload file, one 1/0 line per query");
  run_cmd->add_option("input", run.input, "workload file, - for stdin")->capture_default_str();
  run.engine.add(run_cmd, false);
  run_cmd->add_flag("--check-oracle", run.check_oracle, "compare every query with BFS");
  run_cmd->add_option("--validate-every", run.validate_every,
                      "run the structural validator every k ops (0 = never)");
  run_cmd->add_option("--stats", run.stats, "write per-op counter deltas as CSV");

  GenerateFlags gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "write a seeded random workload");
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "vertex count")->required()->check(CLI::PositiveNumber);
  gen_cmd->add_option("--ops", gen.ops, "operations after the prefill")->required();
  gen_cmd->add_option("--prefill", gen.prefill, "inserts emitted before the mixed ops")
      ->capture_default_str();
  gen_cmd->add_option("--mix", gen.mix.text, "insert,delete,query probabilities")
      ->capture_default_str();
  gen_cmd->add_option("--topology", gen.topology)
      ->check(CLI::IsMember({"random", "path", "cycle", "cliques-with-bridges", "mixed"}))
      ->capture_default_str();
  gen_cmd->add_option("-o,--out", gen.out, "output file, - for stdout")->capture_default_str();

  BenchFlags bench;
  CLI::App* bench_cmd = app.add_subcommand("bench", "measure nodes touched per op as n grows");
  bench_cmd->add_option("--sizes", bench.sizes, "vertex counts")->delimiter(',')
      ->capture_default_str();
  bench_cmd->add_option("--reps", bench.reps)->capture_default_str();
  bench_cmd->add_option("--ops", bench.ops, "measured ops per run")->capture_default_str();
  bench_cmd->add_option("--prefill", bench.prefill, "random inserts per vertex before measuring")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bench_cmd->add_option("--mix", bench.mix.text)->capture_default_str();
  bench_cmd->add_option("--topology", bench.topology)
      ->check(CLI::IsMember({"random", "path", "cycle", "cliques-with-bridges", "mixed"}))
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench.engine.variant = "both";
  bench.engine.add(bench_cmd, true);
  bench_cmd->add_option("-o,--out", bench.out, "CSV file, - for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*gen_cmd) gen.mix.parse();
    if (*bench_cmd) bench.mix.parse();
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  if (*run_cmd) return run_command(run);
  if (*gen_cmd) return generate_command(gen);
  return bench_command(bench);
}
