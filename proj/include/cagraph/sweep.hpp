#pragma once

// Strong-scaling parameter sweeps: run the naive and blocked simulations of
// one fixed graph over grids of latency, block size, and thread count, and
// tabulate the totals for plotting.

#include <cstdint>
#include <string>
#include <vector>

#include "cagraph/simulate.hpp"

namespace cagraph {

struct SweepScenario {
  // Graph source: a generated stencil, a seeded random DAG, or a file.
  std::string kind = "stencil1d"; // "stencil1d" | "random" | "file"
  int points = 0;
  int procs = 1;
  int steps = 1;
  int radius = 1;
  std::string boundary = "dirichlet";
  int n = 0;
  double p_edge = 0.0;
  std::uint64_t seed = 0;
  std::string path;

  std::vector<int> b;         // block sizes for the blocked variant
  std::vector<double> alpha;  // latencies to sweep
  std::vector<int> threads;   // worker counts to sweep
  double beta = 0.0;
};

struct SweepRow {
  int threads = 1;
  double alpha = 0.0;
  std::string variant; // "naive" or "blocked"
  int block = 0;       // 0 for naive
  double total = 0.0;
};

struct SweepTable {
  SweepScenario scenario;
  std::vector<SweepRow> rows; // sorted by (alpha, variant, block, threads)
};

TaskGraph build_scenario_graph(const SweepScenario& sc);

// The full grid: every (alpha, threads) pair gets one naive row plus one
// blocked row per block size, all on the same graph and per-level cover.
SweepTable strong_scaling_sweep(const SweepScenario& sc);

// Columns file for one alpha: threads, the naive total, then one blocked
// column per block size — ready for plotting runtime against threads.
std::string gnuplot_columns(const SweepTable& t, double alpha);

} // namespace cagraph
