#pragma once

// Canonical graph builders: the 1D stencil family every analysis in this
// project is exercised on, its natural per-level cover, and a seeded random
// DAG source for property tests.

#include <cstdint>

#include "cagraph/cover.hpp"
#include "cagraph/task_graph.hpp"

namespace cagraph {

enum class Boundary { dirichlet, periodic };

// One task per (point i, time level t), t in 0..steps, named "(i,t)".
// A task at level t >= 1 reads (j, t-1) for |j - i| <= radius, clipped at the
// ends for dirichlet and wrapped for periodic.  Point i lives on processor
// floor(i * procs / points), giving contiguous blocks balanced within one
// point.  Level-0 tasks are zero-weight sources: initial conditions modeled
// as tasks so that held-data sets are ordinary task sets.
//
// Throws BadShape when points/procs/steps/radius < 1, procs > points, or a
// periodic radius wraps onto itself (radius >= points).
TaskGraph stencil_1d(int points, int procs, int steps, int radius,
                     Boundary boundary = Boundary::dirichlet);

// The one-level-per-k cover: block (k,p) holds processor p's tasks at
// dependency depth k (level 0 included).  Blocks a processor is idle in are
// left out of the mapping.
LevelCover per_level_cover(const TaskGraph& g);

// Seeded random DAG: n tasks "t0".."tN" (zero-padded), edges only from lower
// to higher index, processors drawn uniformly.  Identical output for
// identical arguments on any platform.
TaskGraph random_dag(int n, double p_edge, int procs, std::uint64_t seed);

} // namespace cagraph
