#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "cagraph/task_graph.hpp"

namespace cagraph {

// A two-parameter covering of the graph: block (k,p) holds the tasks
// processor p executes in step k.  A well-formed cover partitions each
// processor's tasks across k and respects dependency order:
//   (1) union over k of block (k,p) equals C_p, blocks disjoint per p
//   (2) a predecessor of a task in step k sits in a step <= k
//   (3) a *remote* predecessor sits in a step <= k-1
struct LevelCover {
  std::map<std::pair<int, int>, TaskSet> blocks; // (k, p) -> tasks

  int kmax() const;
  bool has(int k, int p) const { return blocks.count({k, p}) != 0; }
  const TaskSet& block(int k, int p) const;
};

struct CoverViolation {
  int condition = 0;     // 1, 2 or 3 as above
  TaskIndex task = -1;   // the offending task
  TaskIndex witness = -1; // smallest witness predecessor (or the task itself for 1)
  std::string detail;
};

struct CoverReport {
  bool valid = false;
  std::vector<CoverViolation> violations;
  std::size_t granularity = 0; // min block size, 0 when the cover is empty
  bool overlap_ok = false;     // the stricter step-(k-2) condition below
};

// Checks conditions (1)-(3).  Throws UnknownTask for foreign indices and
// OverlappingBlocks when one processor lists a task in two steps; softer
// defects are returned as violations.  granularity/overlap_ok are filled in
// so one call gives the complete picture of a cover.
CoverReport validate_cover(const TaskGraph& g, const LevelCover& c);

// base() of every block, keyed like the cover.
std::map<std::pair<int, int>, TaskSet> bases_of_cover(const TaskGraph& g, const LevelCover& c);

// Smallest block size over all present blocks; empty blocks count as 0.
std::size_t granularity(const LevelCover& c);

struct OverlapWitness {
  int k = 0, p = 0;
  TaskIndex task = -1;    // base task of block (k,p)
  TaskIndex witness = -1; // remote predecessor sitting at step k-1
};

struct OverlapResult {
  bool ok = false;
  std::vector<OverlapWitness> witnesses; // the distance-(k-1) offenders
};

// Sufficient condition for communication/computation overlap: every remote
// predecessor of a block's base lies at least two steps back.  Requires a
// valid cover (InvalidCover otherwise).  A valid cover can only miss this by
// distance exactly k-1, so the witnesses list those dependencies.
OverlapResult check_overlap_condition(const TaskGraph& g, const LevelCover& c);

// True iff the blocks of step k can run in any interleaving once steps < k
// are done: every predecessor of a step-k task is local or sits in an
// earlier step.  Requires a valid cover (InvalidCover otherwise).
bool independent_executability(const TaskGraph& g, const LevelCover& c, int k);

} // namespace cagraph
