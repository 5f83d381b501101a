#pragma once

// Communication-avoiding decomposition of a task graph.
//
// For one macro-step, each processor p is given a target set (what it must
// produce) and an initial set l0 (data it already holds).  split() derives:
//
//   l4  tasks p can compute from its own data alone (no remote inputs)
//   l5  everything p touches while producing its targets
//   l1  the part of l4 some other processor wants (shipped out)
//   l2  the rest of l4 (pure local work, overlaps with communication)
//   l3  remote-owned data p needs: either received as a message or
//       recomputed locally (redundant work)
//
// blocked_transform() chains splits over groups of consecutive levels, so a
// graph executes in ceil(kmax/b) macro-steps with one communication phase
// each instead of one per level.

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cagraph/cover.hpp"
#include "cagraph/errors.hpp"
#include "cagraph/task_graph.hpp"

namespace cagraph {

struct ProcSplit {
  int proc = 0;
  TaskSet target; // tasks this processor must produce in the step
  TaskSet l0;     // data held when the step starts
  TaskSet l1;     // locally computed, needed by another processor
  TaskSet l2;     // locally computed, nobody else cares
  TaskSet l3;     // remote data needed: received or recomputed
  TaskSet l4;     // l1 + l2, everything computable from own data
  TaskSet l5;     // full working set (target plus its input cone)
  // sender -> elements delivered to this processor
  std::map<int, TaskSet> recv;

  TaskSet received() const;   // union of all recv sets
  TaskSet l3_compute() const; // the part of l3 recomputed locally
};

struct AvoidSplit {
  std::vector<ProcSplit> procs; // index == processor

  // Mirror view of recv: receiver -> elements processor p ships out.
  std::map<int, TaskSet> send(int p) const;
};

// Derive the six subsets per processor.  target[p] must be owned by p;
// initial[p] is whatever data p holds at step start.  When an element could
// be either received or recomputed, receiving wins; among several holders
// the lowest-numbered processor sends.
//
// Throws UnknownTask, TargetNotOwned, BadShape (vectors not sized nprocs),
// and Unreachable when some needed element can be neither received nor
// computed from the given initial data.
AvoidSplit split(const TaskGraph& g, const std::vector<TaskSet>& target,
                 const std::vector<TaskSet>& initial);

struct SplitViolation {
  std::string rule; // "a".."d" or "structure"
  int proc = 0;
  TaskIndex task = -1;
  std::string detail;
};

struct WellFormedness {
  bool ok = true;
  std::vector<SplitViolation> violations;
};

// Check a split (possibly hand-built or deserialized) against the rules that
// make it executable:
//   (a) l1/l2 tasks depend only on l0 + l4 (no synchronization points),
//   (b) every l3 task is received or recomputable from available data,
//   (c) target - l0 is covered by l1 + l2 + l3,
//   (d) no l2 task depends on l3 data,
// plus the structural subset invariants (l2 == l4 - l1, l1/l2/l3 disjoint,
// l0 and l4 inside l5, nobody receives their own tasks).
WellFormedness verify_well_formed(const TaskGraph& g, const AvoidSplit& s);

struct ProcRedundancy {
  int proc = 0;
  std::size_t native = 0;   // |target - l0|: work the processor owns
  std::size_t computed = 0; // |l1| + |l2| + |l3 recomputed|
  std::size_t redundant = 0;
  double ratio = 1.0; // computed / native
};

struct RedundancyReport {
  std::vector<ProcRedundancy> procs;
  std::size_t native = 0;
  std::size_t computed = 0;
  std::size_t redundant = 0;
  std::size_t duplicated = 0; // distinct tasks computed on >= 2 processors
  double ratio = 1.0;
};

// Redundant-work accounting.  Throws MalformedSplit if the split fails
// verify_well_formed.
RedundancyReport redundancy(const TaskGraph& g, const AvoidSplit& s);

struct MacroStepPlan {
  int block = 1;                // levels per macro-step
  std::vector<AvoidSplit> steps;
};

// Group the levels of a per-level cover into macro-steps of b levels and run
// split() on each, chaining: step s starts with everything a processor
// produced (or initially held) in steps < s.  The cover must be valid and
// leveled (block index == dependency depth).  Throws InvalidCover,
// BadBlockSize.
MacroStepPlan blocked_transform(const TaskGraph& g, const LevelCover& c, int b);

struct StepVolume {
  int step = 0;
  std::size_t messages = 0; // nonempty sender->receiver pairs
  std::size_t elements = 0; // total ids shipped
};

struct VolumeReport {
  std::vector<StepVolume> steps;
  std::size_t messages = 0;
  std::size_t elements = 0;
};

VolumeReport communicated_volume(const MacroStepPlan& plan);

struct OverlapBreak {
  int step = 0;
  int from = 0;
  int to = 0;
  TaskIndex element = -1;
};

struct PlanOverlap {
  bool ok = true;
  std::vector<OverlapBreak> witnesses;
};

// True when every communicated element is already held by its sender at the
// start of the step that ships it, i.e. all messages travel strictly between
// macro-steps and can be posted before any step computation begins.
PlanOverlap plan_overlap(const TaskGraph& g, const MacroStepPlan& plan);

// Graphviz renderings: the bare graph, and one processor's view of a split
// with a color class per subset.
std::string to_dot(const TaskGraph& g);
std::string to_dot(const TaskGraph& g, const AvoidSplit& s, int proc);

} // namespace cagraph
