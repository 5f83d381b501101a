#pragma once

// Runtime estimation for per-level (naive) and macro-step (blocked)
// executions under an alpha-beta message cost model, plus the event-driven
// oracle the phase model is cross-checked against.
//
// The phase model charges a macro-step as
//
//     k1 + max(k2, receive) + k3
//
// per processor: ship the l1 boundary, compute l2 while messages fly, then
// finish the halo work.  Steps end with a global barrier (max over
// processors).  receive = alpha (if anything arrives) + beta * elements.

#include <cstddef>
#include <string>
#include <vector>

#include "cagraph/avoid.hpp"
#include "cagraph/cover.hpp"
#include "cagraph/errors.hpp"
#include "cagraph/task_graph.hpp"

namespace cagraph {

struct CostModel {
  double alpha = 0.0; // message latency, in unit-task time
  double beta = 0.0;  // per-element transfer cost
  int threads = 1;    // worker threads per processor node
  int nodes = 1;      // processor count, must match the graph
};

// Time to run the tasks of s on `threads` workers: level the induced
// subgraph by internal dependency depth and sum ceil(level weight / threads).
// Deliberately level-synchronous — deterministic and cheap, not an optimal
// makespan.
double parallel_time(const TaskGraph& g, const TaskSet& s, int threads);

struct PhaseRow {
  int step = 0;
  int proc = 0;
  std::size_t k1_tasks = 0;
  double k1_pt = 0.0;
  std::size_t recv_elems = 0;
  double recv_time = 0.0;
  std::size_t k2_tasks = 0;
  double k2_pt = 0.0;
  std::size_t k3_tasks = 0;
  double k3_pt = 0.0;
  double stall = 0.0;      // max(0, recv_time - k2_pt): latency not hidden
  double step_total = 0.0; // k1_pt + max(k2_pt, recv_time) + k3_pt
};

struct PhaseTrace {
  std::vector<PhaseRow> rows;       // ordered by (step, proc)
  std::vector<double> step_totals;  // per step, after combining processors
  double total = 0.0;               // sum of step_totals
};

// Phase-model cost of a macro-step plan.  The plan must pass
// verify_well_formed (throws MalformedPlan otherwise); the model must match
// the graph (BadShape on nodes/threads/alpha/beta out of range).
PhaseTrace simulate_blocked(const MacroStepPlan& plan, const TaskGraph& g, const CostModel& m);

// Baseline: one unoverlapped message phase per level.  Level k costs
// alpha * [any cross-processor edge into k] + beta * max_p(incoming elements)
// + max_p parallel_time(block).  Rows carry the per-processor receive and
// compute figures with empty k1/k2 slots.  Throws InvalidCover.
PhaseTrace simulate_naive(const LevelCover& c, const TaskGraph& g, const CostModel& m);

// Pretty-print in the trace layout simulations are reported in: one section
// per node ("Graph on node 0, ..."), phase lines per macro-step, a
// "total parallel time : S*(a+b+c) = T" summary and the overlap footer,
// then one combined-total line.
std::string format_trace(const PhaseTrace& t);

// Shortest decimal form that reads back exactly; integral values print
// without a fraction part.
std::string format_number(double v);

// ---- event-driven oracle ----------------------------------------------

// One message: a batch of elements shipped together from one processor to
// another, at the earliest when `earliest_send` has passed and the sender
// holds every element.  Arrival is departure + alpha + beta * batch size.
struct OracleMessage {
  TaskSet elements;
  int from = 0;
  int to = 0;
  double earliest_send = 0.0;
};

// Discrete-event execution with in-order issue: each processor starts its
// listed tasks strictly in list order, a task launching as soon as it is at
// the head of the remaining list, a thread is free, and every predecessor is
// locally available (own initial data at t=0, computed at completion,
// received at arrival).  Issue never skips past a blocked entry, so earlier
// input availability can only move starts earlier, never reshuffle them —
// which keeps relaxations of a schedule from back-firing into longer
// makespans.  Lists must order each task after its in-list predecessors.
// Returns the makespan.  Throws Deadlock naming the stuck tasks when
// progress stops early (unsatisfiable inputs or a misordered list).
double event_sim_oracle(const TaskGraph& g, const std::vector<std::vector<TaskIndex>>& schedule,
                        const std::vector<OracleMessage>& comm, const CostModel& m);

// Replay a plan through an event simulation with phase boundaries enforced
// (level batches inside each phase, receive charged after the local k1,
// global barrier per step).  On unit-weight graphs this reproduces
// simulate_blocked exactly, by an independent mechanism.
double phased_oracle_time(const TaskGraph& g, const MacroStepPlan& plan, const CostModel& m);

// Same plan, no barriers: tasks release as their inputs land, every element
// travels as its own message as soon as the sender has it.  Each processor
// keeps the plan's k1, k2, k3 order (dependency waves within each kernel),
// so this is the phased schedule with the waiting removed; the result never
// exceeds the phase-model total.
double eager_oracle_time(const TaskGraph& g, const MacroStepPlan& plan, const CostModel& m);

// ---- transfer descriptors ----------------------------------------------

// Send/receive bookkeeping for a plan: one descriptor per communicated
// element, posted at the macro-step where its producer completes (step 0 for
// initial data), consumed where the receiver uses it.  Buffer space is
// charged on the receiver for the whole [posted, consumed] interval.
struct TransferDescriptor {
  TaskIndex element = -1;
  int from = 0;
  int to = 0;
  int posted_step = 0;
  int consumed_step = 0;
};

struct TransferSchedule {
  std::vector<TransferDescriptor> descriptors; // sorted (posted, from, to, element)
  std::vector<std::size_t> peak_buffer;        // per receiving processor
  std::size_t peak = 0;                        // worst processor
};

TransferSchedule transfer_schedule(const MacroStepPlan& plan, const TaskGraph& g);

} // namespace cagraph
