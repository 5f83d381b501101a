#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cagraph/errors.hpp"

namespace cagraph {

// Tasks are referred to by dense indices once a graph is built.  Index order
// is lexicographic order of the task ids, so "iterate 0..size()" is the
// deterministic iteration order used everywhere in the library.
using TaskIndex = std::int32_t;

// A set of tasks: sorted, duplicate-free vector of indices.
using TaskSet = std::vector<TaskIndex>;

struct Task {
  std::string id;
  int proc = 0;
  double weight = 1.0;
  std::string label; // optional free text, e.g. "(point,level)" for stencils
};

// Immutable dependency graph of tasks distributed over processors.
// Construction validates everything once; all queries are const and cheap.
class TaskGraph {
public:
  // Validates ids, processor indices and acyclicity, sorts tasks by id and
  // rewrites edges to dense indices.  Duplicate edges are collapsed.
  static TaskGraph build(std::vector<Task> tasks,
                         const std::vector<std::pair<std::string, std::string>>& edges,
                         int nprocs);

  int size() const { return static_cast<int>(tasks_.size()); }
  int nprocs() const { return nprocs_; }
  std::size_t num_edges() const { return num_edges_; }

  const Task& task(TaskIndex t) const { return tasks_[check(t)]; }
  TaskIndex index_of(std::string_view id) const;
  bool contains(std::string_view id) const;

  const std::vector<TaskIndex>& preds(TaskIndex t) const { return preds_[check(t)]; }
  const std::vector<TaskIndex>& succs(TaskIndex t) const { return succs_[check(t)]; }

  // Dependency depth: 0 for sources, else 1 + max over predecessors.
  int level(TaskIndex t) const { return levels_[check(t)]; }
  int max_level() const { return max_level_; }

  // Tasks owned by processor p (C_p), sorted by index.
  const TaskSet& tasks_of(int proc) const;

  // Indices in a deterministic topological order: sorted by (level, id).
  const std::vector<TaskIndex>& topo_order() const { return topo_; }

  // Convenience for tests and bindings.
  TaskSet set_of(const std::vector<std::string>& ids) const;
  std::vector<std::string> ids_of(const TaskSet& s) const;

private:
  TaskIndex check(TaskIndex t) const;

  int nprocs_ = 1;
  std::size_t num_edges_ = 0;
  int max_level_ = 0;
  std::vector<Task> tasks_;
  std::vector<std::vector<TaskIndex>> preds_, succs_;
  std::vector<int> levels_;
  std::vector<TaskIndex> topo_;
  std::vector<TaskSet> by_proc_;
  std::unordered_map<std::string, TaskIndex> index_;
};

// --- primitive queries -------------------------------------------------------

// Immediate predecessors of t as a set.
TaskSet immediate_predecessors(const TaskGraph& g, TaskIndex t);

// Synchronization points of t: immediate predecessors owned by another
// processor.  Empty iff t depends only on local data.
TaskSet sync_points(const TaskGraph& g, TaskIndex t);

// Base of a set L: the tasks in L with at least one predecessor outside L.
// These are exactly the entry points where outside data is consumed.
TaskSet base(const TaskGraph& g, const TaskSet& L);

// Reflexive-transitive predecessor closure of S.
TaskSet pred_closure(const TaskGraph& g, const TaskSet& S);

// Closure that does not expand predecessors of tasks in `stop` (the stopped
// tasks themselves still enter the result when reached).  Used when part of
// the graph is already-available data rather than pending computation.
TaskSet pred_closure(const TaskGraph& g, const TaskSet& S, const TaskSet& stop);

// Dependency depth of every task (same values as TaskGraph::level).
std::vector<int> topological_levels(const TaskGraph& g);

// --- sorted-set algebra ------------------------------------------------------

TaskSet set_union(const TaskSet& a, const TaskSet& b);
TaskSet set_minus(const TaskSet& a, const TaskSet& b);
TaskSet set_intersect(const TaskSet& a, const TaskSet& b);
bool set_contains(const TaskSet& s, TaskIndex t);
void set_insert(TaskSet& s, TaskIndex t);

} // namespace cagraph
