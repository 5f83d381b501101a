#include "cagraph/task_graph.hpp"

#include <algorithm>
#include <deque>

namespace cagraph {

TaskGraph TaskGraph::build(std::vector<Task> tasks,
                           const std::vector<std::pair<std::string, std::string>>& edges,
                           int nprocs) {
  if (nprocs < 1)
    throw BadProc("nprocs must be >= 1, got " + std::to_string(nprocs));

  TaskGraph g;
  g.nprocs_ = nprocs;
  std::sort(tasks.begin(), tasks.end(),
            [](const Task& a, const Task& b) { return a.id < b.id; });
  g.tasks_ = std::move(tasks);

  const int n = g.size();
  g.index_.reserve(g.tasks_.size());
  for (TaskIndex i = 0; i < n; ++i) {
    const Task& t = g.tasks_[i];
    if (t.proc < 0 || t.proc >= nprocs)
      throw BadProc("task '" + t.id + "' assigned to processor " +
                    std::to_string(t.proc) + " but nprocs is " + std::to_string(nprocs));
    if (t.weight < 0)
      throw Error("task '" + t.id + "' has negative weight");
    if (!g.index_.emplace(t.id, i).second)
      throw DuplicateId("duplicate task id '" + t.id + "'");
  }

  g.preds_.assign(n, {});
  g.succs_.assign(n, {});
  for (const auto& [from, to] : edges) {
    auto fi = g.index_.find(from);
    auto ti = g.index_.find(to);
    if (fi == g.index_.end())
      throw DanglingEdge("edge references unknown task '" + from + "'");
    if (ti == g.index_.end())
      throw DanglingEdge("edge references unknown task '" + to + "'");
    g.preds_[ti->second].push_back(fi->second);
    g.succs_[fi->second].push_back(ti->second);
  }
  g.num_edges_ = 0;
  for (TaskIndex i = 0; i < n; ++i) {
    auto dedupe = [](std::vector<TaskIndex>& v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    };
    dedupe(g.preds_[i]);
    dedupe(g.succs_[i]);
    g.num_edges_ += g.preds_[i].size();
  }

  // Kahn's algorithm gives levels and detects cycles in one pass.
  g.levels_.assign(n, 0);
  std::vector<int> remaining(n);
  std::deque<TaskIndex> ready;
  for (TaskIndex i = 0; i < n; ++i) {
    remaining[i] = static_cast<int>(g.preds_[i].size());
    if (remaining[i] == 0) ready.push_back(i);
  }
  int done = 0;
  while (!ready.empty()) {
    TaskIndex t = ready.front();
    ready.pop_front();
    ++done;
    for (TaskIndex s : g.succs_[t]) {
      g.levels_[s] = std::max(g.levels_[s], g.levels_[t] + 1);
      if (--remaining[s] == 0) ready.push_back(s);
    }
  }
  if (done != n) {
    // Walk the unfinished part until a vertex repeats; that vertex is on a cycle.
    TaskIndex at = 0;
    while (remaining[at] == 0) ++at;
    std::vector<char> seen(n, 0);
    while (!seen[at]) {
      seen[at] = 1;
      for (TaskIndex p : g.preds_[at])
        if (remaining[p] > 0) { at = p; break; }
    }
    throw CycleError("dependency cycle through task '" + g.tasks_[at].id + "'");
  }

  g.max_level_ = 0;
  for (int l : g.levels_) g.max_level_ = std::max(g.max_level_, l);

  g.topo_.resize(n);
  for (TaskIndex i = 0; i < n; ++i) g.topo_[i] = i;
  std::stable_sort(g.topo_.begin(), g.topo_.end(),
                   [&](TaskIndex a, TaskIndex b) { return g.levels_[a] < g.levels_[b]; });

  g.by_proc_.assign(nprocs, {});
  for (TaskIndex i = 0; i < n; ++i) g.by_proc_[g.tasks_[i].proc].push_back(i);
  return g;
}

TaskIndex TaskGraph::check(TaskIndex t) const {
  if (t < 0 || t >= size())
    throw UnknownTask("task index " + std::to_string(t) + " out of range");
  return t;
}

TaskIndex TaskGraph::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end())
    throw UnknownTask("unknown task id '" + std::string(id) + "'");
  return it->second;
}

bool TaskGraph::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

const TaskSet& TaskGraph::tasks_of(int proc) const {
  if (proc < 0 || proc >= nprocs_)
    throw BadProc("processor " + std::to_string(proc) + " out of range");
  return by_proc_[proc];
}

TaskSet TaskGraph::set_of(const std::vector<std::string>& ids) const {
  TaskSet s;
  s.reserve(ids.size());
  for (const auto& id : ids) s.push_back(index_of(id));
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::vector<std::string> TaskGraph::ids_of(const TaskSet& s) const {
  std::vector<std::string> out;
  out.reserve(s.size());
  for (TaskIndex t : s) out.push_back(task(t).id);
  return out;
}

TaskSet immediate_predecessors(const TaskGraph& g, TaskIndex t) {
  return g.preds(t); // already sorted and unique
}

TaskSet sync_points(const TaskGraph& g, TaskIndex t) {
  TaskSet out;
  const int p = g.task(t).proc;
  for (TaskIndex q : g.preds(t))
    if (g.task(q).proc != p) out.push_back(q);
  return out;
}

TaskSet base(const TaskGraph& g, const TaskSet& L) {
  TaskSet out;
  for (TaskIndex t : L) {
    g.task(t); // range check -> UnknownTask
    for (TaskIndex p : g.preds(t)) {
      if (!set_contains(L, p)) {
        out.push_back(t);
        break;
      }
    }
  }
  return out;
}

static TaskSet closure_impl(const TaskGraph& g, const TaskSet& S, const TaskSet* stop) {
  std::vector<char> in(g.size(), 0);
  std::vector<TaskIndex> stack;
  for (TaskIndex t : S) {
    g.task(t);
    if (!in[t]) { in[t] = 1; stack.push_back(t); }
  }
  while (!stack.empty()) {
    TaskIndex t = stack.back();
    stack.pop_back();
    if (stop && set_contains(*stop, t)) continue; // already-available data
    for (TaskIndex p : g.preds(t))
      if (!in[p]) { in[p] = 1; stack.push_back(p); }
  }
  TaskSet out;
  for (TaskIndex i = 0; i < g.size(); ++i)
    if (in[i]) out.push_back(i);
  return out;
}

TaskSet pred_closure(const TaskGraph& g, const TaskSet& S) {
  return closure_impl(g, S, nullptr);
}

TaskSet pred_closure(const TaskGraph& g, const TaskSet& S, const TaskSet& stop) {
  return closure_impl(g, S, &stop);
}

std::vector<int> topological_levels(const TaskGraph& g) {
  std::vector<int> out(g.size());
  for (TaskIndex i = 0; i < g.size(); ++i) out[i] = g.level(i);
  return out;
}

TaskSet set_union(const TaskSet& a, const TaskSet& b) {
  TaskSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

TaskSet set_minus(const TaskSet& a, const TaskSet& b) {
  TaskSet out;
  out.reserve(a.size());
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

TaskSet set_intersect(const TaskSet& a, const TaskSet& b) {
  TaskSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool set_contains(const TaskSet& s, TaskIndex t) {
  return std::binary_search(s.begin(), s.end(), t);
}

void set_insert(TaskSet& s, TaskIndex t) {
  auto it = std::lower_bound(s.begin(), s.end(), t);
  if (it == s.end() || *it != t) s.insert(it, t);
}

} // namespace cagraph
