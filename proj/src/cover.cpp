#include "cagraph/cover.hpp"

#include <algorithm>
#include <limits>

namespace cagraph {

int LevelCover::kmax() const {
  int k = 0;
  for (const auto& [key, tasks] : blocks) k = std::max(k, key.first);
  return k;
}

const TaskSet& LevelCover::block(int k, int p) const {
  auto it = blocks.find({k, p});
  if (it == blocks.end())
    throw UnknownTask("cover has no block (k=" + std::to_string(k) +
                      ", p=" + std::to_string(p) + ")");
  return it->second;
}

namespace {

// Step index of every covered task, or -1.  Throws on the hard structural
// defects (foreign indices, one processor claiming a task in two steps).
std::vector<int> step_of_task(const TaskGraph& g, const LevelCover& c,
                              std::vector<int>* claimed_by = nullptr) {
  std::vector<int> step(g.size(), -1);
  std::vector<int> owner(g.size(), -1);
  for (const auto& [key, tasks] : c.blocks) {
    auto [k, p] = key;
    if (p < 0 || p >= g.nprocs())
      throw BadProc("cover block uses processor " + std::to_string(p));
    for (TaskIndex t : tasks) {
      g.task(t); // UnknownTask on bad index
      if (owner[t] == p)
        throw OverlappingBlocks("task '" + g.task(t).id +
                                "' appears in two blocks of processor " + std::to_string(p));
      if (owner[t] == -1) {
        owner[t] = p;
        step[t] = k;
      }
      // Two *different* processors claiming one task is a condition-1
      // violation reported by validate_cover, not a structural error.
    }
  }
  if (claimed_by) *claimed_by = owner;
  return step;
}

std::vector<CoverViolation> find_violations(const TaskGraph& g, const LevelCover& c,
                                            const std::vector<int>& step,
                                            const std::vector<int>& claimed_by) {
  std::vector<CoverViolation> out;
  auto add = [&](int cond, TaskIndex task, TaskIndex witness, std::string detail) {
    out.push_back({cond, task, witness, std::move(detail)});
  };

  // Condition 1: per-processor union is exactly C_p.
  for (const auto& [key, tasks] : c.blocks) {
    const int p = key.second;
    for (TaskIndex t : tasks) {
      if (g.task(t).proc != p)
        add(1, t, t,
            "task '" + g.task(t).id + "' owned by processor " +
                std::to_string(g.task(t).proc) + " listed in a block of processor " +
                std::to_string(p));
      else if (claimed_by[t] != p)
        add(1, t, t, "task '" + g.task(t).id + "' claimed by two processors");
    }
  }
  for (TaskIndex t = 0; t < g.size(); ++t)
    if (step[t] < 0)
      add(1, t, t, "task '" + g.task(t).id + "' not covered by any block");

  // Conditions 2 and 3, one (smallest-index) witness per violating task.
  for (TaskIndex t = 0; t < g.size(); ++t) {
    if (step[t] < 0) continue;
    TaskIndex w2 = -1, w3 = -1;
    for (TaskIndex pr : g.preds(t)) {
      if (step[pr] < 0) continue; // already reported under condition 1
      if (step[pr] > step[t] && w2 < 0) w2 = pr;
      if (g.task(pr).proc != g.task(t).proc && step[pr] > step[t] - 1 && w3 < 0) w3 = pr;
    }
    if (w2 >= 0)
      add(2, t, w2,
          "predecessor '" + g.task(w2).id + "' of '" + g.task(t).id + "' sits in a later step");
    if (w3 >= 0)
      add(3, t, w3,
          "remote predecessor '" + g.task(w3).id + "' of '" + g.task(t).id +
              "' is not at least one step earlier");
  }

  std::sort(out.begin(), out.end(), [&](const CoverViolation& a, const CoverViolation& b) {
    if (a.condition != b.condition) return a.condition < b.condition;
    if (a.task != b.task) return g.task(a.task).id < g.task(b.task).id;
    return a.witness < b.witness;
  });
  return out;
}

// Assumes a valid cover: remote base predecessors sit at distance >= 1, so
// the only way to miss the overlap condition is distance exactly k-1.
OverlapResult overlap_impl(const TaskGraph& g, const LevelCover& c, const std::vector<int>& step) {
  OverlapResult res;
  res.ok = true;
  for (const auto& [key, tasks] : c.blocks) {
    auto [k, p] = key;
    for (TaskIndex t : base(g, tasks)) {
      for (TaskIndex pr : g.preds(t)) {
        if (g.task(pr).proc == p) continue;
        if (step[pr] == k - 1) {
          res.ok = false;
          res.witnesses.push_back({k, p, t, pr});
        }
      }
    }
  }
  return res;
}

void require_valid(const TaskGraph& g, const LevelCover& c, const std::vector<int>& step,
                   const std::vector<int>& claimed_by, const char* who) {
  auto v = find_violations(g, c, step, claimed_by);
  if (!v.empty())
    throw InvalidCover(std::string(who) + " needs a valid cover: " + v.front().detail);
}

} // namespace

CoverReport validate_cover(const TaskGraph& g, const LevelCover& c) {
  CoverReport rep;
  std::vector<int> claimed_by;
  std::vector<int> step = step_of_task(g, c, &claimed_by);
  rep.violations = find_violations(g, c, step, claimed_by);
  rep.valid = rep.violations.empty();
  rep.granularity = c.blocks.empty() ? 0 : granularity(c);
  rep.overlap_ok = rep.valid && overlap_impl(g, c, step).ok;
  return rep;
}

std::map<std::pair<int, int>, TaskSet> bases_of_cover(const TaskGraph& g, const LevelCover& c) {
  std::map<std::pair<int, int>, TaskSet> out;
  for (const auto& [key, tasks] : c.blocks) out[key] = base(g, tasks);
  return out;
}

std::size_t granularity(const LevelCover& c) {
  if (c.blocks.empty()) throw EmptyCover("granularity of an empty cover");
  std::size_t m = std::numeric_limits<std::size_t>::max();
  for (const auto& [key, tasks] : c.blocks) m = std::min(m, tasks.size());
  return m;
}

OverlapResult check_overlap_condition(const TaskGraph& g, const LevelCover& c) {
  std::vector<int> claimed_by;
  std::vector<int> step = step_of_task(g, c, &claimed_by);
  require_valid(g, c, step, claimed_by, "check_overlap_condition");
  return overlap_impl(g, c, step);
}

bool independent_executability(const TaskGraph& g, const LevelCover& c, int k) {
  std::vector<int> claimed_by;
  std::vector<int> step = step_of_task(g, c, &claimed_by);
  require_valid(g, c, step, claimed_by, "independent_executability");

  for (const auto& [key, tasks] : c.blocks) {
    if (key.first != k) continue;
    const int p = key.second;
    for (TaskIndex t : tasks)
      for (TaskIndex pr : g.preds(t))
        if (g.task(pr).proc != p && step[pr] >= k) return false;
  }
  return true;
}

} // namespace cagraph
