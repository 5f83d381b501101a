#include "cagraph/avoid.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace cagraph {

TaskSet ProcSplit::received() const {
  TaskSet out;
  for (const auto& [q, elems] : recv) out = set_union(out, elems);
  return out;
}

TaskSet ProcSplit::l3_compute() const { return set_minus(l3, received()); }

std::map<int, TaskSet> AvoidSplit::send(int p) const {
  std::map<int, TaskSet> out;
  for (int q = 0; q < static_cast<int>(procs.size()); ++q) {
    auto it = procs[q].recv.find(p);
    if (it != procs[q].recv.end() && !it->second.empty()) out[q] = it->second;
  }
  return out;
}

namespace {

std::vector<char> bitmap_of(const TaskGraph& g, const TaskSet& s) {
  std::vector<char> b(g.size(), 0);
  for (TaskIndex t : s) b[t] = 1;
  return b;
}

} // namespace

AvoidSplit split(const TaskGraph& g, const std::vector<TaskSet>& target,
                 const std::vector<TaskSet>& initial) {
  const int P = g.nprocs();
  if (static_cast<int>(target.size()) != P || static_cast<int>(initial.size()) != P)
    throw BadShape("split wants one target set and one initial set per processor (" +
                   std::to_string(P) + ")");
  for (int p = 0; p < P; ++p) {
    for (TaskIndex t : target[p])
      if (g.task(t).proc != p) // task() range-checks first
        throw TargetNotOwned("task '" + g.task(t).id + "' targeted on processor " +
                             std::to_string(p) + " but owned by processor " +
                             std::to_string(g.task(t).proc));
    for (TaskIndex t : initial[p]) g.task(t);
  }

  TaskSet all_initial;
  for (int p = 0; p < P; ++p) all_initial = set_union(all_initial, initial[p]);

  AvoidSplit s;
  s.procs.resize(P);

  // Pass 1: l4 and l5.  l1 of one processor looks at everyone else's l5, so
  // these must exist for all processors first.
  for (int p = 0; p < P; ++p) {
    ProcSplit& ps = s.procs[p];
    ps.proc = p;
    ps.target = target[p];
    ps.l0 = initial[p];

    // l4: least fixed point of "all inputs in l0 or already in l4" over the
    // step's targets, grown along successor edges.
    std::vector<char> held = bitmap_of(g, ps.l0);
    std::vector<char> in_target = bitmap_of(g, ps.target);
    std::vector<char> in_l4(g.size(), 0);
    std::vector<int> missing(g.size(), 0);
    std::deque<TaskIndex> ready;
    for (TaskIndex t : ps.target) {
      int m = 0;
      for (TaskIndex pr : g.preds(t))
        if (!held[pr]) ++m;
      missing[t] = m;
      if (m == 0) ready.push_back(t);
    }
    while (!ready.empty()) {
      TaskIndex t = ready.front();
      ready.pop_front();
      if (in_l4[t]) continue;
      in_l4[t] = 1;
      if (held[t]) continue; // successors never counted it as missing
      for (TaskIndex su : g.succs(t))
        if (in_target[su] && !in_l4[su] && --missing[su] == 0) ready.push_back(su);
    }
    for (TaskIndex t : ps.target) // target is sorted, so l4 comes out sorted
      if (in_l4[t]) ps.l4.push_back(t);

    // l5: the targets plus their input cone, cut off at data some processor
    // already holds — held elements join the working set, their history
    // does not.
    ps.l5 = set_union(pred_closure(g, ps.target, all_initial), ps.l0);
  }

  // Pass 2: l1 = the locally computable tasks someone else's working set
  // touches; l2 is the rest of l4.
  for (int p = 0; p < P; ++p) {
    ProcSplit& ps = s.procs[p];
    TaskSet others_l5;
    for (int q = 0; q < P; ++q)
      if (q != p) others_l5 = set_union(others_l5, s.procs[q].l5);
    ps.l1 = set_minus(set_intersect(ps.l4, others_l5), ps.l0);
    ps.l2 = set_minus(ps.l4, ps.l1);
  }

  // Pass 3: l3 and the message sets.
  for (int p = 0; p < P; ++p) {
    ProcSplit& ps = s.procs[p];
    TaskSet others_l1;
    for (int q = 0; q < P; ++q)
      if (q != p) others_l1 = set_union(others_l1, s.procs[q].l1);
    ps.l3 = set_minus(set_minus(set_minus(ps.l5, ps.l4), ps.l0), others_l1);

    // Receiving beats recomputing; among several holders the lowest-numbered
    // processor sends.  Own tasks are never received.
    for (TaskIndex e : set_minus(ps.l5, ps.l0)) {
      if (g.task(e).proc == p) continue;
      for (int q = 0; q < P; ++q) {
        if (q == p) continue;
        if (set_contains(s.procs[q].l1, e) || set_contains(s.procs[q].l0, e)) {
          ps.recv[q].push_back(e); // ascending e keeps each set sorted
          break;
        }
      }
    }
  }

  // Every element of the working set must now be obtainable: held, received,
  // or computable in dependency order.  Bare sources are initial conditions —
  // data, not computations — so they count as computable only when the
  // processor claimed them as targets (l4).
  for (int p = 0; p < P; ++p) {
    ProcSplit& ps = s.procs[p];
    std::vector<char> avail = bitmap_of(g, set_union(ps.l0, ps.received()));
    std::vector<char> in_l5 = bitmap_of(g, ps.l5);
    std::vector<char> in_l4 = bitmap_of(g, ps.l4);
    for (TaskIndex t : g.topo_order()) {
      if (!in_l5[t] || avail[t]) continue;
      if (g.preds(t).empty() && !in_l4[t]) continue;
      bool ok = true;
      for (TaskIndex pr : g.preds(t))
        if (!avail[pr]) {
          ok = false;
          break;
        }
      if (ok) avail[t] = 1;
    }
    for (TaskIndex t : ps.l5)
      if (!avail[t])
        throw Unreachable("element '" + g.task(t).id + "' of processor " + std::to_string(p) +
                          "'s working set is neither received nor computable from its "
                          "step-initial data");
  }

  return s;
}

namespace {

void add_violation(WellFormedness& w, std::string rule, int proc, TaskIndex task,
                   std::string detail) {
  w.violations.push_back({std::move(rule), proc, task, std::move(detail)});
  w.ok = false;
}

} // namespace

WellFormedness verify_well_formed(const TaskGraph& g, const AvoidSplit& s) {
  WellFormedness w;
  if (static_cast<int>(s.procs.size()) != g.nprocs()) {
    add_violation(w, "structure", -1, -1,
                  "split has " + std::to_string(s.procs.size()) +
                      " processor entries, graph has " + std::to_string(g.nprocs()));
    return w;
  }

  auto in_range = [&](TaskIndex t) { return t >= 0 && t < g.size(); };

  for (int p = 0; p < g.nprocs(); ++p) {
    const ProcSplit& ps = s.procs[p];
    if (ps.proc != p) {
      add_violation(w, "structure", p, -1,
                    "entry " + std::to_string(p) + " labels itself processor " +
                        std::to_string(ps.proc));
      continue;
    }
    bool indices_ok = true;
    auto check_ids = [&](const TaskSet& set, const char* name) {
      for (TaskIndex t : set)
        if (!in_range(t)) {
          add_violation(w, "structure", p, t,
                        std::string(name) + " of processor " + std::to_string(p) +
                            " references a task outside the graph");
          indices_ok = false;
        }
    };
    check_ids(ps.target, "target");
    check_ids(ps.l0, "l0");
    check_ids(ps.l1, "l1");
    check_ids(ps.l2, "l2");
    check_ids(ps.l3, "l3");
    check_ids(ps.l4, "l4");
    check_ids(ps.l5, "l5");
    for (const auto& [q, elems] : ps.recv) {
      if (q < 0 || q >= g.nprocs() || q == p) {
        add_violation(w, "structure", p, -1,
                      "recv entry from processor " + std::to_string(q) + " makes no sense");
        indices_ok = false;
        continue;
      }
      check_ids(elems, "recv");
    }
    if (!indices_ok) continue;

    // Subset shape invariants.
    if (ps.l2 != set_minus(ps.l4, ps.l1))
      add_violation(w, "structure", p, -1, "l2 differs from l4 minus l1");
    for (TaskIndex t : ps.l1)
      if (!set_contains(ps.l4, t))
        add_violation(w, "structure", p, t, "l1 task '" + g.task(t).id + "' missing from l4");
    for (TaskIndex t : ps.l4)
      if (!set_contains(ps.l5, t))
        add_violation(w, "structure", p, t, "l4 task '" + g.task(t).id + "' missing from l5");
    for (TaskIndex t : ps.l0)
      if (!set_contains(ps.l5, t))
        add_violation(w, "structure", p, t, "l0 element '" + g.task(t).id + "' missing from l5");
    if (!set_intersect(ps.l1, ps.l3).empty() || !set_intersect(ps.l2, ps.l3).empty())
      add_violation(w, "structure", p, -1, "l3 overlaps l1 or l2");
    for (const auto& [q, elems] : ps.recv) {
      for (TaskIndex e : elems) {
        if (g.task(e).proc == p)
          add_violation(w, "structure", p, e,
                        "processor " + std::to_string(p) + " receives its own task '" +
                            g.task(e).id + "'");
        const ProcSplit& sender = s.procs[q];
        if (!set_contains(sender.l4, e) && !set_contains(sender.l0, e))
          add_violation(w, "structure", p, e,
                        "sender " + std::to_string(q) + " neither holds nor computes '" +
                            g.task(e).id + "'");
      }
    }

    const TaskSet got = ps.received();
    std::vector<char> in_l0_l4 = bitmap_of(g, set_union(ps.l0, ps.l4));
    std::vector<char> in_l3 = bitmap_of(g, ps.l3);

    // (a) no synchronization points in the locally-computed subsets.
    for (TaskIndex t : set_union(ps.l1, ps.l2)) {
      for (TaskIndex pr : g.preds(t))
        if (!in_l0_l4[pr]) {
          add_violation(w, "a", p, t,
                        "task '" + g.task(t).id + "' in l1/l2 needs '" + g.task(pr).id +
                            "', which is neither held nor locally computed");
          break;
        }
    }

    // (b) every l3 element is received, or reachable by recomputation in
    // dependency order; bare sources are data and cannot be recomputed.
    std::vector<char> avail = bitmap_of(g, set_union(ps.l0, got));
    std::vector<char> computable = bitmap_of(g, set_union(ps.l4, ps.l3));
    std::vector<char> in_l4 = bitmap_of(g, ps.l4);
    for (TaskIndex t : g.topo_order()) {
      if (!computable[t] || avail[t]) continue;
      if (g.preds(t).empty() && !in_l4[t]) continue;
      bool ok = true;
      for (TaskIndex pr : g.preds(t))
        if (!avail[pr]) {
          ok = false;
          break;
        }
      if (ok) avail[t] = 1;
    }
    for (TaskIndex t : ps.l3) {
      if (avail[t]) continue;
      if (g.preds(t).empty()) {
        add_violation(w, "b", p, t,
                      "l3 element '" + g.task(t).id +
                          "' is initial data that is never received");
      } else {
        TaskIndex miss = -1;
        for (TaskIndex pr : g.preds(t))
          if (!avail[pr]) {
            miss = pr;
            break;
          }
        add_violation(w, "b", p, t,
                      "l3 task '" + g.task(t).id + "' has unsatisfiable predecessor '" +
                          g.task(miss).id + "'");
      }
    }

    // (c) coverage of the native work.
    for (TaskIndex t : set_minus(ps.target, ps.l0))
      if (!set_contains(ps.l1, t) && !set_contains(ps.l2, t) && !set_contains(ps.l3, t))
        add_violation(w, "c", p, t,
                      "target '" + g.task(t).id + "' appears in none of l1, l2, l3");

    // (d) l2 runs while messages are in flight, so it must not consume l3.
    for (TaskIndex t : ps.l2)
      for (TaskIndex pr : g.preds(t))
        if (in_l3[pr]) {
          add_violation(w, "d", p, t,
                        "l2 task '" + g.task(t).id + "' depends on l3 element '" +
                            g.task(pr).id + "'");
          break;
        }
  }

  return w;
}

RedundancyReport redundancy(const TaskGraph& g, const AvoidSplit& s) {
  WellFormedness w = verify_well_formed(g, s);
  if (!w.ok)
    throw MalformedSplit("redundancy needs a well-formed split: " + w.violations.front().detail);

  RedundancyReport rep;
  std::vector<int> times_computed(g.size(), 0);
  for (const ProcSplit& ps : s.procs) {
    TaskSet computed = set_union(set_union(ps.l1, ps.l2), ps.l3_compute());
    for (TaskIndex t : computed) ++times_computed[t];
    ProcRedundancy pr;
    pr.proc = ps.proc;
    pr.native = set_minus(ps.target, ps.l0).size();
    pr.computed = computed.size();
    pr.redundant = pr.computed - pr.native; // coverage check makes this >= 0
    pr.ratio = pr.native ? static_cast<double>(pr.computed) / pr.native : 1.0;
    rep.native += pr.native;
    rep.computed += pr.computed;
    rep.redundant += pr.redundant;
    rep.procs.push_back(pr);
  }
  for (TaskIndex t = 0; t < g.size(); ++t)
    if (times_computed[t] >= 2) ++rep.duplicated;
  rep.ratio = rep.native ? static_cast<double>(rep.computed) / rep.native : 1.0;
  return rep;
}

MacroStepPlan blocked_transform(const TaskGraph& g, const LevelCover& c, int b) {
  if (b < 1) throw BadBlockSize("block size must be at least 1, got " + std::to_string(b));
  CoverReport rep = validate_cover(g, c);
  if (!rep.valid)
    throw InvalidCover("blocked_transform needs a valid cover: " + rep.violations.front().detail);
  for (const auto& [key, tasks] : c.blocks)
    for (TaskIndex t : tasks)
      if (g.level(t) != key.first)
        throw InvalidCover("cover is not leveled: task '" + g.task(t).id + "' has depth " +
                           std::to_string(g.level(t)) + " but sits in block k=" +
                           std::to_string(key.first));

  const int P = g.nprocs();
  const int kmax = g.max_level();
  MacroStepPlan plan;
  plan.block = b;
  const int nsteps = (kmax + b - 1) / b;
  for (int s = 0; s < nsteps; ++s) {
    const int lo = 1 + s * b;
    const int hi = std::min(kmax, (s + 1) * b);
    std::vector<TaskSet> target(P), initial(P);
    for (TaskIndex t = 0; t < g.size(); ++t) {
      const int lv = g.level(t);
      if (lv >= lo && lv <= hi)
        target[g.task(t).proc].push_back(t); // index order == sorted order
      else if (lv < lo)
        initial[g.task(t).proc].push_back(t);
    }
    plan.steps.push_back(split(g, target, initial));
  }
  return plan;
}

VolumeReport communicated_volume(const MacroStepPlan& plan) {
  VolumeReport rep;
  for (int s = 0; s < static_cast<int>(plan.steps.size()); ++s) {
    StepVolume v;
    v.step = s;
    for (const ProcSplit& ps : plan.steps[s].procs)
      for (const auto& [q, elems] : ps.recv)
        if (!elems.empty()) {
          ++v.messages;
          v.elements += elems.size();
        }
    rep.messages += v.messages;
    rep.elements += v.elements;
    rep.steps.push_back(v);
  }
  return rep;
}

PlanOverlap plan_overlap(const TaskGraph& g, const MacroStepPlan& plan) {
  (void)g;
  PlanOverlap res;
  for (int s = 0; s < static_cast<int>(plan.steps.size()); ++s) {
    for (const ProcSplit& ps : plan.steps[s].procs)
      for (const auto& [q, elems] : ps.recv) {
        const ProcSplit& sender = plan.steps[s].procs.at(q);
        for (TaskIndex e : elems)
          if (!set_contains(sender.l0, e)) {
            res.ok = false;
            res.witnesses.push_back({s, q, ps.proc, e});
          }
      }
  }
  return res;
}

namespace {

std::string dot_quote(const std::string& id) {
  std::string out = "\"";
  for (char ch : id) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  out += '"';
  return out;
}

const char* kProcPalette[] = {"#cfe0f2", "#d6ecd0", "#f2e2c4", "#e6d4ea",
                              "#f2cfcf", "#d2eef0", "#efeacb", "#ded7f0"};

} // namespace

std::string to_dot(const TaskGraph& g) {
  std::ostringstream out;
  out << "digraph tasks {\n  rankdir=TB;\n  node [shape=box, style=filled];\n";
  for (TaskIndex t = 0; t < g.size(); ++t)
    out << "  " << dot_quote(g.task(t).id) << " [fillcolor=\""
        << kProcPalette[g.task(t).proc % 8] << "\"];\n";
  for (TaskIndex t = 0; t < g.size(); ++t)
    for (TaskIndex su : g.succs(t))
      out << "  " << dot_quote(g.task(t).id) << " -> " << dot_quote(g.task(su).id) << ";\n";
  out << "}\n";
  return out.str();
}

std::string to_dot(const TaskGraph& g, const AvoidSplit& s, int proc) {
  if (proc < 0 || proc >= static_cast<int>(s.procs.size()))
    throw BadProc("split has no processor " + std::to_string(proc));
  const ProcSplit& ps = s.procs[proc];
  const TaskSet got = ps.received();
  const TaskSet l3c = ps.l3_compute();

  auto color_of = [&](TaskIndex t) -> const char* {
    if (set_contains(ps.l0, t)) return "#c8c8c8";  // held at step start
    if (set_contains(ps.l1, t)) return "#f0b860";  // computed, shipped out
    if (set_contains(ps.l2, t)) return "#9fd49a";  // computed, local only
    if (set_contains(got, t)) return "#8fb8e8";    // arrives by message
    if (set_contains(l3c, t)) return "#e88f8f";    // recomputed remote work
    return "#ffffff";                              // outside this view
  };

  std::ostringstream out;
  out << "digraph split_p" << proc << " {\n  rankdir=TB;\n"
      << "  label=\"processor " << proc
      << ": gray=held, orange=sent, green=local, blue=received, red=recomputed\";\n"
      << "  node [shape=box, style=filled];\n";
  for (TaskIndex t = 0; t < g.size(); ++t)
    out << "  " << dot_quote(g.task(t).id) << " [fillcolor=\"" << color_of(t) << "\"];\n";
  for (TaskIndex t = 0; t < g.size(); ++t)
    for (TaskIndex su : g.succs(t))
      out << "  " << dot_quote(g.task(t).id) << " -> " << dot_quote(g.task(su).id) << ";\n";
  out << "}\n";
  return out.str();
}

} // namespace cagraph
