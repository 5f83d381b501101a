#include <map>
#include <string>
#include <vector>

#include "doctest.h"

#include "cagraph/avoid.hpp"
#include "cagraph/generators.hpp"
#include "cagraph/task_graph.hpp"

using namespace cagraph;

namespace {

TaskGraph s8() { return stencil_1d(8, 2, 2, 1); }

MacroStepPlan s8_plan(const TaskGraph& g, int b) {
  return blocked_transform(g, per_level_cover(g), b);
}

std::vector<std::string> ids(const TaskGraph& g, const TaskSet& s) { return g.ids_of(s); }

} // namespace

TEST_CASE("S8 with block 2 collapses to one macro-step with the known split") {
  const TaskGraph g = s8();
  const MacroStepPlan plan = s8_plan(g, 2);
  REQUIRE(plan.steps.size() == 1);
  REQUIRE(plan.steps[0].procs.size() == 2);

  const ProcSplit& p0 = plan.steps[0].procs[0];
  CHECK(ids(g, p0.l0) == std::vector<std::string>{"(0,0)", "(1,0)", "(2,0)", "(3,0)"});
  CHECK(ids(g, p0.l4) == std::vector<std::string>{"(0,1)", "(0,2)", "(1,1)", "(1,2)", "(2,1)"});
  CHECK(p0.l1.empty()); // nothing p0 computes is wanted by p1 inside the step
  CHECK(p0.l2 == p0.l4);
  CHECK(ids(g, p0.l3) ==
        std::vector<std::string>{"(2,2)", "(3,1)", "(3,2)", "(4,0)", "(4,1)", "(5,0)"});
  CHECK(ids(g, p0.l3_compute()) ==
        std::vector<std::string>{"(2,2)", "(3,1)", "(3,2)", "(4,1)"});
  REQUIRE(p0.recv.size() == 1);
  CHECK(ids(g, p0.recv.at(1)) == std::vector<std::string>{"(4,0)", "(5,0)"});
  CHECK(ids(g, p0.received()) == std::vector<std::string>{"(4,0)", "(5,0)"});

  const ProcSplit& p1 = plan.steps[0].procs[1];
  CHECK(ids(g, p1.l4) == std::vector<std::string>{"(5,1)", "(6,1)", "(6,2)", "(7,1)", "(7,2)"});
  CHECK(p1.l1.empty());
  CHECK(ids(g, p1.l3_compute()) ==
        std::vector<std::string>{"(3,1)", "(4,1)", "(4,2)", "(5,2)"});
  CHECK(ids(g, p1.recv.at(0)) == std::vector<std::string>{"(2,0)", "(3,0)"});

  // the send view mirrors recv
  const auto out0 = plan.steps[0].send(0);
  REQUIRE(out0.size() == 1);
  CHECK(ids(g, out0.at(1)) == std::vector<std::string>{"(2,0)", "(3,0)"});

  // l5 holds target plus its cone: subset invariants
  for (const ProcSplit& ps : plan.steps[0].procs) {
    CHECK(set_minus(ps.l4, ps.l5).empty());
    CHECK(set_minus(ps.l0, ps.l5).empty());
    CHECK(set_minus(ps.target, ps.l5).empty());
    CHECK(set_intersect(ps.l3, ps.l4).empty());
  }
}

TEST_CASE("blocked splits verify and account their redundancy") {
  const TaskGraph g = s8();
  const MacroStepPlan plan = s8_plan(g, 2);
  const WellFormedness w = verify_well_formed(g, plan.steps[0]);
  CHECK(w.ok);
  CHECK(w.violations.empty());

  const RedundancyReport rep = redundancy(g, plan.steps[0]);
  REQUIRE(rep.procs.size() == 2);
  for (const ProcRedundancy& pr : rep.procs) {
    CHECK(pr.native == 8);   // 4 points x 2 levels each
    CHECK(pr.computed == 9); // one neighbour task recomputed
    CHECK(pr.redundant == 1);
    CHECK(pr.ratio == doctest::Approx(9.0 / 8.0));
  }
  CHECK(rep.native == 16);
  CHECK(rep.computed == 18);
  CHECK(rep.redundant == 2);
  // (3,1) and (4,1) are each computed by both processors
  CHECK(rep.duplicated == 2);
  CHECK(rep.ratio == doctest::Approx(18.0 / 16.0));
}

TEST_CASE("block 1 receives exactly the cut edges of each level") {
  const TaskGraph g = s8();
  const MacroStepPlan plan = s8_plan(g, 1);
  REQUIRE(plan.steps.size() == 2);

  for (std::size_t s = 0; s < plan.steps.size(); ++s) {
    for (const ProcSplit& ps : plan.steps[s].procs) {
      // independent edge-cut oracle: remote immediate predecessors of this
      // processor's tasks of level s+1, grouped by owner
      std::map<int, TaskSet> expect;
      for (TaskIndex t : g.tasks_of(ps.proc)) {
        if (g.level(t) != static_cast<int>(s) + 1) continue;
        for (TaskIndex pr : g.preds(t))
          if (g.task(pr).proc != ps.proc) set_insert(expect[g.task(pr).proc], pr);
      }
      CHECK(ps.recv == expect);
      // everything needed is received in time: no shipping of fresh work,
      // no recomputation beyond the processor's own boundary tasks
      CHECK(ps.l1.empty());
      CHECK(set_minus(ps.l3_compute(), ps.target).empty());
    }
    CHECK(redundancy(g, plan.steps[s]).redundant == 0);
  }
}

TEST_CASE("doubling the block halves the message count at equal volume") {
  const TaskGraph g = s8();
  const VolumeReport v1 = communicated_volume(s8_plan(g, 1));
  const VolumeReport v2 = communicated_volume(s8_plan(g, 2));
  CHECK(v1.messages == 4);
  CHECK(v1.elements == 4);
  CHECK(v2.messages == 2);
  CHECK(v2.elements == 4);
  REQUIRE(v2.steps.size() == 1);
  CHECK(v2.steps[0].messages == 2);
  CHECK(v2.steps[0].elements == 4);
}

TEST_CASE("redundant work never shrinks as blocks grow") {
  const TaskGraph g = stencil_1d(12, 3, 4, 1);
  std::vector<std::size_t> reds;
  for (int b = 1; b <= 4; ++b) {
    const MacroStepPlan plan = blocked_transform(g, per_level_cover(g), b);
    std::size_t total = 0;
    for (const AvoidSplit& s : plan.steps) total += redundancy(g, s).redundant;
    reds.push_back(total);
  }
  CHECK(reds == std::vector<std::size_t>{0, 8, 8, 16});
  for (std::size_t i = 1; i < reds.size(); ++i) CHECK(reds[i] >= reds[i - 1]);
}

TEST_CASE("a block of 3 ships freshly computed boundary work") {
  const TaskGraph g = stencil_1d(8, 2, 3, 1);
  const MacroStepPlan plan = blocked_transform(g, per_level_cover(g), 3);
  REQUIRE(plan.steps.size() == 1);
  const ProcSplit& p0 = plan.steps[0].procs[0];
  const ProcSplit& p1 = plan.steps[0].procs[1];
  // deep enough halos need level-1 results, not just initial data
  CHECK(ids(g, p0.l1) == std::vector<std::string>{"(2,1)"});
  CHECK(ids(g, p1.l1) == std::vector<std::string>{"(5,1)"});
  CHECK(ids(g, p0.recv.at(1)) ==
        std::vector<std::string>{"(4,0)", "(5,0)", "(5,1)", "(6,0)"});
  CHECK(verify_well_formed(g, plan.steps[0]).ok);
}

TEST_CASE("plan overlap: pre-held messages pass, mid-step products fail") {
  const TaskGraph g = s8();
  CHECK(plan_overlap(g, s8_plan(g, 1)).ok);
  CHECK(plan_overlap(g, s8_plan(g, 2)).ok);

  // with b=3 the shipped (2,1)/(5,1) are computed inside the very step that
  // sends them, so the message cannot be posted at step start
  const TaskGraph g3 = stencil_1d(8, 2, 3, 1);
  const MacroStepPlan plan = blocked_transform(g3, per_level_cover(g3), 3);
  const PlanOverlap r = plan_overlap(g3, plan);
  CHECK(!r.ok);
  REQUIRE(r.witnesses.size() == 2);
  CHECK(r.witnesses[0].step == 0);
  CHECK(r.witnesses[0].from == 1);
  CHECK(r.witnesses[0].to == 0);
  CHECK(g3.task(r.witnesses[0].element).id == "(5,1)");
  CHECK(r.witnesses[1].from == 0);
  CHECK(g3.task(r.witnesses[1].element).id == "(2,1)");
}

TEST_CASE("verification catches a deleted receive") {
  const TaskGraph g = s8();
  MacroStepPlan plan = s8_plan(g, 2);
  ProcSplit& p0 = plan.steps[0].procs[0];
  p0.recv[1] = set_minus(p0.recv[1], g.set_of({"(4,0)"}));

  const WellFormedness w = verify_well_formed(g, plan.steps[0]);
  CHECK(!w.ok);
  bool saw_b = false;
  for (const SplitViolation& v : w.violations)
    if (v.rule == "b" && v.proc == 0) saw_b = true;
  CHECK(saw_b);

  CHECK_THROWS_AS(redundancy(g, plan.steps[0]), MalformedSplit);
}

TEST_CASE("verification catches structural corruption") {
  const TaskGraph g = s8();

  // l2 no longer equals l4 - l1
  MacroStepPlan plan = s8_plan(g, 2);
  plan.steps[0].procs[0].l2 = set_minus(plan.steps[0].procs[0].l2, g.set_of({"(0,1)"}));
  bool saw = false;
  for (const SplitViolation& v : verify_well_formed(g, plan.steps[0]).violations)
    if (v.rule == "structure") saw = true;
  CHECK(saw);

  // receiving one's own task
  plan = s8_plan(g, 2);
  set_insert(plan.steps[0].procs[0].recv[1], g.index_of("(0,0)"));
  saw = false;
  for (const SplitViolation& v : verify_well_formed(g, plan.steps[0]).violations)
    if (v.rule == "structure") saw = true;
  CHECK(saw);
}

TEST_CASE("an l2 task must not read halo data") {
  const TaskGraph g = s8();
  MacroStepPlan plan = s8_plan(g, 2);
  ProcSplit& p0 = plan.steps[0].procs[0];
  // pretend (2,2) were plain local work; its input (3,1) stays in l3
  const TaskIndex t = g.index_of("(2,2)");
  p0.l3 = set_minus(p0.l3, TaskSet{t});
  set_insert(p0.l4, t);
  set_insert(p0.l2, t);

  const WellFormedness w = verify_well_formed(g, plan.steps[0]);
  CHECK(!w.ok);
  bool saw_a = false, saw_d = false;
  for (const SplitViolation& v : w.violations) {
    if (v.rule == "a" && v.task == t) saw_a = true;
    if (v.rule == "d" && v.task == t) saw_d = true;
  }
  CHECK(saw_a); // (3,1) is not in l0 + l4
  CHECK(saw_d); // (3,1) is halo data
}

TEST_CASE("split() with explicit sets matches the transform") {
  const TaskGraph g = s8();
  std::vector<TaskSet> target(2), initial(2);
  for (int p = 0; p < 2; ++p)
    for (TaskIndex t : g.tasks_of(p))
      (g.level(t) == 0 ? initial[p] : target[p]).push_back(t);
  const AvoidSplit s = split(g, target, initial);
  const MacroStepPlan plan = s8_plan(g, 2);
  for (int p = 0; p < 2; ++p) {
    CHECK(s.procs[p].l4 == plan.steps[0].procs[p].l4);
    CHECK(s.procs[p].l3 == plan.steps[0].procs[p].l3);
    CHECK(s.procs[p].recv == plan.steps[0].procs[p].recv);
  }
}

TEST_CASE("split() rejects misshapen or impossible requests") {
  const TaskGraph g = s8();

  // wrong vector arity
  CHECK_THROWS_AS(split(g, std::vector<TaskSet>(1), std::vector<TaskSet>(2)), BadShape);

  // a target owned by the other processor
  std::vector<TaskSet> target(2), initial(2);
  target[0] = g.set_of({"(5,1)"});
  CHECK_THROWS_AS(split(g, target, initial), TargetNotOwned);

  // nobody holds the initial data the halo needs
  target[0] = g.set_of({"(0,1)"});
  CHECK_THROWS_AS(split(g, target, initial), Unreachable);
}

TEST_CASE("one processor, or no cross edges, means no communication") {
  const TaskGraph g = stencil_1d(8, 1, 2, 1);
  const MacroStepPlan plan = blocked_transform(g, per_level_cover(g), 2);
  REQUIRE(plan.steps.size() == 1);
  const ProcSplit& ps = plan.steps[0].procs[0];
  CHECK(ps.l1.empty());
  CHECK(ps.l3.empty());
  CHECK(ps.recv.empty());
  CHECK(ps.l2 == ps.target);
  CHECK(redundancy(g, plan.steps[0]).redundant == 0);

  // two disjoint chains on two processors
  const TaskGraph two = TaskGraph::build(
      {{"a0", 0, 1.0, ""}, {"a1", 0, 1.0, ""}, {"b0", 1, 1.0, ""}, {"b1", 1, 1.0, ""}},
      {{"a0", "a1"}, {"b0", "b1"}}, 2);
  const MacroStepPlan p2 = blocked_transform(two, per_level_cover(two), 1);
  for (const AvoidSplit& s : p2.steps)
    for (const ProcSplit& q : s.procs) {
      CHECK(q.recv.empty());
      CHECK(q.l3.empty());
    }
  CHECK(communicated_volume(p2).messages == 0);
}

TEST_CASE("transform argument checking") {
  const TaskGraph g = s8();
  const LevelCover c = per_level_cover(g);
  CHECK_THROWS_AS(blocked_transform(g, c, 0), BadBlockSize);
  CHECK_THROWS_AS(blocked_transform(g, c, -3), BadBlockSize);

  // block larger than the depth still means one step
  CHECK(blocked_transform(g, c, 10).steps.size() == 1);

  // covers must be valid...
  LevelCover bad = c;
  bad.blocks[{1, 0}] = set_minus(bad.blocks[{1, 0}], g.set_of({"(2,1)"}));
  CHECK_THROWS_AS(blocked_transform(g, bad, 2), InvalidCover);

  // ...and leveled: moving (0,1) up to step 2 keeps all three conditions
  // intact but detaches block index from dependency depth
  LevelCover shifted = c;
  shifted.blocks[{1, 0}] = set_minus(shifted.blocks[{1, 0}], g.set_of({"(0,1)"}));
  shifted.blocks[{2, 0}] = set_union(shifted.blocks[{2, 0}], g.set_of({"(0,1)"}));
  REQUIRE(validate_cover(g, shifted).valid);
  CHECK_THROWS_AS(blocked_transform(g, shifted, 2), InvalidCover);

  // a graph of bare sources has depth 0: nothing to step through
  const TaskGraph flat = TaskGraph::build({{"a", 0, 0.0, ""}, {"b", 0, 0.0, ""}}, {}, 1);
  CHECK(blocked_transform(flat, per_level_cover(flat), 2).steps.empty());
}

TEST_CASE("dot renderings name the subsets") {
  const TaskGraph g = s8();
  const std::string plain = to_dot(g);
  CHECK(plain.find("digraph") != std::string::npos);
  CHECK(plain.find("(0,0)") != std::string::npos);

  const MacroStepPlan plan = s8_plan(g, 2);
  const std::string view = to_dot(g, plan.steps[0], 0);
  CHECK(view.find("digraph") != std::string::npos);
  // received and recomputed halo elements get distinct fills
  CHECK(view.find("#8fb8e8") != std::string::npos);
  CHECK(view.find("#e88f8f") != std::string::npos);
  CHECK_THROWS_AS(to_dot(g, plan.steps[0], 5), BadProc);
}
