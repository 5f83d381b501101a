// Python face of the library.  Everything crosses the boundary as plain
// python data keyed by task id strings: covers are {(k, p): [ids]} dicts,
// reports and traces are dicts of the same fields the C++ structs carry.
// Only TaskGraph and Plan stay opaque handles.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cagraph/avoid.hpp"
#include "cagraph/cover.hpp"
#include "cagraph/generators.hpp"
#include "cagraph/io.hpp"
#include "cagraph/simulate.hpp"
#include "cagraph/sweep.hpp"
#include "cagraph/task_graph.hpp"

namespace py = pybind11;
using namespace cagraph;

namespace {

Boundary boundary_of(const std::string& s) {
  if (s == "dirichlet") return Boundary::dirichlet;
  if (s == "periodic") return Boundary::periodic;
  throw BadShape("unknown boundary '" + s + "', want dirichlet or periodic");
}

LevelCover cover_from_obj(const TaskGraph& g, const py::dict& d) {
  LevelCover c;
  for (auto item : d) {
    const auto key = item.first.cast<std::pair<int, int>>();
    c.blocks[key] = g.set_of(item.second.cast<std::vector<std::string>>());
  }
  return c;
}

py::dict cover_to_obj(const TaskGraph& g, const LevelCover& c) {
  py::dict d;
  for (const auto& [key, tasks] : c.blocks)
    d[py::make_tuple(key.first, key.second)] = g.ids_of(tasks);
  return d;
}

std::string id_or_empty(const TaskGraph& g, TaskIndex t) {
  return t >= 0 ? g.task(t).id : std::string();
}

py::dict report_to_obj(const TaskGraph& g, const CoverReport& rep) {
  py::list violations;
  for (const CoverViolation& v : rep.violations) {
    py::dict jv;
    jv["condition"] = v.condition;
    jv["task"] = id_or_empty(g, v.task);
    jv["witness"] = id_or_empty(g, v.witness);
    jv["detail"] = v.detail;
    violations.append(jv);
  }
  py::dict d;
  d["valid"] = rep.valid;
  d["granularity"] = rep.granularity;
  d["overlap_ok"] = rep.overlap_ok;
  d["violations"] = violations;
  return d;
}

py::dict split_to_obj(const TaskGraph& g, const ProcSplit& ps) {
  py::dict d;
  d["proc"] = ps.proc;
  d["target"] = g.ids_of(ps.target);
  d["l0"] = g.ids_of(ps.l0);
  d["l1"] = g.ids_of(ps.l1);
  d["l2"] = g.ids_of(ps.l2);
  d["l3"] = g.ids_of(ps.l3);
  d["l4"] = g.ids_of(ps.l4);
  d["l5"] = g.ids_of(ps.l5);
  d["l3_compute"] = g.ids_of(ps.l3_compute());
  py::dict recv;
  for (const auto& [q, elems] : ps.recv) recv[py::int_(q)] = g.ids_of(elems);
  d["recv"] = recv;
  return d;
}

py::dict trace_to_obj(const PhaseTrace& t) {
  py::list rows;
  for (const PhaseRow& r : t.rows) {
    py::dict jr;
    jr["step"] = r.step;
    jr["proc"] = r.proc;
    jr["k1_tasks"] = r.k1_tasks;
    jr["k1_pt"] = r.k1_pt;
    jr["recv_elems"] = r.recv_elems;
    jr["recv_time"] = r.recv_time;
    jr["k2_tasks"] = r.k2_tasks;
    jr["k2_pt"] = r.k2_pt;
    jr["k3_tasks"] = r.k3_tasks;
    jr["k3_pt"] = r.k3_pt;
    jr["stall"] = r.stall;
    jr["step_total"] = r.step_total;
    rows.append(jr);
  }
  py::dict d;
  d["rows"] = rows;
  d["step_totals"] = t.step_totals;
  d["total"] = t.total;
  return d;
}

const AvoidSplit& step_of(const MacroStepPlan& plan, int step) {
  if (step < 0 || step >= static_cast<int>(plan.steps.size()))
    throw UnknownTask("plan has " + std::to_string(plan.steps.size()) + " macro-step(s), not a step " +
                      std::to_string(step));
  return plan.steps[step];
}

CostModel model_for(const TaskGraph& g, double alpha, double beta, int threads) {
  CostModel m;
  m.alpha = alpha;
  m.beta = beta;
  m.threads = threads;
  m.nodes = g.nprocs();
  return m;
}

} // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "task-graph analysis for communication-avoiding execution";
  py::register_exception<Error>(m, "Error");

  py::class_<TaskGraph>(m, "TaskGraph")
      .def_static(
          "build",
          [](const std::vector<py::dict>& tasks,
             const std::vector<std::pair<std::string, std::string>>& edges, int nprocs) {
            std::vector<Task> ts;
            for (const py::dict& d : tasks) {
              Task t;
              t.id = d["id"].cast<std::string>();
              if (d.contains("proc")) t.proc = d["proc"].cast<int>();
              if (d.contains("weight")) t.weight = d["weight"].cast<double>();
              if (d.contains("label")) t.label = d["label"].cast<std::string>();
              ts.push_back(std::move(t));
            }
            return TaskGraph::build(std::move(ts), edges, nprocs);
          },
          py::arg("tasks"), py::arg("edges"), py::arg("nprocs"))
      .def("__len__", &TaskGraph::size)
      .def("size", &TaskGraph::size)
      .def("nprocs", &TaskGraph::nprocs)
      .def("num_edges", &TaskGraph::num_edges)
      .def("max_level", &TaskGraph::max_level)
      .def("ids",
           [](const TaskGraph& g) {
             std::vector<std::string> out;
             for (TaskIndex t = 0; t < g.size(); ++t) out.push_back(g.task(t).id);
             return out;
           })
      .def("task",
           [](const TaskGraph& g, const std::string& id) {
             const Task& t = g.task(g.index_of(id));
             py::dict d;
             d["id"] = t.id;
             d["proc"] = t.proc;
             d["weight"] = t.weight;
             d["label"] = t.label;
             d["level"] = g.level(g.index_of(id));
             return d;
           })
      .def("level", [](const TaskGraph& g, const std::string& id) { return g.level(g.index_of(id)); })
      .def("preds",
           [](const TaskGraph& g, const std::string& id) {
             TaskSet s(g.preds(g.index_of(id)));
             return g.ids_of(s);
           })
      .def("succs",
           [](const TaskGraph& g, const std::string& id) {
             TaskSet s(g.succs(g.index_of(id)));
             return g.ids_of(s);
           })
      .def("tasks_of", [](const TaskGraph& g, int proc) { return g.ids_of(g.tasks_of(proc)); })
      .def("__contains__", [](const TaskGraph& g, const std::string& id) { return g.contains(id); })
      .def("__repr__", [](const TaskGraph& g) {
        return "<TaskGraph " + std::to_string(g.size()) + " tasks, " +
               std::to_string(g.num_edges()) + " edges, " + std::to_string(g.nprocs()) +
               " processors>";
      });

  py::class_<MacroStepPlan>(m, "Plan")
      .def_property_readonly("block", [](const MacroStepPlan& p) { return p.block; })
      .def_property_readonly("num_steps",
                             [](const MacroStepPlan& p) { return p.steps.size(); })
      .def("__repr__", [](const MacroStepPlan& p) {
        return "<Plan " + std::to_string(p.steps.size()) + " macro-step(s), block " +
               std::to_string(p.block) + ">";
      });

  // graph queries
  m.def("sync_points",
        [](const TaskGraph& g, const std::string& id) {
          return g.ids_of(sync_points(g, g.index_of(id)));
        },
        py::arg("g"), py::arg("id"));
  m.def("base",
        [](const TaskGraph& g, const std::vector<std::string>& ids) {
          return g.ids_of(base(g, g.set_of(ids)));
        },
        py::arg("g"), py::arg("ids"));
  m.def("pred_closure",
        [](const TaskGraph& g, const std::vector<std::string>& ids,
           const std::optional<std::vector<std::string>>& stop) {
          const TaskSet S = g.set_of(ids);
          return g.ids_of(stop ? pred_closure(g, S, g.set_of(*stop)) : pred_closure(g, S));
        },
        py::arg("g"), py::arg("ids"), py::arg("stop") = py::none());

  // generators
  m.def("stencil_1d",
        [](int points, int procs, int steps, int radius, const std::string& boundary) {
          return stencil_1d(points, procs, steps, radius, boundary_of(boundary));
        },
        py::arg("points"), py::arg("procs"), py::arg("steps"), py::arg("radius"),
        py::arg("boundary") = "dirichlet");
  m.def("random_dag", &random_dag, py::arg("n"), py::arg("p_edge"), py::arg("procs"),
        py::arg("seed") = 0);
  m.def("per_level_cover",
        [](const TaskGraph& g) { return cover_to_obj(g, per_level_cover(g)); }, py::arg("g"));

  // covers
  m.def("validate_cover",
        [](const TaskGraph& g, const py::dict& cover) {
          return report_to_obj(g, validate_cover(g, cover_from_obj(g, cover)));
        },
        py::arg("g"), py::arg("cover"));
  m.def("granularity",
        [](const TaskGraph& g, const py::dict& cover) {
          return granularity(cover_from_obj(g, cover));
        },
        py::arg("g"), py::arg("cover"));
  m.def("check_overlap_condition",
        [](const TaskGraph& g, const py::dict& cover) {
          const OverlapResult r = check_overlap_condition(g, cover_from_obj(g, cover));
          py::list witnesses;
          for (const OverlapWitness& w : r.witnesses) {
            py::dict jw;
            jw["k"] = w.k;
            jw["p"] = w.p;
            jw["task"] = id_or_empty(g, w.task);
            jw["witness"] = id_or_empty(g, w.witness);
            witnesses.append(jw);
          }
          py::dict d;
          d["ok"] = r.ok;
          d["witnesses"] = witnesses;
          return d;
        },
        py::arg("g"), py::arg("cover"));
  m.def("independent_executability",
        [](const TaskGraph& g, const py::dict& cover, int k) {
          return independent_executability(g, cover_from_obj(g, cover), k);
        },
        py::arg("g"), py::arg("cover"), py::arg("k"));

  // the avoid transform
  m.def("blocked_transform",
        [](const TaskGraph& g, int b) { return blocked_transform(g, per_level_cover(g), b); },
        py::arg("g"), py::arg("b"), "macro-step plan from the graph's per-level cover");
  m.def("plan_split",
        [](const TaskGraph& g, const MacroStepPlan& plan, int step, int proc) {
          const AvoidSplit& s = step_of(plan, step);
          if (proc < 0 || proc >= static_cast<int>(s.procs.size()))
            throw BadProc("no processor " + std::to_string(proc) + " in the plan");
          return split_to_obj(g, s.procs[proc]);
        },
        py::arg("g"), py::arg("plan"), py::arg("step"), py::arg("proc"));
  m.def("verify_step",
        [](const TaskGraph& g, const MacroStepPlan& plan, int step) {
          const WellFormedness w = verify_well_formed(g, step_of(plan, step));
          py::list violations;
          for (const SplitViolation& v : w.violations) {
            py::dict jv;
            jv["rule"] = v.rule;
            jv["proc"] = v.proc;
            jv["task"] = id_or_empty(g, v.task);
            jv["detail"] = v.detail;
            violations.append(jv);
          }
          py::dict d;
          d["ok"] = w.ok;
          d["violations"] = violations;
          return d;
        },
        py::arg("g"), py::arg("plan"), py::arg("step"));
  m.def("redundancy",
        [](const TaskGraph& g, const MacroStepPlan& plan, int step) {
          const RedundancyReport rep = redundancy(g, step_of(plan, step));
          py::list procs;
          for (const ProcRedundancy& pr : rep.procs) {
            py::dict jp;
            jp["proc"] = pr.proc;
            jp["native"] = pr.native;
            jp["computed"] = pr.computed;
            jp["redundant"] = pr.redundant;
            jp["ratio"] = pr.ratio;
            procs.append(jp);
          }
          py::dict d;
          d["procs"] = procs;
          d["native"] = rep.native;
          d["computed"] = rep.computed;
          d["redundant"] = rep.redundant;
          d["duplicated"] = rep.duplicated;
          d["ratio"] = rep.ratio;
          return d;
        },
        py::arg("g"), py::arg("plan"), py::arg("step"));
  m.def("communicated_volume",
        [](const MacroStepPlan& plan) {
          const VolumeReport rep = communicated_volume(plan);
          py::list steps;
          for (const StepVolume& s : rep.steps) {
            py::dict js;
            js["step"] = s.step;
            js["messages"] = s.messages;
            js["elements"] = s.elements;
            steps.append(js);
          }
          py::dict d;
          d["steps"] = steps;
          d["messages"] = rep.messages;
          d["elements"] = rep.elements;
          return d;
        },
        py::arg("plan"));
  m.def("plan_overlap",
        [](const TaskGraph& g, const MacroStepPlan& plan) {
          const PlanOverlap r = plan_overlap(g, plan);
          py::list witnesses;
          for (const OverlapBreak& w : r.witnesses) {
            py::dict jw;
            jw["step"] = w.step;
            jw["from"] = w.from;
            jw["to"] = w.to;
            jw["element"] = id_or_empty(g, w.element);
            witnesses.append(jw);
          }
          py::dict d;
          d["ok"] = r.ok;
          d["witnesses"] = witnesses;
          return d;
        },
        py::arg("g"), py::arg("plan"));

  // simulation
  m.def("parallel_time",
        [](const TaskGraph& g, const std::vector<std::string>& ids, int threads) {
          return parallel_time(g, g.set_of(ids), threads);
        },
        py::arg("g"), py::arg("ids"), py::arg("threads") = 1);
  m.def("simulate_blocked",
        [](const TaskGraph& g, const MacroStepPlan& plan, double alpha, double beta, int threads) {
          return trace_to_obj(simulate_blocked(plan, g, model_for(g, alpha, beta, threads)));
        },
        py::arg("g"), py::arg("plan"), py::arg("alpha") = 0.0, py::arg("beta") = 0.0,
        py::arg("threads") = 1);
  m.def("simulate_naive",
        [](const TaskGraph& g, double alpha, double beta, int threads) {
          return trace_to_obj(
              simulate_naive(per_level_cover(g), g, model_for(g, alpha, beta, threads)));
        },
        py::arg("g"), py::arg("alpha") = 0.0, py::arg("beta") = 0.0, py::arg("threads") = 1);
  m.def("trace_text",
        [](const TaskGraph& g, const MacroStepPlan& plan, double alpha, double beta, int threads) {
          return format_trace(simulate_blocked(plan, g, model_for(g, alpha, beta, threads)));
        },
        py::arg("g"), py::arg("plan"), py::arg("alpha") = 0.0, py::arg("beta") = 0.0,
        py::arg("threads") = 1, "the blocked trace in listing form");
  m.def("transfer_schedule",
        [](const TaskGraph& g, const MacroStepPlan& plan) {
          const TransferSchedule ts = transfer_schedule(plan, g);
          py::list descriptors;
          for (const TransferDescriptor& d : ts.descriptors) {
            py::dict jd;
            jd["element"] = id_or_empty(g, d.element);
            jd["from"] = d.from;
            jd["to"] = d.to;
            jd["posted_step"] = d.posted_step;
            jd["consumed_step"] = d.consumed_step;
            descriptors.append(jd);
          }
          py::dict d;
          d["descriptors"] = descriptors;
          d["peak_buffer"] = ts.peak_buffer;
          d["peak"] = ts.peak;
          return d;
        },
        py::arg("g"), py::arg("plan"));

  // sweeps
  m.def("sweep_rows",
        [](const std::string& config_json) {
          const SweepTable t = strong_scaling_sweep(scenario_from_json(config_json, "config"));
          py::list rows;
          for (const SweepRow& r : t.rows) {
            py::dict jr;
            jr["threads"] = r.threads;
            jr["alpha"] = r.alpha;
            jr["variant"] = r.variant;
            jr["block"] = r.block;
            jr["total"] = r.total;
            rows.append(jr);
          }
          return rows;
        },
        py::arg("config_json"));
  m.def("sweep_csv",
        [](const std::string& config_json) {
          return sweep_to_csv(strong_scaling_sweep(scenario_from_json(config_json, "config")));
        },
        py::arg("config_json"));

  // files and text forms
  m.def("load_graph", &load_graph, py::arg("path"));
  m.def("save_graph", &save_graph, py::arg("g"), py::arg("path"));
  m.def("graph_to_json", &graph_to_json, py::arg("g"));
  m.def("graph_from_json",
        [](const std::string& text) { return graph_from_json(text, "graph_from_json"); },
        py::arg("text"));
  m.def("load_plan", &load_plan, py::arg("path"), py::arg("g"));
  m.def("save_plan", &save_plan, py::arg("plan"), py::arg("g"), py::arg("path"));
  m.def("plan_to_json", &plan_to_json, py::arg("plan"), py::arg("g"));
  m.def("plan_from_json",
        [](const std::string& text, const TaskGraph& g) {
          return plan_from_json(text, g, "plan_from_json");
        },
        py::arg("text"), py::arg("g"));
  m.def("cover_to_json",
        [](const TaskGraph& g, const py::dict& cover) {
          return cover_to_json(cover_from_obj(g, cover), g);
        },
        py::arg("g"), py::arg("cover"));
  m.def("cover_from_json",
        [](const std::string& text, const TaskGraph& g) {
          return cover_to_obj(g, cover_from_json(text, g, "cover_from_json"));
        },
        py::arg("text"), py::arg("g"));
  m.def("dot", [](const TaskGraph& g) { return to_dot(g); }, py::arg("g"));
  m.def("split_dot",
        [](const TaskGraph& g, const MacroStepPlan& plan, int step, int proc) {
          step_of(plan, step); // range check
          return to_dot(g, plan.steps[step], proc);
        },
        py::arg("g"), py::arg("plan"), py::arg("step"), py::arg("proc"));
}
