#include "cagraph/io.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <map>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"

namespace cagraph {

using ordered_json = nlohmann::ordered_json;

namespace {

[[noreturn]] void bad_schema(const std::string& context, const std::string& what) {
  throw SchemaError(context + ": " + what);
}

ordered_json parse_json(const std::string& text, const std::string& context) {
  try {
    return ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw ParseError(context + ": " + e.what());
  }
}

void expect_object(const ordered_json& j, const std::string& where, const std::string& context) {
  if (!j.is_object()) bad_schema(context, where + " must be an object");
}

void expect_keys(const ordered_json& obj, std::initializer_list<const char*> keys,
                 const std::string& where, const std::string& context) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) bad_schema(context, "unknown field '" + item.key() + "' in " + where);
  }
}

int get_int(const ordered_json& obj, const char* key, const std::string& where,
            const std::string& context) {
  if (!obj.contains(key)) bad_schema(context, where + " is missing '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) bad_schema(context, where + ".'" + key + "' must be an integer");
  return v.get<int>();
}

double get_number(const ordered_json& v, const std::string& where, const std::string& context) {
  if (!v.is_number()) bad_schema(context, where + " must be a number");
  return v.get<double>();
}

std::string get_string(const ordered_json& obj, const char* key, const std::string& where,
                       const std::string& context) {
  if (!obj.contains(key)) bad_schema(context, where + " is missing '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_string()) bad_schema(context, where + ".'" + key + "' must be a string");
  return v.get<std::string>();
}

ordered_json ids_json(const TaskGraph& g, const TaskSet& s) {
  ordered_json arr = ordered_json::array();
  for (TaskIndex t : s) arr.push_back(g.task(t).id);
  return arr;
}

TaskSet ids_to_set(const ordered_json& arr, const TaskGraph& g, const std::string& where,
                   const std::string& context) {
  if (!arr.is_array()) bad_schema(context, where + " must be an array of task ids");
  TaskSet out;
  for (const auto& v : arr) {
    if (!v.is_string()) bad_schema(context, where + " must contain strings");
    const std::string id = v.get<std::string>();
    if (!g.contains(id)) bad_schema(context, where + " references unknown task '" + id + "'");
    const TaskIndex t = g.index_of(id);
    if (set_contains(out, t)) bad_schema(context, where + " lists task '" + id + "' twice");
    set_insert(out, t);
  }
  return out;
}

} // namespace

// ---- graphs --------------------------------------------------------------

std::string graph_to_json(const TaskGraph& g) {
  ordered_json j;
  j["nprocs"] = g.nprocs();
  j["tasks"] = ordered_json::array();
  for (TaskIndex t = 0; t < g.size(); ++t) {
    const Task& task = g.task(t);
    ordered_json jt;
    jt["id"] = task.id;
    jt["proc"] = task.proc;
    jt["weight"] = task.weight;
    if (!task.label.empty()) jt["label"] = task.label;
    j["tasks"].push_back(std::move(jt));
  }
  j["edges"] = ordered_json::array();
  for (TaskIndex t = 0; t < g.size(); ++t)
    for (TaskIndex su : g.succs(t))
      j["edges"].push_back(ordered_json::array({g.task(t).id, g.task(su).id}));
  return j.dump(2) + "\n";
}

TaskGraph graph_from_json(const std::string& text, const std::string& context) {
  const ordered_json j = parse_json(text, context);
  expect_object(j, "graph file", context);
  expect_keys(j, {"nprocs", "tasks", "edges"}, "graph file", context);

  const int nprocs = get_int(j, "nprocs", "graph file", context);
  if (!j.contains("tasks") || !j.at("tasks").is_array())
    bad_schema(context, "graph file needs a 'tasks' array");
  if (!j.contains("edges") || !j.at("edges").is_array())
    bad_schema(context, "graph file needs an 'edges' array");

  std::vector<Task> tasks;
  std::set<std::string> ids;
  int i = 0;
  for (const auto& jt : j.at("tasks")) {
    const std::string where = "tasks[" + std::to_string(i++) + "]";
    expect_object(jt, where, context);
    expect_keys(jt, {"id", "proc", "weight", "label"}, where, context);
    Task t;
    t.id = get_string(jt, "id", where, context);
    t.proc = get_int(jt, "proc", where, context);
    if (jt.contains("weight")) t.weight = get_number(jt.at("weight"), where + ".weight", context);
    if (jt.contains("label")) t.label = get_string(jt, "label", where, context);
    ids.insert(t.id);
    tasks.push_back(std::move(t));
  }

  std::vector<std::pair<std::string, std::string>> edges;
  i = 0;
  for (const auto& je : j.at("edges")) {
    const std::string where = "edges[" + std::to_string(i++) + "]";
    if (!je.is_array() || je.size() != 2 || !je[0].is_string() || !je[1].is_string())
      bad_schema(context, where + " must be a [pred, succ] id pair");
    const std::string pred = je[0].get<std::string>(), succ = je[1].get<std::string>();
    for (const std::string& id : {pred, succ})
      if (!ids.count(id)) bad_schema(context, where + " references unknown task '" + id + "'");
    edges.emplace_back(pred, succ);
  }
  return TaskGraph::build(tasks, edges, nprocs);
}

TaskGraph load_graph(const std::string& path) { return graph_from_json(read_file(path), path); }

void save_graph(const TaskGraph& g, const std::string& path) {
  write_file(path, graph_to_json(g));
}

// ---- covers ---------------------------------------------------------------

std::string cover_to_json(const LevelCover& c, const TaskGraph& g) {
  ordered_json j;
  j["blocks"] = ordered_json::array();
  for (const auto& [key, tasks] : c.blocks) {
    ordered_json jb;
    jb["k"] = key.first;
    jb["p"] = key.second;
    jb["tasks"] = ids_json(g, tasks);
    j["blocks"].push_back(std::move(jb));
  }
  return j.dump(2) + "\n";
}

LevelCover cover_from_json(const std::string& text, const TaskGraph& g,
                           const std::string& context) {
  const ordered_json j = parse_json(text, context);
  expect_object(j, "cover file", context);
  expect_keys(j, {"blocks"}, "cover file", context);
  if (!j.contains("blocks") || !j.at("blocks").is_array())
    bad_schema(context, "cover file needs a 'blocks' array");

  LevelCover c;
  int i = 0;
  for (const auto& jb : j.at("blocks")) {
    const std::string where = "blocks[" + std::to_string(i++) + "]";
    expect_object(jb, where, context);
    expect_keys(jb, {"k", "p", "tasks"}, where, context);
    const int k = get_int(jb, "k", where, context);
    const int p = get_int(jb, "p", where, context);
    if (k < 0 || p < 0) bad_schema(context, where + " has a negative index");
    if (c.blocks.count({k, p}))
      bad_schema(context, where + " repeats block (k=" + std::to_string(k) +
                              ", p=" + std::to_string(p) + ")");
    if (!jb.contains("tasks")) bad_schema(context, where + " is missing 'tasks'");
    c.blocks[{k, p}] = ids_to_set(jb.at("tasks"), g, where + ".tasks", context);
  }
  return c;
}

LevelCover load_cover(const std::string& path, const TaskGraph& g) {
  return cover_from_json(read_file(path), g, path);
}

void save_cover(const LevelCover& c, const TaskGraph& g, const std::string& path) {
  write_file(path, cover_to_json(c, g));
}

// ---- plans ----------------------------------------------------------------

std::string plan_to_json(const MacroStepPlan& plan, const TaskGraph& g) {
  ordered_json j;
  j["block"] = plan.block;
  j["steps"] = ordered_json::array();
  for (std::size_t s = 0; s < plan.steps.size(); ++s) {
    for (const ProcSplit& ps : plan.steps[s].procs) {
      ordered_json row;
      row["step"] = static_cast<int>(s);
      row["p"] = ps.proc;
      row["target"] = ids_json(g, ps.target);
      row["l0"] = ids_json(g, ps.l0);
      row["l1"] = ids_json(g, ps.l1);
      row["l2"] = ids_json(g, ps.l2);
      row["l3"] = ids_json(g, ps.l3);
      row["l4"] = ids_json(g, ps.l4);
      row["l5"] = ids_json(g, ps.l5);
      ordered_json recv = ordered_json::object();
      for (const auto& [q, elems] : ps.recv)
        recv[std::to_string(q) + "->" + std::to_string(ps.proc)] = ids_json(g, elems);
      row["recv"] = std::move(recv);
      j["steps"].push_back(std::move(row));
    }
  }
  return j.dump(2) + "\n";
}

MacroStepPlan plan_from_json(const std::string& text, const TaskGraph& g,
                             const std::string& context) {
  const ordered_json j = parse_json(text, context);
  expect_object(j, "plan file", context);
  expect_keys(j, {"block", "steps"}, "plan file", context);
  MacroStepPlan plan;
  plan.block = get_int(j, "block", "plan file", context);
  if (plan.block < 1) bad_schema(context, "block size must be >= 1");
  if (!j.contains("steps") || !j.at("steps").is_array())
    bad_schema(context, "plan file needs a 'steps' array");

  const int P = g.nprocs();
  std::map<std::pair<int, int>, ProcSplit> rows;
  int i = 0;
  int nsteps = 0;
  for (const auto& jr : j.at("steps")) {
    const std::string where = "steps[" + std::to_string(i++) + "]";
    expect_object(jr, where, context);
    expect_keys(jr, {"step", "p", "target", "l0", "l1", "l2", "l3", "l4", "l5", "recv"}, where,
                context);
    const int s = get_int(jr, "step", where, context);
    const int p = get_int(jr, "p", where, context);
    if (s < 0) bad_schema(context, where + " has a negative step index");
    if (p < 0 || p >= P)
      bad_schema(context, where + " names processor " + std::to_string(p) + ", graph has " +
                              std::to_string(P));
    if (rows.count({s, p}))
      bad_schema(context, where + " repeats (step=" + std::to_string(s) +
                              ", p=" + std::to_string(p) + ")");
    ProcSplit ps;
    ps.proc = p;
    auto field = [&](const char* name) -> TaskSet {
      if (!jr.contains(name)) bad_schema(context, where + " is missing '" + std::string(name) + "'");
      return ids_to_set(jr.at(name), g, where + "." + name, context);
    };
    ps.target = field("target");
    ps.l0 = field("l0");
    ps.l1 = field("l1");
    ps.l2 = field("l2");
    ps.l3 = field("l3");
    ps.l4 = field("l4");
    ps.l5 = field("l5");
    if (!jr.contains("recv") || !jr.at("recv").is_object())
      bad_schema(context, where + " needs a 'recv' object");
    for (const auto& item : jr.at("recv").items()) {
      const std::string& key = item.key();
      const auto arrow = key.find("->");
      int q = -1, to = -1;
      if (arrow != std::string::npos) {
        auto r1 = std::from_chars(key.data(), key.data() + arrow, q);
        auto r2 = std::from_chars(key.data() + arrow + 2, key.data() + key.size(), to);
        if (r1.ec != std::errc{} || r1.ptr != key.data() + arrow || r2.ec != std::errc{} ||
            r2.ptr != key.data() + key.size())
          q = -1;
      }
      if (q < 0 || q >= P || to != p || q == p)
        bad_schema(context, where + " has a malformed recv key '" + key + "'");
      ps.recv[q] = ids_to_set(item.value(), g, where + ".recv", context);
    }
    nsteps = std::max(nsteps, s + 1);
    rows[{s, p}] = std::move(ps);
  }

  plan.steps.resize(nsteps);
  for (int s = 0; s < nsteps; ++s) {
    plan.steps[s].procs.resize(P);
    for (int p = 0; p < P; ++p) {
      auto it = rows.find({s, p});
      if (it == rows.end())
        bad_schema(context, "macro-step " + std::to_string(s) + " has no row for processor " +
                                std::to_string(p));
      plan.steps[s].procs[p] = std::move(it->second);
    }
  }
  return plan;
}

MacroStepPlan load_plan(const std::string& path, const TaskGraph& g) {
  return plan_from_json(read_file(path), g, path);
}

void save_plan(const MacroStepPlan& plan, const TaskGraph& g, const std::string& path) {
  write_file(path, plan_to_json(plan, g));
}

// ---- reports and traces -----------------------------------------------------

std::string report_to_json(const CoverReport& rep, const TaskGraph& g) {
  ordered_json j;
  j["valid"] = rep.valid;
  j["granularity"] = rep.granularity;
  j["overlap_ok"] = rep.overlap_ok;
  j["violations"] = ordered_json::array();
  for (const CoverViolation& v : rep.violations) {
    ordered_json jv;
    jv["condition"] = v.condition;
    jv["task"] = v.task >= 0 ? g.task(v.task).id : "";
    jv["witness"] = v.witness >= 0 ? g.task(v.witness).id : "";
    jv["detail"] = v.detail;
    j["violations"].push_back(std::move(jv));
  }
  return j.dump(2) + "\n";
}

std::string trace_to_json(const PhaseTrace& t) {
  ordered_json j;
  j["rows"] = ordered_json::array();
  for (const PhaseRow& r : t.rows) {
    ordered_json jr;
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
    j["rows"].push_back(std::move(jr));
  }
  j["step_totals"] = t.step_totals;
  j["total"] = t.total;
  return j.dump(2) + "\n";
}

// ---- sweep tables -----------------------------------------------------------

static const char* kSweepHeader = "threads,alpha,variant,block,total";

std::string sweep_to_csv(const SweepTable& t) {
  std::ostringstream out;
  out << kSweepHeader << "\n";
  for (const SweepRow& r : t.rows)
    out << r.threads << "," << format_number(r.alpha) << "," << r.variant << "," << r.block << ","
        << format_number(r.total) << "\n";
  return out.str();
}

void save_sweep_csv(const SweepTable& t, const std::string& path) {
  write_file(path, sweep_to_csv(t));
}

SweepTable sweep_from_csv(const std::string& text, const std::string& context) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader)
    throw ParseError(context + ": expected header '" + kSweepHeader + "'");
  SweepTable t;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      cells.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (cells.size() != 5)
      throw ParseError(context + ": line " + std::to_string(lineno) + " has " +
                       std::to_string(cells.size()) + " fields, want 5");
    auto to_int = [&](const std::string& s) {
      int v = 0;
      auto r = std::from_chars(s.data(), s.data() + s.size(), v);
      if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw ParseError(context + ": line " + std::to_string(lineno) + ": '" + s +
                         "' is not an integer");
      return v;
    };
    auto to_double = [&](const std::string& s) {
      char* end = nullptr;
      const double v = std::strtod(s.c_str(), &end);
      if (end != s.c_str() + s.size() || s.empty())
        throw ParseError(context + ": line " + std::to_string(lineno) + ": '" + s +
                         "' is not a number");
      return v;
    };
    SweepRow r;
    r.threads = to_int(cells[0]);
    r.alpha = to_double(cells[1]);
    r.variant = cells[2];
    r.block = to_int(cells[3]);
    r.total = to_double(cells[4]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

SweepTable load_sweep_csv(const std::string& path) {
  return sweep_from_csv(read_file(path), path);
}

// ---- sweep scenarios ----------------------------------------------------------

SweepScenario scenario_from_json(const std::string& text, const std::string& context) {
  const ordered_json j = parse_json(text, context);
  expect_object(j, "sweep config", context);
  expect_keys(j, {"graph", "b", "alpha", "threads", "beta"}, "sweep config", context);

  SweepScenario sc;
  if (!j.contains("graph")) bad_schema(context, "sweep config is missing 'graph'");
  const ordered_json& jg = j.at("graph");
  expect_object(jg, "graph", context);
  sc.kind = get_string(jg, "kind", "graph", context);
  if (sc.kind == "stencil1d") {
    expect_keys(jg, {"kind", "points", "procs", "steps", "radius", "boundary"}, "graph", context);
    sc.points = get_int(jg, "points", "graph", context);
    sc.procs = get_int(jg, "procs", "graph", context);
    sc.steps = get_int(jg, "steps", "graph", context);
    sc.radius = get_int(jg, "radius", "graph", context);
    if (jg.contains("boundary")) sc.boundary = get_string(jg, "boundary", "graph", context);
  } else if (sc.kind == "random") {
    expect_keys(jg, {"kind", "n", "p_edge", "procs", "seed"}, "graph", context);
    sc.n = get_int(jg, "n", "graph", context);
    if (!jg.contains("p_edge")) bad_schema(context, "graph is missing 'p_edge'");
    sc.p_edge = get_number(jg.at("p_edge"), "graph.p_edge", context);
    sc.procs = get_int(jg, "procs", "graph", context);
    if (jg.contains("seed")) {
      if (!jg.at("seed").is_number_unsigned() && !jg.at("seed").is_number_integer())
        bad_schema(context, "graph.'seed' must be an integer");
      sc.seed = jg.at("seed").get<std::uint64_t>();
    }
  } else if (sc.kind == "file") {
    expect_keys(jg, {"kind", "path"}, "graph", context);
    sc.path = get_string(jg, "path", "graph", context);
  } else {
    bad_schema(context, "unknown graph kind '" + sc.kind + "'");
  }

  auto int_list = [&](const char* key, int at_least) {
    std::vector<int> out;
    if (!j.contains(key) || !j.at(key).is_array())
      bad_schema(context, "sweep config needs a '" + std::string(key) + "' array");
    for (const auto& v : j.at(key)) {
      if (!v.is_number_integer())
        bad_schema(context, "'" + std::string(key) + "' must hold integers");
      const int x = v.get<int>();
      if (x < at_least)
        bad_schema(context, "'" + std::string(key) + "' entries must be >= " +
                                std::to_string(at_least));
      out.push_back(x);
    }
    return out;
  };
  sc.b = int_list("b", 1);
  sc.threads = int_list("threads", 1);
  if (!j.contains("alpha") || !j.at("alpha").is_array())
    bad_schema(context, "sweep config needs an 'alpha' array");
  for (const auto& v : j.at("alpha")) {
    const double a = get_number(v, "alpha entry", context);
    if (a < 0) bad_schema(context, "alpha entries must be nonnegative");
    sc.alpha.push_back(a);
  }
  if (j.contains("beta")) {
    sc.beta = get_number(j.at("beta"), "beta", context);
    if (sc.beta < 0) bad_schema(context, "beta must be nonnegative");
  }
  return sc;
}

SweepScenario load_scenario(const std::string& path) {
  return scenario_from_json(read_file(path), path);
}

// ---- raw files -----------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("short write to '" + path + "'");
}

} // namespace cagraph
