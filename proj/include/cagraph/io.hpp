#pragma once

// File formats: graphs, covers, and macro-step plans as canonical JSON
// (stable key order, two-space indent, sorted collections, trailing
// newline — save/load round-trips are byte-identical), sweep tables as CSV,
// plus JSON emitters for reports and traces.

#include <string>

#include "cagraph/avoid.hpp"
#include "cagraph/cover.hpp"
#include "cagraph/simulate.hpp"
#include "cagraph/sweep.hpp"
#include "cagraph/task_graph.hpp"

namespace cagraph {

// Graphs: {"nprocs": N, "tasks": [{"id","proc","weight","label"?}],
// "edges": [[pred,succ],...]}.  Loading rejects unknown fields (SchemaError)
// and names unknown edge endpoints; malformed JSON is a ParseError.
TaskGraph load_graph(const std::string& path);
void save_graph(const TaskGraph& g, const std::string& path);
std::string graph_to_json(const TaskGraph& g);
TaskGraph graph_from_json(const std::string& text, const std::string& context);

// Covers: {"blocks": [{"k": int, "p": int, "tasks": [ids]}]}.
LevelCover load_cover(const std::string& path, const TaskGraph& g);
void save_cover(const LevelCover& c, const TaskGraph& g, const std::string& path);
std::string cover_to_json(const LevelCover& c, const TaskGraph& g);
LevelCover cover_from_json(const std::string& text, const TaskGraph& g,
                           const std::string& context);

// Plans: {"block": b, "steps": [{"step","p","target","l0".."l5",
// "recv": {"q->p": [ids]}}]}, one row per (macro-step, processor).
MacroStepPlan load_plan(const std::string& path, const TaskGraph& g);
void save_plan(const MacroStepPlan& plan, const TaskGraph& g, const std::string& path);
std::string plan_to_json(const MacroStepPlan& plan, const TaskGraph& g);
MacroStepPlan plan_from_json(const std::string& text, const TaskGraph& g,
                             const std::string& context);

// One-way JSON emitters for reporting.
std::string report_to_json(const CoverReport& rep, const TaskGraph& g);
std::string trace_to_json(const PhaseTrace& t);

// Sweep tables: CSV with header `threads,alpha,variant,block,total`.
void save_sweep_csv(const SweepTable& t, const std::string& path);
std::string sweep_to_csv(const SweepTable& t);
SweepTable load_sweep_csv(const std::string& path);
SweepTable sweep_from_csv(const std::string& text, const std::string& context);

// Sweep scenario config: {"graph": {"kind": ...}, "b": [...], "alpha": [...],
// "threads": [...], "beta"?}.
SweepScenario scenario_from_json(const std::string& text, const std::string& context);
SweepScenario load_scenario(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

} // namespace cagraph
