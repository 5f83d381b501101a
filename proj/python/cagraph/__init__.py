"""Task-graph analysis for communication-avoiding execution.

Thin re-export of the native module: graphs and plans are opaque handles,
everything else crosses as plain dicts/lists keyed by task id strings.
"""

from ._core import (
    Error,
    Plan,
    TaskGraph,
    base,
    blocked_transform,
    check_overlap_condition,
    communicated_volume,
    cover_from_json,
    cover_to_json,
    dot,
    granularity,
    graph_from_json,
    graph_to_json,
    independent_executability,
    load_graph,
    load_plan,
    parallel_time,
    per_level_cover,
    plan_from_json,
    plan_overlap,
    plan_split,
    plan_to_json,
    pred_closure,
    random_dag,
    redundancy,
    save_graph,
    save_plan,
    simulate_blocked,
    simulate_naive,
    split_dot,
    stencil_1d,
    sweep_csv,
    sweep_rows,
    sync_points,
    trace_text,
    transfer_schedule,
    validate_cover,
    verify_step,
)

__all__ = [
    "Error",
    "Plan",
    "TaskGraph",
    "base",
    "blocked_transform",
    "check_overlap_condition",
    "communicated_volume",
    "cover_from_json",
    "cover_to_json",
    "dot",
    "granularity",
    "graph_from_json",
    "graph_to_json",
    "independent_executability",
    "load_graph",
    "load_plan",
    "parallel_time",
    "per_level_cover",
    "plan_from_json",
    "plan_overlap",
    "plan_split",
    "plan_to_json",
    "pred_closure",
    "random_dag",
    "redundancy",
    "save_graph",
    "save_plan",
    "simulate_blocked",
    "simulate_naive",
    "split_dot",
    "stencil_1d",
    "sweep_csv",
    "sweep_rows",
    "sync_points",
    "trace_text",
    "transfer_schedule",
    "validate_cover",
    "verify_step",
]
