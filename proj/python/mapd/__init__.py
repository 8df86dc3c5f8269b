"""Lifelong multi-agent pickup and delivery with conflict-based search."""

from ._core import (
    CSV_HEADER,
    ContractError,
    Env,
    MapError,
    PlanningError,
    WarehouseMap,
    bench,
    builtin_map,
    cbs_solve,
    detect_conflicts,
    load_map,
    render_ascii,
    resolve_map,
    run_episode,
    space_time_search,
)

__all__ = [
    "CSV_HEADER",
    "ContractError",
    "Env",
    "MapError",
    "PlanningError",
    "WarehouseMap",
    "bench",
    "builtin_map",
    "cbs_solve",
    "detect_conflicts",
    "load_map",
    "render_ascii",
    "resolve_map",
    "run_episode",
    "space_time_search",
]
