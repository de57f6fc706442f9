"""Constraint-based solver for job-shop scheduling variants.

Supports the classic makespan job shop plus three relatives: maximal
time lags between consecutive tasks, strict no-wait, and weighted
earliness/tardiness around due dates.  One disjunctive engine serves all
of them; search combines weighted-degree branching, geometric restarts
with nogood recording, solution-guided value ordering, greedy
initialization and dichotomic bound probing.
"""

from .engine import Engine
from .greedy import GreedyStats, greedy_descend, greedy_init
from .io import (
    derive_time_lag,
    dumps_et,
    dumps_jsp,
    normalized_cost,
    parse_et,
    parse_jsp,
    validate_solution,
)
from .models import (
    BuiltModel,
    Instance,
    Solution,
    build_etjsp,
    build_jsp,
    build_model,
    build_nwjsp_interval,
    build_nwjsp_task,
    build_tljsp,
    extract_solution,
    get_f_intervals,
    stretched,
    trivial_bounds,
)
from .rng import RandomStream
from .search import (
    OptimizationResult,
    SearchConfig,
    SearchStats,
    optimize,
    solve_satisfaction,
)

__version__ = "0.1.0"

__all__ = [
    "Engine",
    "Instance",
    "Solution",
    "BuiltModel",
    "RandomStream",
    "SearchConfig",
    "SearchStats",
    "OptimizationResult",
    "GreedyStats",
    "build_jsp",
    "build_tljsp",
    "build_etjsp",
    "build_nwjsp_task",
    "build_nwjsp_interval",
    "build_model",
    "get_f_intervals",
    "trivial_bounds",
    "stretched",
    "extract_solution",
    "greedy_descend",
    "greedy_init",
    "optimize",
    "solve_satisfaction",
    "parse_jsp",
    "parse_et",
    "dumps_jsp",
    "dumps_et",
    "derive_time_lag",
    "validate_solution",
    "normalized_cost",
]
