"""Greedy construction of initial schedules for the lag-bounded variants.

One descent inserts jobs in random order.  For each new job it first
fixes, in random order, all disjuncts against already placed jobs,
preferring the value that puts the new job on the early side and flipping
once on conflict; it then bounds the job's last start to first start plus
the fully stretched span, which pins the whole job given zero or maximal
lags.  Thanks to the deliberately loose trivial upper bound this
job-placement step should never fail; the failure counter exists to check
exactly that.

The best schedule over a number of descents seeds the optimizer with both
an upper bound and an incumbent to guide value ordering.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .models import BuiltModel, Solution, extract_solution, stretched
from .rng import RandomStream

__all__ = ["GreedyStats", "greedy_descend", "greedy_init", "stretched"]


@dataclass
class GreedyStats:
    """Descent counters, mostly for validating the no-failure property."""

    descents: int = 0
    successes: int = 0
    disjunct_failures: int = 0
    tchoice_failures: int = 0
    best_objective: int | None = None
    objectives: list[int] = field(default_factory=list)


def greedy_descend(
    model: BuiltModel, rng: RandomStream, stats: GreedyStats | None = None
) -> Solution | None:
    """One randomized construction pass; None when the descent dead-ends.

    The caller is responsible for restoring the engine afterwards.
    Requires a model with job_bounds (time-lag or no-wait variants).
    """
    eng = model.engine
    if model.job_bounds is None:
        raise ValueError("greedy descent needs a model with job bounds")
    if stats is not None:
        stats.descents += 1
    n = model.instance.n_jobs
    order = list(range(n))
    rng.shuffle(order)
    placed = [False] * n
    bval = eng.bval
    for jy in order:
        cands = [
            (b, left)
            for b, other, left in model.job_disjuncts[jy]
            if placed[other]
        ]
        rng.shuffle(cands)
        for b, left in cands:
            if bval[b] >= 0:
                continue  # already forced by propagation
            mark = eng.save_level()
            eng.assign_bool(b, left)
            if eng.propagate() is None:
                continue
            eng.restore_to(mark)
            eng.assign_bool(b, 1 - left)
            if eng.propagate() is not None:
                if stats is not None:
                    stats.disjunct_failures += 1
                return None
        first, last, span = model.job_bounds[jy]
        if span is not None:
            ok = eng.set_ub(last, eng.lb[first] + span)
            if not ok or eng.propagate() is not None:
                if stats is not None:
                    stats.tchoice_failures += 1
                return None
        placed[jy] = True
    sol = extract_solution(model)
    if stats is not None:
        stats.successes += 1
        stats.objectives.append(sol.objective)
        if stats.best_objective is None or sol.objective < stats.best_objective:
            stats.best_objective = sol.objective
    return sol


def greedy_init(
    model: BuiltModel,
    iterations: int,
    rng: RandomStream,
    deadline: float | None = None,
    stats: GreedyStats | None = None,
) -> Solution | None:
    """Best schedule over a number of descents, restoring between them.

    Returns None when iterations is zero or every descent failed.  The
    engine is left at the root fixpoint.
    """
    eng = model.engine
    if iterations > 0 and eng.propagate() is not None:
        return None
    best: Solution | None = None
    for _ in range(iterations):
        if deadline is not None and time.monotonic() >= deadline:
            break
        mark = eng.save_level()
        sol = greedy_descend(model, rng, stats)
        eng.restore_to(mark)
        if sol is not None and (best is None or sol.objective < best.objective):
            best = sol
    return best
