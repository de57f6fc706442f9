"""Instance parsing, lag derivation, solution checking and cost scaling.

The plain job-shop format is the classic one: a header line "n m", then
one row per job with m (machine, duration) pairs, machines 0-indexed.
The earliness/tardiness format appends one row per job holding either
"release due we wt" or "due we wt" (release defaulting to 0).  Parsing is
token-based, so comments are not supported but arbitrary whitespace is.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .models import Instance, Solution

__all__ = [
    "parse_jsp",
    "parse_et",
    "dumps_jsp",
    "dumps_et",
    "derive_time_lag",
    "validate_solution",
    "normalized_cost",
    "Solution",
]

MAX_HORIZON = 2**62


class ParseError(ValueError):
    pass


def _tokens(text: str) -> list[int]:
    out = []
    for tok in text.split():
        try:
            out.append(int(tok))
        except ValueError:
            raise ParseError(f"expected an integer, got {tok!r}") from None
    return out


def _parse_body(toks: list[int], name: str) -> tuple[Instance, list[int]]:
    if len(toks) < 2:
        raise ParseError("missing 'n m' header")
    n, m = toks[0], toks[1]
    if n <= 0 or m <= 0:
        raise ParseError(f"bad dimensions {n} x {m}")
    need = 2 + 2 * n * m
    if len(toks) < need:
        raise ParseError(f"expected {need} integers, got {len(toks)}")
    jobs = []
    k = 2
    for _ in range(n):
        row = []
        for _ in range(m):
            mach, dur = toks[k], toks[k + 1]
            k += 2
            if not 0 <= mach < m:
                raise ParseError(f"machine id {mach} out of range [0, {m})")
            if dur < 0:
                raise ParseError(f"negative duration {dur}")
            row.append((mach, dur))
        jobs.append(row)
    inst = Instance(name=name, jobs=jobs)
    if sum(inst.job_sum(x) for x in range(n)) > MAX_HORIZON:
        raise ParseError("total processing time exceeds the 64-bit safe range")
    inst.validate()
    return inst, toks[need:]


def parse_jsp(text: str, name: str = "") -> Instance:
    """Parse the plain job-shop format; raises ParseError on bad input."""
    inst, rest = _parse_body(_tokens(text), name)
    if rest:
        raise ParseError(f"{len(rest)} trailing integers after the last job")
    return inst


def parse_et(text: str, name: str = "") -> Instance:
    """Parse the earliness/tardiness format (job rows plus due-date rows)."""
    inst, rest = _parse_body(_tokens(text), name)
    n = inst.n_jobs
    if len(rest) == 4 * n:
        width = 4
    elif len(rest) == 3 * n:
        width = 3
    else:
        raise ParseError(
            f"expected {3 * n} or {4 * n} trailing integers for due-date rows,"
            f" got {len(rest)}"
        )
    release, due, we, wt = [], [], [], []
    for x in range(n):
        row = rest[x * width : (x + 1) * width]
        if width == 4:
            release.append(row[0])
            row = row[1:]
        else:
            release.append(0)
        due.append(row[0])
        we.append(row[1])
        wt.append(row[2])
        if row[0] < 0 or row[1] < 0 or row[2] < 0:
            raise ParseError(f"job {x}: negative due date or weight")
    if max(release) + max(due) > MAX_HORIZON:
        raise ParseError("release/due dates exceed the 64-bit safe range")
    inst.release = release if any(release) else None
    inst.due = due
    inst.we = we
    inst.wt = wt
    inst.validate()
    return inst


def dumps_jsp(instance: Instance) -> str:
    lines = [f"{instance.n_jobs} {instance.n_machines}"]
    for job in instance.jobs:
        lines.append(" ".join(f"{m} {p}" for m, p in job))
    return "\n".join(lines) + "\n"


def dumps_et(instance: Instance) -> str:
    if instance.due is None:
        raise ValueError("instance has no due dates")
    out = dumps_jsp(instance)
    lines = []
    for x in range(instance.n_jobs):
        rel = instance.release[x] if instance.release else 0
        lines.append(f"{rel} {instance.due[x]} {instance.we[x]} {instance.wt[x]}")
    return out + "\n".join(lines) + "\n"


def _format_y(y) -> str:
    if y == math.inf:
        return "inf"
    f = Fraction(y)
    if f.denominator == 1:
        return str(f.numerator)
    return str(float(f))


def derive_time_lag(base: Instance, x, y) -> Instance:
    """Lag-bounded variant of a plain instance, named {base}_{x}_{y}.

    Every task gets a maximal time lag of floor(y * mean duration of its
    job), computed exactly over rationals; y = 0 gives the no-wait
    variant and y = inf leaves every gap unbounded.  Only release shifts
    of x = 0 are supported.
    """
    if x != 0:
        raise ValueError("only x = 0 derivations are supported")
    if y != math.inf:
        y = Fraction(y)
        if y < 0:
            raise ValueError("y must be nonnegative")
    name = f"{base.name}_{x}_{_format_y(y)}"
    lags: list[list[int | None]] = []
    for job in base.jobs:
        m = len(job)
        if y == math.inf:
            lags.append([None] * (m - 1))
            continue
        mean = Fraction(sum(p for _, p in job), m)
        lag = int(Fraction(y) * mean)  # floor for nonnegative values
        lags.append([lag] * (m - 1))
    return Instance(
        name=name,
        jobs=[list(job) for job in base.jobs],
        lags=lags,
        release=list(base.release) if base.release else None,
        due=list(base.due) if base.due else None,
        we=list(base.we) if base.we else None,
        wt=list(base.wt) if base.wt else None,
    )


def _et_cost(instance: Instance, completion: list[int]) -> int:
    cost = 0
    for x in range(instance.n_jobs):
        d = instance.due[x]
        if completion[x] < d:
            cost += instance.we[x] * (d - completion[x])
        elif completion[x] > d:
            cost += instance.wt[x] * (completion[x] - d)
    return cost


def validate_solution(instance: Instance, solution: Solution) -> str | None:
    """Check a schedule against every constraint of its variant.

    Returns None when the schedule is feasible and its stated objective
    matches a recomputation, otherwise a description of the first
    violation found.
    """
    starts = solution.starts
    if len(starts) != instance.n_jobs or any(
        len(row) != len(job) for row, job in zip(starts, instance.jobs)
    ):
        return "start matrix shape does not match the instance"
    no_wait = solution.variant in ("nw-task", "nw-interval")
    for x, job in enumerate(instance.jobs):
        rel = instance.release[x] if instance.release else 0
        if starts[x][0] < rel:
            return f"job {x} starts at {starts[x][0]} before release {rel}"
        for i in range(len(job)):
            if starts[x][i] < 0:
                return f"job {x} task {i} has negative start"
        for i in range(len(job) - 1):
            gap = starts[x][i + 1] - (starts[x][i] + job[i][1])
            if gap < 0:
                return f"job {x} task {i + 1} overlaps task {i}"
            lag = instance.lags[x][i] if instance.lags is not None else None
            if no_wait and gap != 0:
                return f"job {x} waits {gap} between tasks {i} and {i + 1}"
            if lag is not None and gap > lag:
                return (
                    f"job {x} gap {gap} between tasks {i} and {i + 1}"
                    f" exceeds lag {lag}"
                )
    by_machine: dict[int, list[tuple[int, int, int, int]]] = {}
    for x, job in enumerate(instance.jobs):
        for i, (m, p) in enumerate(job):
            by_machine.setdefault(m, []).append((starts[x][i], p, x, i))
    for m, tasks in sorted(by_machine.items()):
        tasks.sort()
        for (s1, p1, x1, i1), (s2, _, x2, i2) in zip(tasks, tasks[1:]):
            if s1 + p1 > s2:
                return (
                    f"machine {m}: job {x1} task {i1} overlaps"
                    f" job {x2} task {i2}"
                )
    if solution.variant == "et":
        completion = [
            starts[x][-1] + instance.jobs[x][-1][1] for x in range(instance.n_jobs)
        ]
        cost = _et_cost(instance, completion)
        if cost != solution.objective:
            return f"stated cost {solution.objective} != recomputed {cost}"
    else:
        cmax = max(
            starts[x][-1] + instance.jobs[x][-1][1] for x in range(instance.n_jobs)
        )
        if cmax != solution.objective:
            return f"stated makespan {solution.objective} != recomputed {cmax}"
    return None


def normalized_cost(instance: Instance, cost) -> float:
    """Cost scaled by the tardiness-weighted total processing time.

    The denominator is sum over jobs of wt_x * (total duration of job x);
    homogeneous under joint scaling of all durations and due dates.
    """
    if instance.wt is None:
        raise ValueError("instance has no tardiness weights")
    denom = sum(
        instance.wt[x] * instance.job_sum(x) for x in range(instance.n_jobs)
    )
    if denom <= 0:
        raise ValueError("normalization denominator must be positive")
    return cost / denom
