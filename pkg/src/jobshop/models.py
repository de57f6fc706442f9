"""Instance data and model builders for job-shop scheduling variants.

Four problem flavours share one disjunctive core:

* jsp       minimize makespan,
* tl        jsp plus maximal time lags between consecutive tasks of a job,
* nw        no-wait: zero time lags, modelled either on task start
            variables (nw-task) or on one start variable per job with
            forbidden-interval disjuncts (nw-interval),
* et        job-shop with due dates, minimizing weighted earliness plus
            tardiness of job completions.

Builders return a BuiltModel bundling the engine with the variable maps
the search and the greedy initializer need.  Variable creation order is
deterministic, so runs are reproducible.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field

from .engine import Engine

__all__ = [
    "Instance",
    "Solution",
    "BuiltModel",
    "stretched",
    "trivial_bounds",
    "build_jsp",
    "build_tljsp",
    "build_etjsp",
    "build_nwjsp_task",
    "build_nwjsp_interval",
    "get_f_intervals",
    "extract_solution",
]

VARIANTS = ("jsp", "tl", "et", "nw-task", "nw-interval")


@dataclass
class Instance:
    """A job-shop instance.

    jobs[x] lists the tasks of job x in processing order as (machine,
    duration) pairs.  lags[x][i], when present, bounds the idle time
    between the end of task i and the start of task i+1 of job x from
    above; a None entry means the gap is unbounded.  release/due/we/wt
    are per-job and only present for variants that use them.
    """

    name: str
    jobs: list[list[tuple[int, int]]]
    lags: list[list[int | None]] | None = None
    release: list[int] | None = None
    due: list[int] | None = None
    we: list[int] | None = None
    wt: list[int] | None = None

    @property
    def n_jobs(self) -> int:
        return len(self.jobs)

    @property
    def n_machines(self) -> int:
        return 1 + max(m for job in self.jobs for m, _ in job)

    def job_sum(self, x: int) -> int:
        return sum(p for _, p in self.jobs[x])

    def validate(self) -> None:
        """Raise ValueError on structural problems (shop shape, ranges)."""
        if not self.jobs or any(not job for job in self.jobs):
            raise ValueError("instance needs at least one task per job")
        for x, job in enumerate(self.jobs):
            machines = [m for m, _ in job]
            if len(set(machines)) != len(machines):
                raise ValueError(f"job {x} visits a machine twice")
            for m, p in job:
                if m < 0:
                    raise ValueError(f"job {x}: negative machine id {m}")
                if p < 0:
                    raise ValueError(f"job {x}: negative duration {p}")
        if self.lags is not None:
            for x, row in enumerate(self.lags):
                if len(row) != len(self.jobs[x]) - 1:
                    raise ValueError(f"job {x}: lag row has wrong length")
                for g in row:
                    if g is not None and g < 0:
                        raise ValueError(f"job {x}: negative time lag")
        for attr in ("release", "due", "we", "wt"):
            vals = getattr(self, attr)
            if vals is not None and len(vals) != len(self.jobs):
                raise ValueError(f"{attr} must have one entry per job")
        total = sum(self.job_sum(x) for x in range(len(self.jobs)))
        horizon = total + max(
            [0]
            + (self.release or [0])
            + (self.due or [0])
        )
        if horizon > 2**62:
            raise ValueError("horizon exceeds 64-bit safe range")


@dataclass
class Solution:
    """A complete schedule: one start time per task, plus its cost."""

    instance: str
    variant: str
    starts: list[list[int]]
    objective: int
    seed: int | None = None
    stats: dict | None = None
    # incumbent guidance payloads, not part of the serialized form
    guide_bools: list[int] | None = field(default=None, repr=False, compare=False)
    guide_ints: list[int] | None = field(default=None, repr=False, compare=False)

    def to_json(self) -> str:
        return json.dumps(
            {
                "instance": self.instance,
                "variant": self.variant,
                "starts": self.starts,
                "objective": self.objective,
                "seed": self.seed,
                "stats": self.stats,
            }
        )

    @staticmethod
    def from_json(text: str) -> "Solution":
        d = json.loads(text)
        return Solution(
            instance=d["instance"],
            variant=d["variant"],
            starts=[list(row) for row in d["starts"]],
            objective=d["objective"],
            seed=d.get("seed"),
            stats=d.get("stats"),
        )


@dataclass
class BuiltModel:
    """An engine plus the variable bookkeeping search and greedy need.

    starts[x] holds the engine variables of job x (one per task; a single
    job-start variable for the no-wait models).  branch_bools and
    branch_ivars together form the decision candidate set: a state where
    all of them are fixed extends to a full solution by setting every
    variable to its lower bound.  job_disjuncts[x] lists (bool, other_job,
    left_value) for every disjunct touching job x, where left_value is the
    value that puts job x on the early side.  job_bounds[x] is (first_var,
    last_var, stretched_span) for the greedy's job-placement step, with
    stretched_span None when some lag is unbounded.
    """

    engine: Engine
    variant: str
    instance: Instance
    starts: list[list[int]]
    objective: int
    branch_bools: list[int]
    branch_ivars: list[int]
    job_disjuncts: list[list[tuple[int, int, int]]]
    job_bounds: list[tuple[int, int, int | None]] | None = None
    heads: list[list[int]] | None = None
    lb0: int = 0
    ub0: int = 0
    et_flags: tuple[list[int], list[int]] | None = None


def stretched(instance: Instance, x: int) -> int | None:
    """Largest start-to-start span of job x: durations plus maximal lags.

    Covers tasks 1..m-1, i.e. the last task's duration is not included.
    Returns None when some lag of the job is unbounded.
    """
    job = instance.jobs[x]
    if instance.lags is None:
        return None
    row = instance.lags[x]
    span = 0
    for i in range(len(job) - 1):
        g = row[i]
        if g is None:
            return None
        span += job[i][1] + g
    return span


def trivial_bounds(instance: Instance, variant: str) -> tuple[int, int]:
    """Cheap lower/upper bounds on the objective of the given variant.

    The lower bound for the makespan variants is the larger of the longest
    job and the heaviest machine load.  The upper bound schedules jobs one
    after another; for the lag variants each job is budgeted at its fully
    stretched span so the greedy's job-placement bound always fits.  For
    et the bound is the cost of that sequential schedule and the lower
    bound is zero.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}")
    jobs = instance.jobs
    sums = [instance.job_sum(x) for x in range(len(jobs))]
    loads: dict[int, int] = defaultdict(int)
    for job in jobs:
        for m, p in job:
            loads[m] += p
    lb = max(max(sums), max(loads.values()))
    rel = max(instance.release) if instance.release else 0
    if variant == "jsp":
        return lb, sum(sums) + rel
    if variant in ("nw-task", "nw-interval", "tl"):
        ub = 0
        for x, job in enumerate(jobs):
            span = stretched(instance, x)
            if span is None:
                span = sums[x] - job[-1][1]
            ub += span + job[-1][1]
        return lb, ub + rel
    # et: cost of the release-respecting sequential schedule
    cost = 0
    t = 0
    for x, job in enumerate(jobs):
        start = max(t, instance.release[x] if instance.release else 0)
        completion = start + sums[x]
        d = instance.due[x]
        if completion < d:
            cost += instance.we[x] * (d - completion)
        elif completion > d:
            cost += instance.wt[x] * (completion - d)
        t = completion
    return 0, cost


def _start_vars(eng: Engine, instance: Instance, ub: int) -> list[list[int]]:
    """One start variable per task: [release + head, ub - remaining]."""
    starts = []
    for x, job in enumerate(instance.jobs):
        total = sum(p for _, p in job)
        rel = instance.release[x] if instance.release else 0
        head = 0
        row = []
        for m, p in job:
            row.append(eng.new_int_var(rel + head, ub - (total - head)))
            head += p
        starts.append(row)
    return starts


def _post_machine_disjuncts(eng, instance, starts):
    """All pairwise disjuncts per machine; returns (bools, job_disjuncts)."""
    by_machine: dict[int, list[tuple[int, int, int]]] = defaultdict(list)
    for x, job in enumerate(instance.jobs):
        for i, (m, p) in enumerate(job):
            by_machine[m].append((x, i, p))
    bools: list[int] = []
    job_disj: list[list[tuple[int, int, int]]] = [[] for _ in instance.jobs]
    for m in sorted(by_machine):
        tasks = by_machine[m]
        for a in range(len(tasks)):
            xa, ia, pa = tasks[a]
            for c in range(a + 1, len(tasks)):
                xb, ib, pb = tasks[c]
                b = eng.post_disjunct(starts[xa][ia], pa, starts[xb][ib], pb)
                bools.append(b)
                job_disj[xa].append((b, xb, 0))  # 0 puts xa's task first
                job_disj[xb].append((b, xa, 1))
    return bools, job_disj


def _makespan_var(eng, instance, starts, lb, ub):
    cmax = eng.new_int_var(lb, ub)
    for x, job in enumerate(instance.jobs):
        eng.post_precedence(starts[x][-1], job[-1][1], cmax)
    return cmax


def build_jsp(instance: Instance, ub: int | None = None) -> BuiltModel:
    """Classic job shop, makespan objective."""
    instance.validate()
    lb0, ub0 = trivial_bounds(instance, "jsp")
    if ub is None:
        ub = ub0
    eng = Engine()
    starts = _start_vars(eng, instance, ub)
    for x, job in enumerate(instance.jobs):
        for i in range(len(job) - 1):
            eng.post_precedence(starts[x][i], job[i][1], starts[x][i + 1])
    cmax = _makespan_var(eng, instance, starts, lb0, ub)
    bools, job_disj = _post_machine_disjuncts(eng, instance, starts)
    eng.seal()
    return BuiltModel(
        engine=eng,
        variant="jsp",
        instance=instance,
        starts=starts,
        objective=cmax,
        branch_bools=bools,
        branch_ivars=[],
        job_disjuncts=job_disj,
        job_bounds=None,
        lb0=lb0,
        ub0=ub,
    )


def build_tljsp(instance: Instance, ub: int | None = None) -> BuiltModel:
    """Job shop with maximal time lags between consecutive tasks."""
    instance.validate()
    if instance.lags is None:
        raise ValueError("time-lag model needs instance.lags")
    lb0, ub0 = trivial_bounds(instance, "tl")
    if ub is None:
        ub = ub0
    eng = Engine()
    starts = _start_vars(eng, instance, ub)
    for x, job in enumerate(instance.jobs):
        for i in range(len(job) - 1):
            p = job[i][1]
            eng.post_precedence(starts[x][i], p, starts[x][i + 1])
            g = instance.lags[x][i]
            if g is not None:
                # start(i+1) <= start(i) + p + lag, as a reverse arc
                eng.post_precedence(starts[x][i + 1], -(p + g), starts[x][i])
    cmax = _makespan_var(eng, instance, starts, lb0, ub)
    bools, job_disj = _post_machine_disjuncts(eng, instance, starts)
    eng.seal()
    job_bounds = [
        (starts[x][0], starts[x][-1], stretched(instance, x))
        for x in range(instance.n_jobs)
    ]
    return BuiltModel(
        engine=eng,
        variant="tl",
        instance=instance,
        starts=starts,
        objective=cmax,
        branch_bools=bools,
        branch_ivars=[],
        job_disjuncts=job_disj,
        job_bounds=job_bounds,
        lb0=lb0,
        ub0=ub,
    )


def build_etjsp(instance: Instance, ub_cost: int | None = None) -> BuiltModel:
    """Job shop with weighted earliness/tardiness of job completions."""
    instance.validate()
    if instance.due is None or instance.we is None or instance.wt is None:
        raise ValueError("earliness/tardiness model needs due, we and wt")
    _, cost0 = trivial_bounds(instance, "et")
    total = sum(instance.job_sum(x) for x in range(instance.n_jobs))
    horizon = total + max(
        max(instance.release) if instance.release else 0, max(instance.due)
    )
    eng = Engine()
    starts = _start_vars(eng, instance, horizon)
    for x, job in enumerate(instance.jobs):
        for i in range(len(job) - 1):
            eng.post_precedence(starts[x][i], job[i][1], starts[x][i + 1])
    bools, job_disj = _post_machine_disjuncts(eng, instance, starts)
    completions = [
        (starts[x][-1], instance.jobs[x][-1][1]) for x in range(instance.n_jobs)
    ]
    et_sum, es, ls, _, _ = eng.post_et_objective(
        completions, instance.due, instance.we, instance.wt
    )
    eng.seal()
    cost_ub = cost0 if ub_cost is None else min(cost0, ub_cost)
    if not eng.set_ub(et_sum, cost_ub):
        raise ValueError("trivial cost bound is infeasible")
    # fixing the last starts pins the flags and amounts, so they join
    # the branching candidates alongside the disjuncts and flags
    last_vars = [starts[x][-1] for x in range(instance.n_jobs)]
    return BuiltModel(
        engine=eng,
        variant="et",
        instance=instance,
        starts=starts,
        objective=et_sum,
        branch_bools=bools + es + ls,
        branch_ivars=last_vars,
        job_disjuncts=job_disj,
        job_bounds=None,
        lb0=0,
        ub0=cost_ub,
        et_flags=(es, ls),
    )


def _job_heads(instance: Instance) -> list[list[int]]:
    heads = []
    for job in instance.jobs:
        h = 0
        row = []
        for _, p in job:
            row.append(h)
            h += p
        heads.append(row)
    return heads


def _check_no_wait(instance: Instance) -> None:
    if instance.lags is None:
        raise ValueError("no-wait model needs zero lags, got none")
    for row in instance.lags:
        if any(g != 0 for g in row):
            raise ValueError("no-wait model needs all lags zero")


def build_nwjsp_task(instance: Instance, ub: int | None = None) -> BuiltModel:
    """No-wait job shop on one start variable per job, task disjuncts.

    With zero lags every task starts at a fixed offset (its head) from
    the job start, so tasks i of job a and j of job b on a shared machine
    yield the disjunct  J_a + (h_i + p_i - h_j) <= J_b  or symmetric.
    """
    instance.validate()
    _check_no_wait(instance)
    lb0, ub0 = trivial_bounds(instance, "nw-task")
    if ub is None:
        ub = ub0
    heads = _job_heads(instance)
    eng = Engine()
    jvars = []
    for x in range(instance.n_jobs):
        rel = instance.release[x] if instance.release else 0
        jvars.append(eng.new_int_var(rel, ub - instance.job_sum(x)))
    cmax = eng.new_int_var(lb0, ub)
    for x in range(instance.n_jobs):
        eng.post_precedence(jvars[x], instance.job_sum(x), cmax)
    by_machine: dict[int, list[tuple[int, int, int]]] = defaultdict(list)
    for x, job in enumerate(instance.jobs):
        for i, (m, p) in enumerate(job):
            by_machine[m].append((x, heads[x][i], p))
    bools: list[int] = []
    job_disj: list[list[tuple[int, int, int]]] = [[] for _ in instance.jobs]
    for m in sorted(by_machine):
        tasks = by_machine[m]
        for a in range(len(tasks)):
            xa, ha, pa = tasks[a]
            for c in range(a + 1, len(tasks)):
                xb, hb, pb = tasks[c]
                b = eng.post_disjunct(jvars[xa], ha + pa - hb, jvars[xb], hb + pb - ha)
                bools.append(b)
                job_disj[xa].append((b, xb, 0))
                job_disj[xb].append((b, xa, 1))
    eng.seal()
    return BuiltModel(
        engine=eng,
        variant="nw-task",
        instance=instance,
        starts=[[v] for v in jvars],
        objective=cmax,
        branch_bools=bools,
        branch_ivars=[],
        job_disjuncts=job_disj,
        job_bounds=[(v, v, 0) for v in jvars],
        heads=heads,
        lb0=lb0,
        ub0=ub,
    )


def get_f_intervals(job_x, job_y) -> list[tuple[int, int]]:
    """Maximal forbidden intervals for the start difference J_y - J_x.

    job_x and job_y are task lists of (machine, duration).  Two no-wait
    jobs overlap on a shared machine exactly when their start difference
    lies in an open interval determined by the task offsets; the union of
    those per-machine intervals is returned as a sorted list of disjoint
    maximal open intervals (lo, hi).  Intervals that merely touch are not
    merged: the union of open (a, b) and (b, c) still allows the point b.
    """
    offs: dict[int, tuple[int, int]] = {}
    h = 0
    for m, p in job_x:
        offs[m] = (h, p)
        h += p
    events: list[tuple[int, int]] = []
    h = 0
    for m, p in job_y:
        if m in offs:
            hx, px = offs[m]
            lo = hx - (h + p)   # below lo, y's task ends before x's starts
            hi = (hx + px) - h  # above hi, y's task starts after x's ends
            if lo < hi:
                events.append((lo, 1))
                events.append((hi, -1))
        h += p
    events.sort(key=lambda e: (e[0], e[1]))
    out: list[tuple[int, int]] = []
    depth = 0
    start = 0
    for pos, step in events:
        if depth == 0:
            start = pos
        depth += step
        if depth == 0:
            out.append((start, pos))
    return out


def build_nwjsp_interval(instance: Instance, ub: int | None = None) -> BuiltModel:
    """No-wait job shop with merged forbidden-interval disjuncts.

    For each job pair the per-machine overlap intervals are merged first,
    so one Boolean per maximal interval decides on which side of it the
    start difference falls.  Never uses more Booleans than the task model
    and usually far fewer.
    """
    instance.validate()
    _check_no_wait(instance)
    lb0, ub0 = trivial_bounds(instance, "nw-interval")
    if ub is None:
        ub = ub0
    heads = _job_heads(instance)
    eng = Engine()
    jvars = []
    for x in range(instance.n_jobs):
        rel = instance.release[x] if instance.release else 0
        jvars.append(eng.new_int_var(rel, ub - instance.job_sum(x)))
    cmax = eng.new_int_var(lb0, ub)
    for x in range(instance.n_jobs):
        eng.post_precedence(jvars[x], instance.job_sum(x), cmax)
    bools: list[int] = []
    job_disj: list[list[tuple[int, int, int]]] = [[] for _ in instance.jobs]
    n = instance.n_jobs
    for a in range(n):
        for c in range(a + 1, n):
            for lo, hi in get_f_intervals(instance.jobs[a], instance.jobs[c]):
                # delta = J_c - J_a must avoid (lo, hi):
                # value 0 pins delta <= lo, value 1 pins delta >= hi
                b = eng.post_disjunct(jvars[c], -lo, jvars[a], hi)
                bools.append(b)
                job_disj[a].append((b, c, 1))  # delta >= hi puts a early
                job_disj[c].append((b, a, 0))
    eng.seal()
    return BuiltModel(
        engine=eng,
        variant="nw-interval",
        instance=instance,
        starts=[[v] for v in jvars],
        objective=cmax,
        branch_bools=bools,
        branch_ivars=[],
        job_disjuncts=job_disj,
        job_bounds=[(v, v, 0) for v in jvars],
        heads=heads,
        lb0=lb0,
        ub0=ub,
    )


_BUILDERS = {
    "jsp": build_jsp,
    "tl": build_tljsp,
    "et": build_etjsp,
    "nw-task": build_nwjsp_task,
    "nw-interval": build_nwjsp_interval,
}


def build_model(instance: Instance, variant: str, ub: int | None = None) -> BuiltModel:
    """Dispatch to the builder for the given variant name."""
    try:
        builder = _BUILDERS[variant]
    except KeyError:
        raise ValueError(f"unknown variant {variant!r}") from None
    return builder(instance, ub)


def extract_solution(model: BuiltModel, seed: int | None = None) -> Solution:
    """Read a schedule off the engine by pinning every start to its lb.

    Sound once propagation is at fixpoint with every branching candidate
    fixed: the remaining constraints are difference bounds, for which the
    least solution assigns each variable its lower bound.
    """
    eng = model.engine
    if model.heads is not None:
        starts = [
            [eng.lb[model.starts[x][0]] + h for h in model.heads[x]]
            for x in range(model.instance.n_jobs)
        ]
    else:
        starts = [[eng.lb[v] for v in row] for row in model.starts]
    return Solution(
        instance=model.instance.name,
        variant=model.variant,
        starts=starts,
        objective=eng.lb[model.objective],
        seed=seed,
        guide_bools=list(eng.bval),
        guide_ints=list(eng.lb),
    )
