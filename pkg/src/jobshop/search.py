"""Restart-based tree search over disjunct Booleans.

Branching picks the most constrained candidate under a weighted-degree
heuristic; value ordering follows the incumbent solution when one exists
(solution-guided search) and otherwise takes the early/low side.  Failures
bump the engine's weights, which persist across restarts and across
objective bounds.  Restarts follow a geometric cutoff schedule, and the
refuted part of each abandoned tree is kept as clausal nogoods over the
Boolean decisions, so no work is repeated.

Optimization runs in two phases: a dichotomic probe of the objective
window with a node cap per probe, then a complete descent that repeatedly
asks for strictly better solutions until infeasibility proves optimality.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .greedy import GreedyStats, greedy_init
from .models import BuiltModel, Solution, extract_solution
from .rng import RandomStream

__all__ = [
    "SearchConfig",
    "SearchStats",
    "OptimizationResult",
    "Decision",
    "geometric_cutoffs",
    "select_decision",
    "choose_branch",
    "extract_restart_nogoods",
    "solve_satisfaction",
    "optimize",
]

HEURISTICS = ("tdom_over_tw", "tdom_plus_bw", "dom_over_wdeg")


@dataclass
class SearchConfig:
    """Knobs for one optimization run; defaults follow the benchmark setup."""

    heuristic: str = "tdom_over_tw"
    restart_base: int = 256
    restart_factor: float = 1.3
    greedy_iterations: int = 1000
    dichotomy_node_limit: int | None = 30000
    time_limit: float | None = None
    fail_limit: int | None = None
    seed: int = 0
    stream_key: int = 0
    use_nogoods: bool = True


@dataclass
class SearchStats:
    nodes: int = 0
    fails: int = 0
    restarts: int = 0
    time: float = 0.0
    greedy: GreedyStats | None = None
    # when set to a list, records the failure count of each restart cycle
    restart_fails: list[int] | None = None


@dataclass
class OptimizationResult:
    """Outcome of optimize(): best solution, proven bound and status.

    status is "optimal" (best equals the proven lower bound), "feasible"
    (a solution exists but optimality is unproven), "infeasible", or
    "unknown" (limits hit before any solution was found).
    """

    best: Solution | None
    lower_bound: int
    status: str
    stats: SearchStats = field(default_factory=SearchStats)


class Decision:
    """One branching decision; flipped in place when its left side fails."""

    __slots__ = ("kind", "var", "sense", "value", "left_value", "level", "is_left")

    def __init__(self, kind, var, sense, value, level):
        self.kind = kind
        self.var = var
        self.sense = sense
        self.value = value
        self.left_value = value
        self.level = level
        self.is_left = True

    def flip(self) -> None:
        self.is_left = False
        if self.kind == "b":
            self.value = 1 - self.left_value
        elif self.sense == "<=":
            self.sense = ">="
            self.value += 1
        else:
            self.sense = "<="
            self.value -= 1

    def apply(self, eng) -> None:
        if self.kind == "b":
            ok = eng.assign_bool(self.var, self.value)
        elif self.sense == "<=":
            ok = eng.set_ub(self.var, self.value)
        else:
            ok = eng.set_lb(self.var, self.value)
        assert ok, "decision application must never conflict immediately"


def geometric_cutoffs(base: int, factor: float):
    """Yields floor(base * factor**k) for k = 0, 1, 2, ..."""
    k = 0
    while True:
        yield int(base * factor**k)
        k += 1


def select_decision(model: BuiltModel, heuristic: str, rng: RandomStream):
    """Most constrained unfixed candidate, ties broken at random.

    Returns ("b", bool_id) or ("i", var_id), or None when every candidate
    is fixed.  Scores are compared exactly with cross multiplication.

    tdom_over_tw   disjuncts: (width(x) + width(y) + 2) / (w(x) + w(y)),
                   minimized; other candidates use plain dom/wdeg.
    tdom_plus_bw   disjuncts: width sum alone, ties preferring the larger
                   Boolean weight.
    dom_over_wdeg  2 / w(b) for Booleans, (width + 1) / w(v) for IntVars.
    """
    eng = model.engine
    lb = eng.lb
    ub = eng.ub
    bval = eng.bval
    bdisj = eng.bdisj
    disj_x = eng.disj_x
    disj_y = eng.disj_y
    wdeg = eng.wdeg
    bwdeg = eng.bwdeg
    ties = []
    if heuristic == "tdom_plus_bw":
        best_n = best_w = 0
        for b in model.branch_bools:
            if bval[b] >= 0:
                continue
            d = bdisj[b]
            if d >= 0:
                x = disj_x[d]
                y = disj_y[d]
                n = ub[x] - lb[x] + ub[y] - lb[y] + 2
            else:
                n = 2
            w = bwdeg[b]
            if not ties or n < best_n or (n == best_n and w > best_w):
                best_n = n
                best_w = w
                ties = [("b", b)]
            elif n == best_n and w == best_w:
                ties.append(("b", b))
        for v in model.branch_ivars:
            if lb[v] >= ub[v]:
                continue
            n = ub[v] - lb[v] + 1
            w = wdeg[v]
            if not ties or n < best_n or (n == best_n and w > best_w):
                best_n = n
                best_w = w
                ties = [("i", v)]
            elif n == best_n and w == best_w:
                ties.append(("i", v))
    else:
        tw = heuristic == "tdom_over_tw"
        best_n = best_d = 0
        for b in model.branch_bools:
            if bval[b] >= 0:
                continue
            d = bdisj[b]
            if tw and d >= 0:
                x = disj_x[d]
                y = disj_y[d]
                n = ub[x] - lb[x] + ub[y] - lb[y] + 2
                den = wdeg[x] + wdeg[y]
            else:
                n = 2
                den = bwdeg[b]
            if not ties:
                best_n = n
                best_d = den
                ties = [("b", b)]
            else:
                c = n * best_d - best_n * den
                if c < 0:
                    best_n = n
                    best_d = den
                    ties = [("b", b)]
                elif c == 0:
                    ties.append(("b", b))
        for v in model.branch_ivars:
            if lb[v] >= ub[v]:
                continue
            n = ub[v] - lb[v] + 1
            den = wdeg[v]
            if not ties:
                best_n = n
                best_d = den
                ties = [("i", v)]
            else:
                c = n * best_d - best_n * den
                if c < 0:
                    best_n = n
                    best_d = den
                    ties = [("i", v)]
                elif c == 0:
                    ties.append(("i", v))
    if not ties:
        return None
    if len(ties) == 1:
        return ties[0]
    return rng.choice(ties)


def choose_branch(eng, kind, var, guide_bools=None, guide_ints=None):
    """Left branch for a candidate: (sense, value).

    Booleans take the incumbent's value when available, else 0 (the early
    side).  IntVars split at the incumbent value clamped into the current
    domain, preferring the lower half; without guidance they assign the
    minimum.  The chosen branch is always applicable without conflict.
    """
    if kind == "b":
        v = 0
        if guide_bools is not None:
            g = guide_bools[var]
            if g >= 0:
                v = g
        return "=", v
    lo = eng.lb[var]
    hi = eng.ub[var]
    if guide_ints is not None:
        w = guide_ints[var]
        if w < lo:
            w = lo
        elif w > hi:
            w = hi
        if w < hi:
            return "<=", w
        return ">=", w
    return "<=", lo


def extract_restart_nogoods(decisions) -> list[list[tuple[int, int]]]:
    """Clausal nogoods of the refuted left branches on the current path.

    Walks the decision stack top-down collecting left (positive) Boolean
    decisions; each right (refuted) Boolean decision d_k yields one nogood
    forbidding the positive prefix together with d_k's left value.  The
    first IntVar decision ends extraction: bound decisions cannot join a
    clause over Booleans.
    """
    prefix: list[tuple[int, int]] = []
    out: list[list[tuple[int, int]]] = []
    for dec in decisions:
        if dec.kind != "b":
            break
        if dec.is_left:
            prefix.append((dec.var, dec.value))
        else:
            out.append(prefix + [(dec.var, dec.left_value)])
    return out


def solve_satisfaction(
    model: BuiltModel,
    bound: int | None,
    config: SearchConfig,
    rng: RandomStream,
    incumbent: Solution | None = None,
    node_limit: int | None = None,
    deadline: float | None = None,
    stats: SearchStats | None = None,
):
    """Satisfy the model with objective <= bound.

    Returns ("sat", solution), ("unsat", None) or ("unknown", None); the
    engine is restored to its entry state in all cases.  When nogood
    recording is disabled restarts are disabled with it, keeping the
    search complete.
    """
    eng = model.engine
    if stats is None:
        stats = SearchStats()
    base = eng.save_level()
    ok = bound is None or eng.set_ub(model.objective, bound)
    if ok:
        ok = eng.propagate() is None
    if not ok:
        eng.restore_to(base)
        return "unsat", None
    root = eng.save_level()
    eng.root_level = root
    restarts_on = config.use_nogoods
    cutoffs = geometric_cutoffs(config.restart_base, config.restart_factor)
    cutoff = next(cutoffs)
    fails_here = 0
    nodes_here = 0
    stack: list[Decision] = []
    guide_b = incumbent.guide_bools if incumbent is not None else None
    guide_i = incumbent.guide_ints if incumbent is not None else None

    def done(status, sol=None):
        eng.restore_to(base)
        eng.root_level = None
        return status, sol

    while True:
        conflict = eng.propagate()
        if conflict is None:
            sel = select_decision(model, config.heuristic, rng)
            if sel is None:
                sol = extract_solution(model)
                return done("sat", sol)
            nodes_here += 1
            stats.nodes += 1
            if node_limit is not None and nodes_here > node_limit:
                return done("unknown")
            if (
                deadline is not None
                and not nodes_here & 63
                and time.monotonic() >= deadline
            ):
                return done("unknown")
            kind, var = sel
            sense, value = choose_branch(eng, kind, var, guide_b, guide_i)
            dec = Decision(kind, var, sense, value, eng.save_level())
            stack.append(dec)
            dec.apply(eng)
        else:
            stats.fails += 1
            fails_here += 1
            if deadline is not None and time.monotonic() >= deadline:
                return done("unknown")
            if config.fail_limit is not None and stats.fails >= config.fail_limit:
                return done("unknown")
            while stack and not stack[-1].is_left:
                stack.pop()
            if not stack:
                return done("unsat")
            dec = stack[-1]
            dec.flip()
            if restarts_on and fails_here >= cutoff:
                nogoods = extract_restart_nogoods(stack)
                eng.restore_to(root)
                stack.clear()
                stats.restarts += 1
                if stats.restart_fails is not None:
                    stats.restart_fails.append(fails_here)
                fails_here = 0
                cutoff = next(cutoffs)
                feasible = True
                for ng in nogoods:
                    if not eng.post_nogood(ng):
                        feasible = False
                        break
                if feasible:
                    feasible = eng.rescan_clauses()
                if not feasible:
                    return done("unsat")
                # the loop's propagate() call flushes the re-derived units
            else:
                eng.restore_to(dec.level)
                dec.apply(eng)


def optimize(
    model: BuiltModel, config: SearchConfig, time_limit: float | None = None
) -> OptimizationResult:
    """Minimize the model objective; see OptimizationResult for statuses.

    Phase 0 seeds the incumbent with greedy descents (variants with job
    bounds only).  Phase 1 narrows the objective window dichotomically
    with a node cap per probe; an inconclusive probe moves the working
    bound up without any optimality claim.  Phase 2 repeatedly solves for
    strictly better solutions without node caps; proving the last bound
    infeasible proves optimality.
    """
    eng = model.engine
    t0 = time.monotonic()
    limit = time_limit if time_limit is not None else config.time_limit
    deadline = t0 + limit if limit is not None else None
    stats = SearchStats()
    rng = RandomStream(config.seed, config.stream_key)
    if eng.propagate() is not None:
        stats.time = time.monotonic() - t0
        return OptimizationResult(None, model.lb0, "infeasible", stats)
    obj = model.objective
    proven_lb = eng.lb[obj]
    struct_ub = eng.ub[obj]
    best: Solution | None = None
    if model.job_bounds is not None and config.greedy_iterations > 0:
        stats.greedy = GreedyStats()
        best = greedy_init(
            model, config.greedy_iterations, rng, deadline, stats.greedy
        )
    cur_ub = best.objective if best is not None else struct_ub
    infeasible = False
    lo = proven_lb
    cap = config.dichotomy_node_limit
    if cap:
        while lo < cur_ub:
            if deadline is not None and time.monotonic() >= deadline:
                break
            target = (lo + cur_ub) // 2
            status, sol = solve_satisfaction(
                model,
                target,
                config,
                rng,
                incumbent=best,
                node_limit=cap,
                deadline=deadline,
                stats=stats,
            )
            eng.clear_clauses()
            if status == "sat":
                best = sol
                cur_ub = sol.objective
            else:
                if status == "unsat":
                    proven_lb = max(proven_lb, target + 1)
                lo = target + 1
    while True:
        if best is not None and proven_lb >= best.objective:
            break
        if deadline is not None and time.monotonic() >= deadline:
            break
        bound = best.objective - 1 if best is not None else struct_ub
        status, sol = solve_satisfaction(
            model, bound, config, rng, incumbent=best, deadline=deadline, stats=stats
        )
        eng.clear_clauses()
        if status == "sat":
            best = sol
        elif status == "unsat":
            proven_lb = max(proven_lb, bound + 1)
            if best is None:
                infeasible = True
                break
        else:
            break
    stats.time = time.monotonic() - t0
    if best is not None:
        if proven_lb >= best.objective:
            return OptimizationResult(best, best.objective, "optimal", stats)
        return OptimizationResult(best, proven_lb, "feasible", stats)
    if infeasible:
        return OptimizationResult(None, proven_lb, "infeasible", stats)
    return OptimizationResult(None, proven_lb, "unknown", stats)
