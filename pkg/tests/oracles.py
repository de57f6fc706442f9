"""Independent reference implementations used to check the solver.

Everything here enumerates machine sequencings exhaustively, with
longest-path or LP timing underneath.  Nothing imports the engine, so
agreement between these oracles and the solver is meaningful evidence of
correctness on the small instances where enumeration is affordable.

The makespan oracle evaluates all sequencings at once with batched
max-plus matrix powers; the one-sequencing-at-a-time relaxation version
is kept as `brute_force_makespan_naive` and cross-checked against it.
"""

from __future__ import annotations

import itertools

import numpy as np


def _machine_tasks(jobs):
    by_machine = {}
    for x, job in enumerate(jobs):
        for i, (m, p) in enumerate(job):
            by_machine.setdefault(m, []).append((x, i))
    return by_machine


def _edges_for(jobs, lags, sequencing):
    """Difference constraints start[b] - start[a] >= w as (a, b, w) triples.

    Node ids are (job, task).  Covers job chains, optional maximal lags
    (reverse edges), and the machine orders fixed by the sequencing.
    """
    edges = []
    for x, job in enumerate(jobs):
        for i in range(len(job) - 1):
            p = job[i][1]
            edges.append(((x, i), (x, i + 1), p))
            if lags is not None and lags[x][i] is not None:
                edges.append(((x, i + 1), (x, i), -(p + lags[x][i])))
    for m, order in sequencing.items():
        for (xa, ia), (xb, ib) in zip(order, order[1:]):
            edges.append(((xa, ia), (xb, ib), jobs[xa][ia][1]))
    return edges


def _longest_paths(jobs, release, edges):
    """Least start times satisfying all difference constraints.

    Bellman-Ford style relaxation from the release dates; returns None
    when a positive cycle makes the system infeasible.
    """
    starts = {}
    for x, job in enumerate(jobs):
        rel = release[x] if release else 0
        for i in range(len(job)):
            starts[(x, i)] = rel if i == 0 else 0
    n = len(starts)
    for it in range(n + 1):
        changed = False
        for a, b, w in edges:
            nv = starts[a] + w
            if nv > starts[b]:
                starts[b] = nv
                changed = True
        if not changed:
            return starts
    return None  # still changing after n rounds: positive cycle


def brute_force_makespan_naive(jobs, lags=None, release=None):
    """Exact optimum for jsp/tl/nw by enumerating machine sequencings.

    Returns the optimal makespan, or None when every sequencing is
    infeasible (possible with tight lags).  One relaxation per
    sequencing; transparent but slow beyond 3 tasks per machine.
    """
    by_machine = _machine_tasks(jobs)
    machines = sorted(by_machine)
    best = None
    for perm_combo in itertools.product(
        *(itertools.permutations(by_machine[m]) for m in machines)
    ):
        sequencing = dict(zip(machines, perm_combo))
        edges = _edges_for(jobs, lags, sequencing)
        starts = _longest_paths(jobs, release, edges)
        if starts is None:
            continue
        mk = max(
            starts[(x, len(job) - 1)] + job[-1][1] for x, job in enumerate(jobs)
        )
        if best is None or mk < best:
            best = mk
    return best


_NEG = -(2**40)  # -inf stand-in that survives a few int64 additions


def brute_force_makespan(jobs, lags=None, release=None):
    """Same contract as the naive version, evaluated in batch.

    Stacks the longest-path adjacency matrix of every machine sequencing
    into one tensor and relaxes start times for all of them together;
    a change on the extra relaxation round marks an infeasible
    sequencing (positive cycle).
    """
    by_machine = _machine_tasks(jobs)
    machines = sorted(by_machine)
    ids = {}
    for x, job in enumerate(jobs):
        for i in range(len(job)):
            ids[(x, i)] = len(ids)
    nv = len(ids)
    base = np.full((nv, nv), _NEG, dtype=np.int64)
    np.fill_diagonal(base, 0)
    for x, job in enumerate(jobs):
        for i in range(len(job) - 1):
            p = job[i][1]
            a, b = ids[(x, i)], ids[(x, i + 1)]
            base[a, b] = max(base[a, b], p)
            if lags is not None and lags[x][i] is not None:
                base[b, a] = max(base[b, a], -(p + lags[x][i]))
    init = np.zeros(nv, dtype=np.int64)
    if release:
        for x in range(len(jobs)):
            init[ids[(x, 0)]] = release[x]
    last_ids = np.array([ids[(x, len(job) - 1)] for x, job in enumerate(jobs)])
    last_ps = np.array([job[-1][1] for job in jobs], dtype=np.int64)

    perms = [list(itertools.permutations(by_machine[m])) for m in machines]
    counts = [len(p) for p in perms]
    total = 1
    for c in counts:
        total *= c
    # mixed-radix strides: combo index -> one permutation per machine
    strides = []
    s = 1
    for c in reversed(counts):
        strides.append(s)
        s *= c
    strides.reverse()

    best = None
    for c0 in range(0, total, 8192):
        combo = np.arange(c0, min(c0 + 8192, total))
        adj = np.repeat(base[None, :, :], len(combo), axis=0)
        for m_idx, order_list in enumerate(perms):
            digit = (combo // strides[m_idx]) % counts[m_idx]
            for k, order in enumerate(order_list):
                sel = np.nonzero(digit == k)[0]
                for (xa, ia), (xb, ib) in zip(order, order[1:]):
                    a, b = ids[(xa, ia)], ids[(xb, ib)]
                    w = jobs[xa][ia][1]
                    adj[sel, a, b] = np.maximum(adj[sel, a, b], w)
        starts = np.repeat(init[None, :], len(combo), axis=0)
        for _ in range(nv - 1):
            starts = np.maximum(starts, (starts[:, :, None] + adj).max(axis=1))
        extra = np.maximum(starts, (starts[:, :, None] + adj).max(axis=1))
        feasible = (extra == starts).all(axis=1)
        if not feasible.any():
            continue
        mk = (starts[:, last_ids] + last_ps[None, :]).max(axis=1)
        chunk_best = int(mk[feasible].min())
        if best is None or chunk_best < best:
            best = chunk_best
    return best


def forbidden_deltas(job_x, job_y, lo, hi):
    """Pointwise overlap test for job-pair start differences in [lo, hi].

    Returns the set of deltas where the two no-wait jobs collide on some
    shared machine.  Used to validate the interval computation.
    """
    heads_x = {}
    h = 0
    for m, p in job_x:
        heads_x[m] = (h, p)
        h += p
    out = set()
    for delta in range(lo, hi + 1):
        h = 0
        for m, p in job_y:
            if m in heads_x:
                hx, px = heads_x[m]
                if hx < delta + h + p and delta + h < hx + px:
                    out.add(delta)
                    break
            h += p
    return out


def brute_force_et(jobs, due, we, wt, release=None):
    """Exact minimum weighted earliness/tardiness cost.

    Enumerates machine sequencings; for each, timing is a small linear
    program (total unimodularity makes the LP optimum integral).  Uses
    scipy's HiGHS solver.
    """
    from scipy.optimize import linprog

    by_machine = _machine_tasks(jobs)
    machines = sorted(by_machine)
    n = len(jobs)
    ids = {}
    for x, job in enumerate(jobs):
        for i in range(len(job)):
            ids[(x, i)] = len(ids)
    nt = len(ids)
    # variables: starts, then E_x, then L_x
    ne = nt + 2 * n
    cost = [0.0] * nt + [float(w) for w in we] + [float(w) for w in wt]
    best = None
    for perm_combo in itertools.product(
        *(itertools.permutations(by_machine[m]) for m in machines)
    ):
        a_ub = []
        b_ub = []

        def le(coefs, rhs):
            row = [0.0] * ne
            for var, c in coefs:
                row[var] += c
            a_ub.append(row)
            b_ub.append(float(rhs))

        for x, job in enumerate(jobs):
            for i in range(len(job) - 1):
                # start[i] + p <= start[i+1]
                le([(ids[(x, i)], 1.0), (ids[(x, i + 1)], -1.0)], -job[i][1])
            d = due[x]
            last = ids[(x, len(job) - 1)]
            p_last = job[-1][1]
            # E_x >= due - completion;  L_x >= completion - due
            le([(last, -1.0), (nt + x, -1.0)], -(d - p_last))
            le([(last, 1.0), (nt + n + x, -1.0)], d - p_last)
        for m, order in zip(machines, perm_combo):
            for (xa, ia), (xb, ib) in zip(order, order[1:]):
                le([(ids[(xa, ia)], 1.0), (ids[(xb, ib)], -1.0)], -jobs[xa][ia][1])
        bounds = []
        for x, job in enumerate(jobs):
            rel = release[x] if release else 0
            for i in range(len(job)):
                bounds.append((float(rel) if i == 0 else 0.0, None))
        bounds.extend([(0.0, None)] * (2 * n))
        res = linprog(cost, A_ub=a_ub, b_ub=b_ub, bounds=bounds, method="highs")
        if not res.success:
            continue
        val = round(res.fun)
        if best is None or val < best:
            best = val
    return best


def fixpoint_oracle(n_vars, domains, precedences, disjuncts, bools=None):
    """Naive propagation to fixpoint over the same constraint semantics.

    domains: list of [lb, ub]; precedences: (x, off, y) meaning
    x + off <= y; disjuncts: (x, fwd, y, bwd); bools: initial three-state
    values per disjunct (default all unassigned).  Revises every rule in
    a loop until nothing changes.  Returns (domains, bools) or None on a
    detected conflict.
    """
    dom = [list(d) for d in domains]
    bv = list(bools) if bools is not None else [-1] * len(disjuncts)
    changed = True
    while changed:
        changed = False
        for x, off, y in precedences:
            if dom[x][0] + off > dom[y][0]:
                dom[y][0] = dom[x][0] + off
                changed = True
            if dom[y][1] - off < dom[x][1]:
                dom[x][1] = dom[y][1] - off
                changed = True
            if dom[x][0] > dom[x][1] or dom[y][0] > dom[y][1]:
                return None
        for d, (x, fwd, y, bwd) in enumerate(disjuncts):
            if bv[d] < 0:
                can0 = dom[x][0] + fwd <= dom[y][1]
                can1 = dom[y][0] + bwd <= dom[x][1]
                if not can0 and not can1:
                    return None
                if not can0:
                    bv[d] = 1
                    changed = True
                elif not can1:
                    bv[d] = 0
                    changed = True
            if bv[d] == 0:
                if dom[x][0] + fwd > dom[y][0]:
                    dom[y][0] = dom[x][0] + fwd
                    changed = True
                if dom[y][1] - fwd < dom[x][1]:
                    dom[x][1] = dom[y][1] - fwd
                    changed = True
            elif bv[d] == 1:
                if dom[y][0] + bwd > dom[x][0]:
                    dom[x][0] = dom[y][0] + bwd
                    changed = True
                if dom[x][1] - bwd < dom[y][1]:
                    dom[y][1] = dom[x][1] - bwd
                    changed = True
            if dom[x][0] > dom[x][1] or dom[y][0] > dom[y][1]:
                return None
    return dom, bv
