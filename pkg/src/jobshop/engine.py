"""Trail-based constraint engine for disjunctive scheduling.

State is a set of integer interval variables (lb/ub pairs) and three-state
Boolean variables, mutated destructively and undone through a trail.  Four
constraint families are supported:

* precedences  x + off <= y  (difference arcs, bounds consistency),
* reified disjuncts  b=0 <=> x + fwd <= y,  b=1 <=> y + bwd <= x,
* clauses over Booleans with two watched literals (restart nogoods),
* structural propagators for the earliness/tardiness objective
  (per-job term channeling plus a positive weighted sum).

Constraint handles are tagged ints: PREC = 4k, DISJ = 4k+1, SPEC = 4k+2,
CLAUSE = 4k+3; EXTERNAL = -1 marks decisions and other outside bound posts.
propagate() runs to fixpoint and returns None, or returns the failing
handle after incrementing the failure weights of the variables the failing
constraint touches.  Weights are never reset; they feed the weighted-degree
branching heuristics and persist across restarts and bound changes.

All time arithmetic is 64-bit signed; model builders are responsible for
keeping horizons small enough that sums cannot overflow.
"""

from __future__ import annotations

__all__ = ["Engine", "PREC", "DISJ", "SPEC", "CLAUSE", "EXTERNAL", "handle_kind"]

PREC = 0
DISJ = 1
SPEC = 2
CLAUSE = 3
EXTERNAL = -1


def handle_kind(handle: int) -> int:
    """Constraint family tag (PREC/DISJ/SPEC/CLAUSE) of a handle."""
    return handle & 3


class _Conflict(Exception):
    """Internal unwind signal carrying the failing constraint handle."""

    def __init__(self, handle: int):
        self.handle = handle


class Engine:
    """Backtrackable store of variables, constraints and failure weights.

    Variables and constraints may only be created before seal(); clauses
    (post_nogood) are the one exception and may be added at any root state.
    save_level() marks the current trail position and returns a 1-based
    level; restore_to(k) rewinds to the state observed at save number k
    (k=0 rewinds everything) and discards deeper marks.
    """

    def __init__(self):
        # integer variables
        self.lb: list[int] = []
        self.ub: list[int] = []
        self.wdeg: list[int] = []
        self.out_arcs: list[list] = []  # (off, tgt, handle): self + off <= tgt
        self.in_arcs: list[list] = []   # (off, src, handle): src + off <= self
        self.dwatch: list[list[int]] = []  # disjunct ids touching the variable
        self.swatch: list[list[int]] = []  # special ids watching the variable
        # Boolean variables
        self.bval: list[int] = []   # -1 unassigned, else 0/1
        self.bwdeg: list[int] = []
        self.bdisj: list[int] = []  # owning disjunct id, -1 for free Booleans
        self.bswatch: list[list[int]] = []
        # precedences
        self.prec_x: list[int] = []
        self.prec_off: list[int] = []
        self.prec_y: list[int] = []
        # disjuncts
        self.disj_b: list[int] = []
        self.disj_x: list[int] = []
        self.disj_fwd: list[int] = []
        self.disj_y: list[int] = []
        self.disj_bwd: list[int] = []
        # specials (objects with propagate(engine) and bump(engine))
        self.specials: list = []
        # clauses: lists of literal codes 2*b+f, first two are the watches;
        # unit nogoods live separately so root restores cannot lose them
        self.clauses: list[list[int]] = []
        self.units: list[int] = []
        self.watches: list[list[int]] = []
        # trail entries (kind, var, old): 0 lb, 1 ub, 2 bool, 3/4 arc pops
        self.trail: list[tuple[int, int, int]] = []
        self.marks: list[int] = []
        # event queue: int codes, LIFO, deduped through inq
        self.queue: list[int] = []
        self.inq = bytearray()
        self.bool_base = 0
        self.spec_base = 0
        self.sealed = False
        # when set, post_nogood asserts the engine sits at this level
        self.root_level: int | None = None

    # ------------------------------------------------------------------
    # construction

    def new_int_var(self, lo: int, hi: int) -> int:
        assert not self.sealed, "cannot add variables after seal()"
        assert lo <= hi, "empty initial domain"
        v = len(self.lb)
        self.lb.append(lo)
        self.ub.append(hi)
        self.wdeg.append(1)
        self.out_arcs.append([])
        self.in_arcs.append([])
        self.dwatch.append([])
        self.swatch.append([])
        return v

    def new_bool_var(self) -> int:
        assert not self.sealed, "cannot add variables after seal()"
        b = len(self.bval)
        self.bval.append(-1)
        self.bwdeg.append(1)
        self.bdisj.append(-1)
        self.bswatch.append([])
        return b

    def post_precedence(self, x: int, off: int, y: int) -> int:
        """Post x + off <= y; returns the constraint handle."""
        assert not self.sealed
        pid = len(self.prec_x)
        self.prec_x.append(x)
        self.prec_off.append(off)
        self.prec_y.append(y)
        h = (pid << 2) | PREC
        self.out_arcs[x].append((off, y, h))
        self.in_arcs[y].append((off, x, h))
        return h

    def post_disjunct(self, x: int, fwd: int, y: int, bwd: int) -> int:
        """Reify a disjunction into a fresh Boolean and return it.

        Value 0 selects x + fwd <= y, value 1 selects y + bwd <= x.  The
        chosen inequality is enforced through dynamic difference arcs; an
        unassigned disjunct assigns itself as soon as one side becomes
        impossible, and fails when both are.
        """
        assert not self.sealed
        b = self.new_bool_var()
        d = len(self.disj_b)
        self.disj_b.append(b)
        self.disj_x.append(x)
        self.disj_fwd.append(fwd)
        self.disj_y.append(y)
        self.disj_bwd.append(bwd)
        self.bdisj[b] = d
        self.dwatch[x].append(d)
        self.dwatch[y].append(d)
        return b

    def post_et_objective(self, completions, dues, wes, wts):
        """Post the weighted earliness/tardiness objective.

        completions: per job, (last start var, last duration); dues/wes/wts:
        per job due date and earliness/tardiness weights.  Creates per job a
        Boolean early flag (completion strictly before the due date), a late
        flag (strictly after), and amount variables E = e*(due - completion),
        L = l*(completion - due).  Returns (sum_var, e_flags, l_flags,
        e_amounts, l_amounts) where sum_var is the weighted total.
        """
        assert not self.sealed
        es: list[int] = []
        ls: list[int] = []
        amounts_e: list[int] = []
        amounts_l: list[int] = []
        for (t, p), d in zip(completions, dues):
            ds = d - p  # start-time due date: completion < d  iff  t < ds
            e = self.new_bool_var()
            l = self.new_bool_var()
            ev = self.new_int_var(0, max(0, ds - self.lb[t]))
            lv = self.new_int_var(0, max(0, self.ub[t] - ds))
            sid = len(self.specials)
            self.specials.append(_EtTerm(sid, t, ds, e, l, ev, lv))
            for v in (t, ev, lv):
                self.swatch[v].append(sid)
            self.bswatch[e].append(sid)
            self.bswatch[l].append(sid)
            es.append(e)
            ls.append(l)
            amounts_e.append(ev)
            amounts_l.append(lv)
        xs: list[int] = []
        ws: list[int] = []
        for x in range(len(completions)):
            if wes[x] > 0:
                xs.append(amounts_e[x])
                ws.append(wes[x])
            if wts[x] > 0:
                xs.append(amounts_l[x])
                ws.append(wts[x])
        smax = sum(w * self.ub[v] for v, w in zip(xs, ws))
        s = self.new_int_var(0, smax)
        sid = len(self.specials)
        self.specials.append(_WeightedSum(sid, xs, ws, s))
        for v in xs:
            self.swatch[v].append(sid)
        self.swatch[s].append(sid)
        return s, es, ls, amounts_e, amounts_l

    def seal(self) -> None:
        """Freeze the model and enqueue a full initial revision."""
        if self.sealed:
            return
        self.sealed = True
        nv = len(self.lb)
        nb = len(self.bval)
        ns = len(self.specials)
        self.bool_base = 2 * nv
        self.spec_base = self.bool_base + nb
        self.inq = bytearray(self.spec_base + ns)
        self.watches = [[] for _ in range(2 * nb)]
        q = self.queue
        inq = self.inq
        for v in range(nv):
            q.append(2 * v)
            q.append(2 * v + 1)
            inq[2 * v] = 1
            inq[2 * v + 1] = 1
        for sid in range(ns):
            c = self.spec_base + sid
            q.append(c)
            inq[c] = 1

    # ------------------------------------------------------------------
    # state mutation (internal variants raise _Conflict)

    def _set_lb(self, v: int, val: int, h: int) -> None:
        if val > self.lb[v]:
            if val > self.ub[v]:
                raise _Conflict(h)
            self.trail.append((0, v, self.lb[v]))
            self.lb[v] = val
            c = 2 * v
            if not self.inq[c]:
                self.inq[c] = 1
                self.queue.append(c)

    def _set_ub(self, v: int, val: int, h: int) -> None:
        if val < self.ub[v]:
            if val < self.lb[v]:
                raise _Conflict(h)
            self.trail.append((1, v, self.ub[v]))
            self.ub[v] = val
            c = 2 * v + 1
            if not self.inq[c]:
                self.inq[c] = 1
                self.queue.append(c)

    def _assign(self, b: int, val: int, h: int) -> None:
        cur = self.bval[b]
        if cur == val:
            return
        if cur >= 0:
            raise _Conflict(h)
        self.trail.append((2, b, 0))
        self.bval[b] = val
        self.queue.append(self.bool_base + b)

    def set_lb(self, v: int, val: int, handle: int = EXTERNAL) -> bool:
        """Tighten a lower bound; False on immediate conflict (weights bumped)."""
        try:
            self._set_lb(v, val, handle)
        except _Conflict as c:
            self._bump(c.handle)
            self._clear_queue()
            return False
        return True

    def set_ub(self, v: int, val: int, handle: int = EXTERNAL) -> bool:
        try:
            self._set_ub(v, val, handle)
        except _Conflict as c:
            self._bump(c.handle)
            self._clear_queue()
            return False
        return True

    def assign_bool(self, b: int, val: int, handle: int = EXTERNAL) -> bool:
        try:
            self._assign(b, val, handle)
        except _Conflict as c:
            self._bump(c.handle)
            self._clear_queue()
            return False
        return True

    # ------------------------------------------------------------------
    # propagation

    def propagate(self):
        """Run to fixpoint; None on success, else the failing handle."""
        queue = self.queue
        inq = self.inq
        lb = self.lb
        ub = self.ub
        bval = self.bval
        trail = self.trail
        out_arcs = self.out_arcs
        in_arcs = self.in_arcs
        bool_base = self.bool_base
        spec_base = self.spec_base
        disj_b = self.disj_b
        disj_x = self.disj_x
        disj_fwd = self.disj_fwd
        disj_y = self.disj_y
        disj_bwd = self.disj_bwd
        try:
            while queue:
                code = queue.pop()
                inq[code] = 0
                if code < bool_base:
                    v = code >> 1
                    if code & 1:
                        # ub(v) decreased: pull in-neighbours down
                        base = ub[v]
                        for off, src, h in in_arcs[v]:
                            nv = base - off
                            if nv < ub[src]:
                                if nv < lb[src]:
                                    raise _Conflict(h)
                                trail.append((1, src, ub[src]))
                                ub[src] = nv
                                c = 2 * src + 1
                                if not inq[c]:
                                    inq[c] = 1
                                    queue.append(c)
                    else:
                        # lb(v) increased: push out-neighbours up
                        base = lb[v]
                        for off, tgt, h in out_arcs[v]:
                            nv = base + off
                            if nv > lb[tgt]:
                                if nv > ub[tgt]:
                                    raise _Conflict(h)
                                trail.append((0, tgt, lb[tgt]))
                                lb[tgt] = nv
                                c = 2 * tgt
                                if not inq[c]:
                                    inq[c] = 1
                                    queue.append(c)
                    for d in self.dwatch[v]:
                        b = disj_b[d]
                        if bval[b] < 0:
                            x = disj_x[d]
                            y = disj_y[d]
                            if lb[x] + disj_fwd[d] > ub[y]:
                                if lb[y] + disj_bwd[d] > ub[x]:
                                    raise _Conflict((d << 2) | DISJ)
                                self._assign(b, 1, (d << 2) | DISJ)
                            elif lb[y] + disj_bwd[d] > ub[x]:
                                self._assign(b, 0, (d << 2) | DISJ)
                    for sid in self.swatch[v]:
                        c = spec_base + sid
                        if not inq[c]:
                            inq[c] = 1
                            queue.append(c)
                elif code < spec_base:
                    b = code - bool_base
                    val = bval[b]
                    d = self.bdisj[b]
                    if d >= 0:
                        h = (d << 2) | DISJ
                        if val == 0:
                            x = disj_x[d]
                            f = disj_fwd[d]
                            y = disj_y[d]
                        else:
                            x = disj_y[d]
                            f = disj_bwd[d]
                            y = disj_x[d]
                        # dynamic arc x + f <= y, popped again on restore
                        out_arcs[x].append((f, y, h))
                        trail.append((3, x, 0))
                        in_arcs[y].append((f, x, h))
                        trail.append((4, y, 0))
                        self._set_lb(y, lb[x] + f, h)
                        self._set_ub(x, ub[y] - f, h)
                    self._on_literal_false(2 * b + val)
                    for sid in self.bswatch[b]:
                        c = spec_base + sid
                        if not inq[c]:
                            inq[c] = 1
                            queue.append(c)
                else:
                    self.specials[code - spec_base].propagate(self)
        except _Conflict as c:
            self._bump(c.handle)
            self._clear_queue()
            return c.handle
        return None

    def _on_literal_false(self, lit: int) -> None:
        """Clause watch maintenance for a literal that just became false."""
        wl = self.watches[lit]
        if not wl:
            return
        bval = self.bval
        clauses = self.clauses
        watches = self.watches
        i = 0
        while i < len(wl):
            cid = wl[i]
            cl = clauses[cid]
            if cl[0] != lit:
                cl[0], cl[1] = cl[1], cl[0]
            other = cl[1]
            if bval[other >> 1] == 1 - (other & 1):
                i += 1  # clause already satisfied by the other watch
                continue
            moved = False
            for k in range(2, len(cl)):
                cand = cl[k]
                if bval[cand >> 1] != (cand & 1):  # true or unassigned
                    cl[0] = cand
                    cl[k] = lit
                    watches[cand].append(cid)
                    wl[i] = wl[-1]
                    wl.pop()
                    moved = True
                    break
            if moved:
                continue
            if bval[other >> 1] == (other & 1):
                raise _Conflict((cid << 2) | CLAUSE)
            self._assign(other >> 1, 1 - (other & 1), (cid << 2) | CLAUSE)
            i += 1

    def _bump(self, h: int) -> None:
        """Increment failure weights of the variables in constraint h."""
        if h < 0:
            return
        kind = h & 3
        i = h >> 2
        if kind == DISJ:
            self.wdeg[self.disj_x[i]] += 1
            self.wdeg[self.disj_y[i]] += 1
            self.bwdeg[self.disj_b[i]] += 1
        elif kind == PREC:
            self.wdeg[self.prec_x[i]] += 1
            self.wdeg[self.prec_y[i]] += 1
        elif kind == CLAUSE:
            for lit in self.clauses[i]:
                self.bwdeg[lit >> 1] += 1
        else:
            self.specials[i].bump(self)

    def _clear_queue(self) -> None:
        inq = self.inq
        for c in self.queue:
            inq[c] = 0
        self.queue.clear()

    # ------------------------------------------------------------------
    # trail

    def save_level(self) -> int:
        """Mark the current state; returns the 1-based level number."""
        self.marks.append(len(self.trail))
        return len(self.marks)

    def restore_to(self, k: int) -> None:
        """Rewind to the state at save number k (0 = before any save)."""
        target = self.marks[k - 1] if k > 0 else 0
        self._clear_queue()
        trail = self.trail
        lb = self.lb
        ub = self.ub
        bval = self.bval
        out_arcs = self.out_arcs
        in_arcs = self.in_arcs
        while len(trail) > target:
            kind, a, old = trail.pop()
            if kind == 0:
                lb[a] = old
            elif kind == 1:
                ub[a] = old
            elif kind == 2:
                bval[a] = -1
            elif kind == 3:
                out_arcs[a].pop()
            else:
                in_arcs[a].pop()
        del self.marks[k:]

    # ------------------------------------------------------------------
    # clauses (restart nogoods)

    def post_nogood(self, literals) -> bool:
        """Add a clause over Booleans; literals are (var, forbidden_value).

        The clause is the disjunction of (var != forbidden_value).  May only
        be posted at the root level of the current solve (literals true or
        false at the root are simplified away, which is unsound deeper in
        the tree).  Returns False when the clause is empty after
        simplification, i.e. the root state is proven infeasible.  Unit
        clauses assign immediately; call propagate() afterwards.
        """
        assert self.sealed, "post_nogood requires a sealed model"
        if self.root_level is not None:
            assert len(self.marks) == self.root_level, "nogood posted off-root"
        bval = self.bval
        lits: list[int] = []
        seen = set()
        for b, f in literals:
            cur = bval[b]
            if cur == 1 - f:
                return True  # satisfied at root, no clause needed
            if cur < 0:
                code = 2 * b + f
                if code not in seen:
                    seen.add(code)
                    lits.append(code)
            # cur == f: falsified at root, literal dropped
        if not lits:
            return False
        if len(lits) == 1:
            self.units.append(lits[0])
            self._assign(lits[0] >> 1, 1 - (lits[0] & 1), EXTERNAL)
            return True
        cid = len(self.clauses)
        self.clauses.append(lits)
        self.watches[lits[0]].append(cid)
        self.watches[lits[1]].append(cid)
        return True

    def rescan_clauses(self) -> bool:
        """Re-derive clause units after a restore to the root.

        Restoring undoes clause-driven root assignments and nothing
        re-triggers the watches, so each restart rescans the store: a
        clause with all literals false proves infeasibility (returns
        False); a clause with a single non-false literal re-assigns it.
        """
        bval = self.bval
        for lit in self.units:
            cur = bval[lit >> 1]
            if cur == (lit & 1):
                return False
            if cur < 0:
                self._assign(lit >> 1, 1 - (lit & 1), EXTERNAL)
        for cid, cl in enumerate(self.clauses):
            unit = -1
            n_open = 0
            sat = False
            for lit in cl:
                cur = bval[lit >> 1]
                if cur < 0:
                    n_open += 1
                    if n_open > 1:
                        break
                    unit = lit
                elif cur == 1 - (lit & 1):
                    sat = True
                    break
            if sat or n_open > 1:
                continue
            if n_open == 0:
                return False
            self._assign(unit >> 1, 1 - (unit & 1), (cid << 2) | CLAUSE)
        return True

    def clear_clauses(self) -> None:
        """Drop all recorded nogoods (used between objective bounds)."""
        self.clauses = []
        self.units = []
        if self.sealed:
            self.watches = [[] for _ in range(2 * len(self.bval))]

    # ------------------------------------------------------------------
    # inspection helpers

    @property
    def n_int_vars(self) -> int:
        return len(self.lb)

    @property
    def n_bool_vars(self) -> int:
        return len(self.bval)

    def domain(self, v: int) -> tuple[int, int]:
        return self.lb[v], self.ub[v]

    def snapshot(self):
        """Full mutable-state copy, for equality checks in tests."""
        return (
            list(self.lb),
            list(self.ub),
            list(self.bval),
            [len(a) for a in self.out_arcs],
            [len(a) for a in self.in_arcs],
        )


class _EtTerm:
    """Channels one job's last start against its due date.

    With ds the start-time due date (due minus last duration):
    e=1 iff t < ds, l=1 iff t > ds, E = e*(ds - t), L = l*(t - ds).
    Sitting exactly on the due date costs nothing: e = l = 0.
    """

    __slots__ = ("handle", "t", "ds", "e", "l", "ev", "lv")

    def __init__(self, sid, t, ds, e, l, ev, lv):
        self.handle = (sid << 2) | SPEC
        self.t = t
        self.ds = ds
        self.e = e
        self.l = l
        self.ev = ev
        self.lv = lv

    def propagate(self, eng: Engine) -> None:
        h = self.handle
        lb = eng.lb
        ub = eng.ub
        bval = eng.bval
        t = self.t
        ds = self.ds
        ev = self.ev
        lv = self.lv
        e = bval[self.e]
        if e < 0:
            if ub[t] < ds or lb[ev] >= 1:
                eng._assign(self.e, 1, h)
                e = 1
            elif lb[t] >= ds or ub[ev] == 0:
                eng._assign(self.e, 0, h)
                e = 0
        if e == 1:
            eng._set_ub(t, ds - 1, h)
            # E == ds - t, both directions
            eng._set_lb(ev, ds - ub[t], h)
            eng._set_ub(ev, ds - lb[t], h)
            eng._set_lb(t, ds - ub[ev], h)
            eng._set_ub(t, ds - lb[ev], h)
        elif e == 0:
            eng._set_lb(t, ds, h)
            eng._set_ub(ev, 0, h)
        else:
            # either flag value implies t >= ds - ub(E)
            eng._set_ub(ev, max(0, ds - lb[t]), h)
            eng._set_lb(t, ds - ub[ev], h)
        lval = bval[self.l]
        if lval < 0:
            if lb[t] > ds or lb[lv] >= 1:
                eng._assign(self.l, 1, h)
                lval = 1
            elif ub[t] <= ds or ub[lv] == 0:
                eng._assign(self.l, 0, h)
                lval = 0
        if lval == 1:
            eng._set_lb(t, ds + 1, h)
            eng._set_lb(lv, lb[t] - ds, h)
            eng._set_ub(lv, ub[t] - ds, h)
            eng._set_lb(t, ds + lb[lv], h)
            eng._set_ub(t, ds + ub[lv], h)
        elif lval == 0:
            eng._set_ub(t, ds, h)
            eng._set_ub(lv, 0, h)
        else:
            eng._set_ub(lv, max(0, ub[t] - ds), h)
            eng._set_ub(t, ds + ub[lv], h)

    def bump(self, eng: Engine) -> None:
        eng.wdeg[self.t] += 1
        eng.wdeg[self.ev] += 1
        eng.wdeg[self.lv] += 1
        eng.bwdeg[self.e] += 1
        eng.bwdeg[self.l] += 1


class _WeightedSum:
    """s = sum(w_i * x_i) with all w_i > 0; bounds flow both ways.

    Fails when the minimal possible sum exceeds ub(s) or the maximal
    possible sum drops under lb(s); otherwise distributes the slack back
    onto the terms.
    """

    __slots__ = ("handle", "xs", "ws", "s")

    def __init__(self, sid, xs, ws, s):
        self.handle = (sid << 2) | SPEC
        self.xs = xs
        self.ws = ws
        self.s = s

    def propagate(self, eng: Engine) -> None:
        h = self.handle
        lb = eng.lb
        ub = eng.ub
        xs = self.xs
        ws = self.ws
        lo = 0
        hi = 0
        for x, w in zip(xs, ws):
            lo += w * lb[x]
            hi += w * ub[x]
        s = self.s
        eng._set_lb(s, lo, h)
        eng._set_ub(s, hi, h)
        slack_up = ub[s] - lo
        slack_dn = hi - lb[s]
        for x, w in zip(xs, ws):
            lx = lb[x]
            ux = ub[x]
            eng._set_ub(x, lx + slack_up // w, h)
            eng._set_lb(x, ux - slack_dn // w, h)

    def bump(self, eng: Engine) -> None:
        for x in self.xs:
            eng.wdeg[x] += 1
        eng.wdeg[self.s] += 1
