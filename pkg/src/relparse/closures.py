"""Automata for the null-closed call/reduce closures of single states.

For a state ``s`` the closure automaton has an initial state ``Init(s)`` and
states ``Reach(s, t)``.  Reading the top stack state ``u`` from ``Init(s)``
moves to ``Reach(s, u)`` with the empty label.  From ``Reach(s, t0)`` reading
the next stack state ``u0`` moves to ``Reach(s, t')``, skipping any nullable
frames in between; the label records the skipped nullings (to be run later)
and the calls that built those frames.  ``Reach(s, t)`` accepts when the rest
of the stack can be empty, i.e. ``t`` lies on the level of ``s``.

Labels are tensor values from :mod:`relparse.semiring`, interned as integer
primitive ids.  Primitive 0 is the identity.  Atomic states are encoded as
ints: ``Init(s) = s`` and ``Reach(s, t) = n + s*n + t``.
"""

from __future__ import annotations

from .semiring import StarRequired

EPS_PRIM = 0


class ClosureTable:
    def __init__(self, rtn, prims, sr):
        self.rtn = rtn
        self.prims = prims
        self.sr = sr
        self.n = rtn.num_states
        self.prim_values = [sr.t_one]
        self._prim_ids = {sr.t_one: EPS_PRIM}
        self._moves = None     # tx -> list of (tr, tensor) skipping one nullable frame
        self._derive = {}      # t0 -> {u0: [(prim id, t')]}
        self._accept = {}      # s -> {t: prim id}
        self._live = {}        # s -> frozenset of t with Reach(s, t) live
        self._pred = None      # t' -> set of t0 with some derive edge t0 -> t'
        self._items = {}       # atomic -> {u: tuple of (prim id, atomic)}
        self._skip_cache = {}
        self.useful = useful_tops(rtn, prims, sr)

    # -- encoding ---------------------------------------------------------

    def init(self, s):
        return s

    def reach(self, s, t):
        return self.n + s * self.n + t

    def decode(self, a):
        if a < self.n:
            return ("Init", a, None)
        s, t = divmod(a - self.n, self.n)
        return ("Reach", s, t)

    def describe(self, a):
        kind, s, t = self.decode(a)
        names = self.rtn.names
        return f"Init({names[s]})" if kind == "Init" else f"Reach({names[s]},{names[t]})"

    def intern(self, tensor):
        pid = self._prim_ids.get(tensor)
        if pid is None:
            pid = len(self.prim_values)
            self.prim_values.append(tensor)
            self._prim_ids[tensor] = pid
        return pid

    def prim(self, pid):
        return self.prim_values[pid]

    # -- construction -----------------------------------------------------

    def _frame_moves(self):
        if self._moves is None:
            sr, prims = self.sr, self.prims
            moves = [dict() for _ in range(self.n)]
            for tx in range(self.n):
                for u, tr, value in prims.call_into[tx]:
                    nu = prims.null[u]
                    if sr.is_zero(nu):
                        continue
                    m = sr.t_pair(nu, value)
                    row = moves[tx]
                    row[tr] = sr.t_add(row[tr], m) if tr in row else m
            self._moves = [[(tr, m) for tr, m in row.items() if not sr.t_is_zero(m)] for row in moves]
        return self._moves

    def _skip_row(self, t0):
        """Sum over chains of skipped nullable frames starting below ``t0``."""
        sr = self.sr
        moves = self._frame_moves()
        # collect the sub-graph reachable from t0 and order it
        order, seen, stack = [], {t0}, [(t0, iter(moves[t0]))]
        on_stack = {t0}
        cyclic = False
        while stack:
            node, it = stack[-1]
            for tr, _ in it:
                if tr in on_stack:
                    cyclic = True
                elif tr not in seen:
                    seen.add(tr)
                    on_stack.add(tr)
                    stack.append((tr, iter(moves[tr])))
                    break
            else:
                stack.pop()
                on_stack.discard(node)
                order.append(node)
        order.reverse()
        row = {t0: sr.t_one}
        if not cyclic:
            for tx in order:
                z = row.get(tx)
                if z is None:
                    continue
                for tr, m in moves[tx]:
                    v = sr.t_mul(z, m)
                    row[tr] = sr.t_add(row[tr], v) if tr in row else v
        else:
            if sr.star is None:
                raise StarRequired(f"skipped nullable frames below {self.rtn.names[t0]} form a cycle "
                                   f"and semiring {sr.name} has no star")
            changed = True
            while changed:
                changed = False
                for tx in order:
                    z = row.get(tx)
                    if z is None:
                        continue
                    for tr, m in moves[tx]:
                        v = sr.t_mul(z, m)
                        new = sr.t_add(row[tr], v) if tr in row else v
                        if row.get(tr) != new:
                            row[tr] = new
                            changed = True
        return {t: z for t, z in row.items() if not sr.t_is_zero(z)}

    def _derive_row(self, t0):
        row = self._derive.get(t0)
        if row is not None:
            return row
        sr, prims = self.sr, self.prims
        acc = {}
        for tr, z in self._z(t0).items():
            for u0, tp, value in prims.call_into[tr]:
                x = sr.t_mul(z, sr.t_pair(sr.one, value))
                key = (u0, tp)
                acc[key] = sr.t_add(acc[key], x) if key in acc else x
        row = {}
        useful = self.useful
        for (u0, tp), x in acc.items():
            if u0 in useful and not sr.t_is_zero(x):
                row.setdefault(u0, []).append((self.intern(x), tp))
        self._derive[t0] = row
        return row

    def _z(self, t):
        z_row = self._skip_cache.get(t)
        if z_row is None:
            z_row = self._skip_cache[t] = self._skip_row(t)
        return z_row

    def _accept_row(self, s):
        row = self._accept.get(s)
        if row is not None:
            return row
        sr = self.sr
        reach_s = self.prims.reach[s]
        row = {}
        for t in range(self.n):
            z_row = self._z(t)
            acc = sr.t_zero
            for tr, z in z_row.items():
                r = reach_s.get(tr)
                if r is not None:
                    acc = sr.t_add(acc, sr.t_mul(z, sr.t_pair(sr.one, r)))
            if not sr.t_is_zero(acc):
                row[t] = self.intern(acc)
        self._accept[s] = row
        return row

    def _predecessors(self):
        if self._pred is None:
            pred = [set() for _ in range(self.n)]
            for t0 in range(self.n):
                for targets in self._derive_row(t0).values():
                    for _, tp in targets:
                        pred[tp].add(t0)
            self._pred = pred
        return self._pred

    def live(self, s):
        live = self._live.get(s)
        if live is None:
            pred = self._predecessors()
            todo = list(self._accept_row(s))
            seen = set(todo)
            while todo:
                t = todo.pop()
                for t0 in pred[t]:
                    if t0 not in seen:
                        seen.add(t0)
                        todo.append(t0)
            live = self._live[s] = frozenset(seen)
        return live

    # -- queries used by the relation DAG ---------------------------------

    def items(self, a):
        """All derivatives of atomic state ``a``: dict u -> tuple of (prim, atomic)."""
        out = self._items.get(a)
        if out is not None:
            return out
        n = self.n
        if a < n:
            out = {u: ((EPS_PRIM, n + a * n + u),) for u in sorted(self.live(a)) if u in self.useful}
        else:
            s, t0 = divmod(a - n, n)
            live = self.live(s)
            base = n + s * n
            out = {}
            for u0, targets in self._derive_row(t0).items():
                kept = tuple((pid, base + tp) for pid, tp in targets if tp in live)
                if kept:
                    out[u0] = kept
        self._items[a] = out
        return out

    def derive(self, a, u):
        return self.items(a).get(u, ())

    def accept(self, a):
        """Primitive id of the accepting label, or None (Init is never accepting)."""
        if a < self.n:
            return None
        s, t = divmod(a - self.n, self.n)
        return self._accept_row(s).get(t)

    def atomic_states(self, s):
        return [self.init(s)] + [self.reach(s, t) for t in sorted(self.live(s))]

    def materialize(self):
        for s in range(self.n):
            for a in self.atomic_states(s):
                self.items(a)
        return self

    # -- serialization ----------------------------------------------------

    def to_dict(self):
        self.materialize()
        sr = self.sr
        return {
            "prims": [[[sr.dump(l), sr.dump(r)] for l, r in sr.t_pairs(p)] for p in self.prim_values],
            "derive": {str(t0): {str(u): [[pid, tp] for pid, tp in lst] for u, lst in row.items()}
                       for t0, row in self._derive.items()},
            "accept": {str(s): {str(t): pid for t, pid in row.items()} for s, row in self._accept.items()},
            "live": {str(s): sorted(v) for s, v in self._live.items()},
        }

    @classmethod
    def from_dict(cls, rtn, prims, sr, data):
        table = cls(rtn, prims, sr)
        table.prim_values = [sr.t_from_pairs([(sr.load(l), sr.load(r)) for l, r in p]) for p in data["prims"]]
        table._prim_ids = {}
        for i, p in enumerate(table.prim_values):
            table._prim_ids.setdefault(p, i)
        table._derive = {int(t0): {int(u): [tuple(x) for x in lst] for u, lst in row.items()}
                         for t0, row in data["derive"].items()}
        table._accept = {int(s): {int(t): pid for t, pid in row.items()} for s, row in data["accept"].items()}
        table._live = {int(s): frozenset(v) for s, v in data["live"].items()}
        for t0 in range(table.n):
            table._derive.setdefault(t0, {})
        return table


def useful_tops(rtn, prims, sr):
    """States that can still matter when exposed on top of a configuration.

    A state qualifies when its own closure reaches a shift, or when it is the
    stop guard.  Exposing any other state leads nowhere, so closure
    derivatives never expose them.
    """
    succ = [[] for _ in range(rtn.num_states)]
    for d in rtn.calls():
        succ[d.arg].append(d.source)
        if not sr.is_zero(prims.null[d.arg]):
            succ[d.target].append(d.source)
    useful = {d.source for shifts in rtn.shifts.values() for d in shifts}
    useful.add(rtn.stop)
    todo = list(useful)
    while todo:
        x = todo.pop()
        for y in succ[x]:
            if y not in useful:
                useful.add(y)
                todo.append(y)
    return frozenset(useful)


def build_closure_table(rtn, prims, sr, materialize=False) -> ClosureTable:
    table = ClosureTable(rtn, prims, sr)
    if materialize:
        table.materialize()
    return table


def wrap(sr, delta, lam):
    """Apply a label tensor to a value: sum of L * delta * R over its pairs."""
    return sr.t_wrap(delta, lam)


def atomic_epsilon(table, a):
    """Accepting label of an atomic state as a coefficient list (empty if none)."""
    pid = table.accept(a)
    return [] if pid is None else table.sr.t_pairs(table.prim(pid))
