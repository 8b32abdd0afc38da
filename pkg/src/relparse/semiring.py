"""Semirings over transition sequences and the primitive-value solver.

Every semiring exposes ``zero``, ``one``, ``add``, ``mul``, ``is_zero``, an
optional ``star`` and ``val(d)`` for a single transition.  Products follow the
reversed-history convention used throughout the package: the newest transition
is the leftmost factor.

Besides plain values the closure construction needs *tensor* values, i.e.
finite sums of pairs ``L (x) R`` acting on a value ``x`` as ``L*x*R``.  The
``t_*`` methods implement them.  Commutative semirings collapse a tensor into
the single value ``L*R``.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx

from .grammar import CALL, NONREGULAR_INFINITE, REDUCE, REGULAR_INFINITE


class UnsupportedGrammar(Exception):
    def __init__(self, message, witness=()):
        self.witness = list(witness)
        if self.witness:
            message += " (cycle: " + " -> ".join(self.witness) + ")"
        super().__init__(message)


class StarRequired(UnsupportedGrammar):
    pass


class Semiring:
    name = "abstract"
    commutative = False
    idempotent = False
    star = None

    zero = None
    one = None

    def add(self, x, y):
        raise NotImplementedError

    def mul(self, x, y):
        raise NotImplementedError

    def is_zero(self, x):
        return x == self.zero

    def val(self, d):
        raise NotImplementedError

    def sum(self, xs):
        acc = self.zero
        for x in xs:
            acc = self.add(acc, x)
        return acc

    def prod(self, *xs):
        acc = self.one
        for x in xs:
            acc = self.mul(acc, x)
        return acc

    # -- tensors for non-commutative semirings: tuples of (L, R) pairs --------

    @property
    def t_zero(self):
        return ()

    @property
    def t_one(self):
        return ((self.one, self.one),)

    def _normalize(self, pairs):
        merged = {}
        for left, right in pairs:
            if self.is_zero(left) or self.is_zero(right):
                continue
            merged[left] = self.add(merged[left], right) if left in merged else right
        return tuple((k, v) for k, v in merged.items() if not self.is_zero(v))

    def t_pair(self, left, right):
        return self._normalize(((left, right),))

    def t_add(self, a, b):
        if not a:
            return b
        if not b:
            return a
        return self._normalize(a + b)

    def t_mul(self, a, b):
        if not a or not b:
            return ()
        mul = self.mul
        return self._normalize([(mul(lb, la), mul(ra, rb)) for la, ra in a for lb, rb in b])

    def t_wrap(self, x, a):
        acc = self.zero
        for left, right in a:
            acc = self.add(acc, self.mul(self.mul(left, x), right))
        return acc

    def t_is_zero(self, a):
        return not a

    def t_pairs(self, a):
        return list(a)

    def t_from_pairs(self, pairs):
        return self._normalize(pairs)

    # -- serialization of plain values ---------------------------------------

    def dump(self, x):
        return x

    def load(self, data):
        return data

    def render(self, x, rtn=None):
        return str(x)


class _Commutative(Semiring):
    """Tensors collapse to plain values: L (x) R is stored as L*R."""

    commutative = True

    @property
    def t_zero(self):
        return self.zero

    @property
    def t_one(self):
        return self.one

    def t_pair(self, left, right):
        return self.mul(left, right)

    def t_add(self, a, b):
        return self.add(a, b)

    def t_mul(self, a, b):
        return self.mul(a, b)

    def t_wrap(self, x, a):
        return self.mul(x, a)

    def t_is_zero(self, a):
        return self.is_zero(a)

    def t_pairs(self, a):
        return [] if self.is_zero(a) else [(self.one, a)]

    def t_from_pairs(self, pairs):
        return self.sum(self.mul(left, right) for left, right in pairs)


class BoolSemiring(_Commutative):
    name = "bool"
    idempotent = True
    zero = False
    one = True

    def add(self, x, y):
        return x or y

    def mul(self, x, y):
        return x and y

    def is_zero(self, x):
        return not x

    def star(self, x):
        return True

    def val(self, d):
        return True


class CountSemiring(_Commutative):
    name = "count"
    zero = 0
    one = 1

    def add(self, x, y):
        return x + y

    def mul(self, x, y):
        return x * y

    def is_zero(self, x):
        return x == 0

    def val(self, d):
        return 1


class ForestNode:
    """Hash-consed node of a free-semiring expression DAG."""

    __slots__ = ("kind", "a", "b", "id", "__weakref__")

    def __init__(self, kind, a, b, id_):
        self.kind = kind
        self.a = a
        self.b = b
        self.id = id_

    def __repr__(self):
        if self.kind == "leaf":
            return f"leaf({self.a})"
        if self.kind in ("empty", "eps"):
            return self.kind
        return f"{self.kind}#{self.id}"


class ForestSemiring(Semiring):
    """Free semiring: values are DAGs over empty, eps, leaf, cat and alt."""

    name = "forest"

    def __init__(self):
        self._table = {}
        self.zero = self._make("empty", None, None)
        self.one = self._make("eps", None, None)

    def _make(self, kind, a, b):
        key = (kind, a if kind == "leaf" else (a.id if a is not None else None),
               b.id if b is not None else None)
        node = self._table.get(key)
        if node is None:
            node = ForestNode(kind, a, b, len(self._table))
            self._table[key] = node
        return node

    def leaf(self, d):
        return self._make("leaf", d, None)

    def add(self, x, y):
        if x is self.zero:
            return y
        if y is self.zero:
            return x
        return self._make("alt", x, y)

    def mul(self, x, y):
        if x is self.zero or y is self.zero:
            return self.zero
        if x is self.one:
            return y
        if y is self.one:
            return x
        return self._make("cat", x, y)

    def is_zero(self, x):
        return x is self.zero

    def val(self, d):
        return self.leaf(d.id)

    @property
    def size(self):
        return len(self._table)

    def dump(self, x):
        # flat postorder listing so shared nodes serialize once
        order, index = [], {}

        def visit(n):
            stack = [(n, False)]
            while stack:
                node, done = stack.pop()
                if node.id in index:
                    continue
                if done or node.kind in ("empty", "eps", "leaf"):
                    index[node.id] = len(order)
                    if node.kind == "leaf":
                        order.append(["leaf", node.a])
                    elif node.kind in ("empty", "eps"):
                        order.append([node.kind])
                    else:
                        order.append([node.kind, index[node.a.id], index[node.b.id]])
                    continue
                stack.append((node, True))
                stack.append((node.b, False))
                stack.append((node.a, False))

        visit(x)
        return order

    def load(self, data):
        built = []
        for entry in data:
            kind = entry[0]
            if kind == "empty":
                built.append(self.zero)
            elif kind == "eps":
                built.append(self.one)
            elif kind == "leaf":
                built.append(self.leaf(entry[1]))
            elif kind == "cat":
                built.append(self.mul(built[entry[1]], built[entry[2]]))
            else:
                built.append(self.add(built[entry[1]], built[entry[2]]))
        return built[-1]

    def render(self, x, rtn=None, limit=20):
        seqs, truncated = enumerate_forest(x, limit)
        lines = [" ".join(_name(rtn, d) for d in seq) or "<eps>" for seq in seqs]
        if truncated:
            lines.append("...")
        return "\n".join(lines)


def enumerate_forest(v: ForestNode, limit: int = 1000):
    """Sequences denoted by a forest value, as a list with multiplicity.

    Returns ``(sequences, truncated)``.  Sequences are tuples of transition
    ids.  Duplicates are kept: a redundant forest shows up as a repeated
    sequence.
    """
    memo = {}
    truncated = False

    def go(n):
        nonlocal truncated
        hit = memo.get(n.id)
        if hit is not None:
            return hit
        if n.kind == "empty":
            out = []
        elif n.kind == "eps":
            out = [()]
        elif n.kind == "leaf":
            out = [(n.a,)]
        elif n.kind == "alt":
            out = go(n.a) + go(n.b)
        else:
            left, right = go(n.a), go(n.b)
            out = [x + y for x in left for y in right]
        if len(out) > limit:
            out = out[:limit]
            truncated = True
        memo[n.id] = out
        return out

    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 100000))
    try:
        result = go(v)
    finally:
        sys.setrecursionlimit(old)
    return result, truncated


AMBIG = "AMBIG"


class FirstSemiring(Semiring):
    """One witness sequence, or the ambiguity marker when there are several."""

    name = "first"
    zero = None
    one = ()

    def add(self, x, y):
        if x is None:
            return y
        if y is None or x == y:
            return x
        return AMBIG

    def mul(self, x, y):
        if x is None or y is None:
            return None
        if x == AMBIG or y == AMBIG:
            return AMBIG
        return x + y

    def is_zero(self, x):
        return x is None

    def val(self, d):
        return (d.id,)

    def dump(self, x):
        return list(x) if isinstance(x, tuple) else x

    def load(self, data):
        return tuple(data) if isinstance(data, list) else data

    def render(self, x, rtn=None):
        if x is None:
            return "<none>"
        if x == AMBIG:
            return "AMBIGUOUS"
        return " ".join(_name(rtn, d) for d in x) or "<eps>"


class PrioritySemiring(Semiring):
    """Best sequence under a total order on transition sequences.

    Each transition gets a distinct rank: reduce transitions whose label is in
    the priority list rank above everything else, in list order; remaining
    ties go to the lower transition id.  Sequences compare shorter-first, then
    lexicographically by rank (higher wins).  Values are rank tuples.
    """

    name = "priority"
    zero = None
    one = ()

    def __init__(self, rtn=None, priorities=()):
        self.priorities = list(priorities)
        self.rank = {}
        self.by_rank = {}
        if rtn is not None:
            self.bind(rtn)

    def bind(self, rtn):
        prio = {lab: len(self.priorities) - i for i, lab in enumerate(self.priorities)}
        n = len(rtn.transitions)
        self.rank = {}
        for d in rtn.transitions:
            group = prio.get(d.arg, 0) if d.kind == REDUCE else 0
            self.rank[d.id] = group * (n + 1) + (n - d.id)
        self.by_rank = {r: i for i, r in self.rank.items()}

    @staticmethod
    def _key(x):
        return (-len(x), x)

    def add(self, x, y):
        if x is None:
            return y
        if y is None:
            return x
        return x if self._key(x) >= self._key(y) else y

    def mul(self, x, y):
        if x is None or y is None:
            return None
        return x + y

    def is_zero(self, x):
        return x is None

    def val(self, d):
        return (self.rank[d.id],)

    def sequence(self, x):
        return None if x is None else tuple(self.by_rank[r] for r in x)

    def dump(self, x):
        return None if x is None else list(x)

    def load(self, data):
        return None if data is None else tuple(data)

    def render(self, x, rtn=None):
        if x is None:
            return "<none>"
        return " ".join(_name(rtn, d) for d in self.sequence(x)) or "<eps>"


def _name(rtn, d):
    return rtn.describe(d) if rtn is not None else str(d)


SEMIRING_KINDS = ("bool", "count", "forest", "first", "priority")


def make_semiring(kind: str, rtn=None, priorities=()) -> Semiring:
    if kind == "bool":
        return BoolSemiring()
    if kind == "count":
        return CountSemiring()
    if kind == "forest":
        return ForestSemiring()
    if kind == "first":
        return FirstSemiring()
    if kind == "priority":
        return PrioritySemiring(rtn, priorities)
    raise ValueError(f"unknown semiring {kind!r}")


def solve_system(variables, deps, evaluate, sr, what):
    """Least solution of ``x_v = evaluate(v, values)`` for all ``v``.

    ``deps[v]`` lists the variables ``evaluate`` may read.  Acyclic parts are
    evaluated once in dependency order.  Cyclic components need a star: they
    are iterated to a fixed point (which terminates for the boolean semiring,
    the only built-in with a star).
    """
    g = nx.DiGraph()
    g.add_nodes_from(variables)
    for v in variables:
        for w in deps.get(v, ()):
            g.add_edge(v, w)
    values = {}
    cond = nx.condensation(g)
    for comp in reversed(list(nx.topological_sort(cond))):
        members = cond.nodes[comp]["members"]
        cyclic = len(members) > 1 or any(g.has_edge(v, v) for v in members)
        if not cyclic:
            (v,) = members
            values[v] = evaluate(v, values)
            continue
        if sr.star is None:
            raise StarRequired(f"{what}: cyclic equations need a star operation, "
                               f"semiring {sr.name} has none")
        for v in members:
            values[v] = sr.t_zero if what == "tensor" else sr.zero
        changed = True
        rounds = 0
        while changed:
            changed = False
            rounds += 1
            for v in members:
                new = evaluate(v, values)
                if new != values[v]:
                    values[v] = new
                    changed = True
            if rounds > 10000:
                raise RuntimeError(f"{what}: fixed point iteration did not converge")
    return values


@dataclass
class PrimitiveTable:
    """Values of the transition-language primitives for one semiring.

    ``null[s]``: value of the nulling sequences of s.
    ``reach[s]``: dict t -> value of same-level paths from s to t that only
    take calls whose callee is nulled (includes ``reach[s][s] >= one``).
    ``call_into[t]``: list of ``(u, t_prime, value)`` for every call
    ``call(t_prime, c, u)`` with ``t`` in ``reach[c]``; value is
    ``reach[c][t] * val(call)``.
    ``val``: valuation per transition id.
    """

    null: list
    reach: list
    call_into: list
    val: list

    def null_value(self, s):
        return self.null[s]

    def reach_value(self, sr, s, t):
        return self.reach[s].get(t, sr.zero)


def solve_primitives(rtn, analysis, sr) -> PrimitiveTable:
    if analysis.ambiguity_class == NONREGULAR_INFINITE:
        raise UnsupportedGrammar("grammar is nonregularly infinitely ambiguous", analysis.witness)
    if analysis.ambiguity_class == REGULAR_INFINITE and sr.star is None:
        raise StarRequired(f"grammar is infinitely ambiguous and semiring {sr.name} has no star",
                           analysis.witness)
    n = rtn.num_states
    val = [sr.val(d) for d in rtn.transitions]
    nullable = analysis.nullable

    # null(s) = sum reduce + sum_{call(s,u,t)} null(t) * null(u) * val(call)
    def eval_null(s, values):
        acc = sr.zero
        for d in rtn.out[s]:
            if d.kind == REDUCE:
                acc = sr.add(acc, val[d.id])
            elif d.kind == CALL and d.arg in nullable and d.target in nullable:
                acc = sr.add(acc, sr.mul(sr.mul(values[d.target], values[d.arg]), val[d.id]))
        return acc

    null_deps = {s: [x for d in rtn.out[s] if d.kind == CALL and d.arg in nullable and d.target in nullable
                     for x in (d.arg, d.target)] for s in nullable}
    solved = solve_system(sorted(nullable), null_deps, eval_null, sr, "nulling")
    null = [solved.get(s, sr.zero) for s in range(n)]

    # reach(s, t) = [s = t] + sum_{call(s,u,s')} reach(s', t) * null(u) * val(call)
    step = [[(d.target, sr.mul(null[d.arg], val[d.id])) for d in rtn.out[s]
             if d.kind == CALL and not sr.is_zero(null[d.arg])] for s in range(n)]
    reach = _solve_reach(n, step, sr)

    call_into = [[] for _ in range(n)]
    for d in rtn.calls():
        for t, r in reach[d.arg].items():
            call_into[t].append((d.target, d.source, sr.mul(r, val[d.id])))
    return PrimitiveTable(null, reach, call_into, val)


def _solve_reach(n, step, sr):
    g = nx.DiGraph()
    g.add_nodes_from(range(n))
    for s in range(n):
        for t, _ in step[s]:
            g.add_edge(s, t)
    reach = [None] * n
    cond = nx.condensation(g)
    for comp in reversed(list(nx.topological_sort(cond))):
        members = sorted(cond.nodes[comp]["members"])
        cyclic = len(members) > 1 or g.has_edge(members[0], members[0])
        if not cyclic:
            (s,) = members
            row = {s: sr.one}
            for s2, w in step[s]:
                for t, r in reach[s2].items():
                    v = sr.mul(r, w)
                    row[t] = sr.add(row[t], v) if t in row else v
            reach[s] = {t: v for t, v in row.items() if not sr.is_zero(v)}
            continue
        if sr.star is None:
            raise StarRequired(f"same-level reachability is cyclic and semiring {sr.name} has no star")
        rows = {s: {s: sr.one} for s in members}
        changed = True
        while changed:
            changed = False
            for s in members:
                row = dict(rows[s])
                for s2, w in step[s]:
                    src = rows[s2] if s2 in rows else reach[s2]
                    for t, r in src.items():
                        v = sr.mul(r, w)
                        new = sr.add(row[t], v) if t in row else v
                        if row.get(t) != new:
                            row[t] = new
                if row != rows[s]:
                    rows[s] = row
                    changed = True
        for s in members:
            reach[s] = {t: v for t, v in rows[s].items() if not sr.is_zero(v)}
    return reach
