"""Brute-force reference implementations used to cross-check the parser.

Nothing here shares code with the relation engine beyond the grammar and RTN
data types.  All search bounds are explicit parameters.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

from .grammar import CALL, REDUCE, SHIFT, Grammar, compute_nullability


class Infinite:
    """Marker for an unbounded tree count."""

    def __repr__(self):
        return "Infinite"

    def __eq__(self, other):
        return isinstance(other, Infinite)

    def __hash__(self):
        return hash("Infinite")


INFINITE = Infinite()


@dataclass
class OracleResult:
    accepted: bool
    tree_count: object = None
    derivations: list = None
    truncated: bool = False


def nullable_nonterminals(g: Grammar):
    nullable = set()
    changed = True
    while changed:
        changed = False
        for nt, alts in g.rules.items():
            if nt in nullable:
                continue
            if any(all(k == "n" and v in nullable for k, v in alt) for alt in alts):
                nullable.add(nt)
                changed = True
    return nullable


class Earley:
    """Earley recognizer with nullable-aware prediction.

    A parse state is the list of item sets so far; :meth:`step` returns a new
    list, leaving the old one usable, so callers can share prefixes.
    """

    def __init__(self, g: Grammar):
        self.g = g
        self.nullable = nullable_nonterminals(g)
        self.alts = {nt: [tuple(a) for a in alts] for nt, alts in g.rules.items()}

    def _close(self, sets, k, items):
        current = set(items)
        agenda = list(items)
        while agenda:
            nt, ai, dot, origin = agenda.pop()
            alt = self.alts[nt][ai]
            new = []
            if dot < len(alt):
                kind, sym = alt[dot]
                if kind == "n":
                    new.extend((sym, bi, 0, k) for bi in range(len(self.alts[sym])))
                    # nullable callee: advance now, its empty completion
                    # may be found before this item exists
                    if sym in self.nullable:
                        new.append((nt, ai, dot + 1, origin))
            elif origin != k:
                new.extend((w[0], w[1], w[2] + 1, w[3]) for w in sets[origin] if self._next_is(w, nt))
            for it in new:
                if it not in current:
                    current.add(it)
                    agenda.append(it)
        return frozenset(current)

    def _next_is(self, item, nt):
        alt = self.alts[item[0]][item[1]]
        return item[2] < len(alt) and alt[item[2]] == ("n", nt)

    def initial(self):
        start = [(self.g.start, i, 0, 0) for i in range(len(self.alts[self.g.start]))]
        return [self._close([], 0, start)]

    def step(self, sets, token):
        k = len(sets)
        scanned = []
        for nt, ai, dot, origin in sets[-1]:
            alt = self.alts[nt][ai]
            if dot < len(alt) and alt[dot] == ("t", token):
                scanned.append((nt, ai, dot + 1, origin))
        if not scanned:
            return sets + [frozenset()]
        return sets + [self._close(sets, k, scanned)]

    def accepts(self, sets):
        return any(nt == self.g.start and origin == 0 and dot == len(self.alts[nt][ai])
                   for nt, ai, dot, origin in sets[-1])

    @staticmethod
    def dead(sets):
        return not sets[-1]


def earley_recognize(g: Grammar, tokens) -> bool:
    e = Earley(g)
    sets = e.initial()
    for tok in tokens:
        sets = e.step(sets, tok)
        if e.dead(sets):
            return False
    return e.accepts(sets)


def count_trees(g: Grammar, tokens, step_bound=None):
    """Number of distinct parse trees of ``tokens``, or :data:`INFINITE`.

    First computes which (symbol, span) pairs derive anything, then counts
    recursively over derivable items only; revisiting an item that is still
    being counted means a cycle of derivable items, hence infinitely many
    trees.  ``step_bound`` is accepted for interface symmetry and unused: the
    span analysis is exact.
    """
    toks = list(tokens)
    n = len(toks)
    alts = {nt: [tuple(a) for a in al] for nt, al in g.rules.items()}
    der = {nt: set() for nt in alts}

    def sym_der(sym, i, j):
        kind, v = sym
        if kind == "t":
            return j == i + 1 and toks[i] == v
        return (i, j) in der[v]

    def seq_spans(alt, i):
        """End positions reachable by deriving ``alt`` from position i."""
        ends = {i}
        for sym in alt:
            nxt = set()
            for m in ends:
                for j in range(m, n + 1):
                    if sym_der(sym, m, j):
                        nxt.add(j)
            ends = nxt
            if not ends:
                break
        return ends

    changed = True
    while changed:
        changed = False
        for nt, al in alts.items():
            for i in range(n + 1):
                for alt in al:
                    for j in seq_spans(alt, i):
                        if (i, j) not in der[nt]:
                            der[nt].add((i, j))
                            changed = True

    memo = {}
    active = set()

    class _Cycle(Exception):
        pass

    def seq_count(alt, k, i, j):
        key = ("s", alt, k, i, j)
        if key in memo:
            return memo[key]
        if k == len(alt):
            return 1 if i == j else 0
        total = 0
        sym = alt[k]
        for m in range(i, j + 1):
            if not sym_der(sym, i, m):
                continue
            if j not in _ends_from(alt, k + 1, m):
                continue
            left = 1 if sym[0] == "t" else nt_count(sym[1], i, m)
            total += left * seq_count(alt, k + 1, m, j)
        memo[key] = total
        return total

    ends_memo = {}

    def _ends_from(alt, k, m):
        key = (alt, k, m)
        if key not in ends_memo:
            ends_memo[key] = seq_spans(alt[k:], m)
        return ends_memo[key]

    def nt_count(nt, i, j):
        key = ("n", nt, i, j)
        if key in memo:
            return memo[key]
        if key in active:
            raise _Cycle()
        active.add(key)
        total = sum(seq_count(alt, 0, i, j) for alt in alts[nt])
        active.discard(key)
        memo[key] = total
        return total

    if (0, n) not in der[g.start]:
        return 0
    import sys
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20000))
    try:
        return nt_count(g.start, 0, n)
    except _Cycle:
        return INFINITE
    finally:
        sys.setrecursionlimit(old)


def enumerate_derivations(rtn, tokens, limit=10000, step_bound=None):
    """Accepting transition sequences, newest transition first.

    Depth-first simulation of the RTN from the start configuration.  Branches
    are pruned when the stack holds more non-nullable states than there are
    tokens left, or when the derivation exceeds ``step_bound`` steps
    (default ``4 * (len(tokens) + 1) * |S|``).  Returns
    ``(sequences, truncated)``; ``truncated`` is set when the limit or the step
    bound cut the search.
    """
    toks = list(tokens)
    n = len(toks)
    nullable = compute_nullability(rtn)
    if step_bound is None:
        step_bound = 4 * (n + 1) * rtn.num_states
    out = []
    truncated = False
    history = []

    def hard(stack):
        return sum(1 for s in stack if s not in nullable and s != rtn.stop)

    # iterative DFS: frames of (stack, pos, iterator over moves)
    def moves(stack, pos):
        top = stack[0]
        for d in rtn.out[top]:
            if d.kind == SHIFT:
                if pos < n and toks[pos] == d.arg:
                    yield d, (d.target,) + stack[1:], pos + 1
            elif d.kind == CALL:
                yield d, (d.arg, d.target) + stack[1:], pos
            else:
                yield d, stack[1:], pos

    start = (rtn.start, rtn.stop)
    frames = [(start, 0, moves(start, 0))]
    while frames:
        stack, pos, it = frames[-1]
        advanced = False
        for d, nstack, npos in it:
            if hard(nstack) > n - npos:
                continue
            if len(history) + 1 > step_bound:
                truncated = True
                continue
            history.append(d.id)
            if nstack == (rtn.stop,):
                if npos == n:
                    out.append(tuple(reversed(history)))
                    if len(out) >= limit:
                        return out, True
                history.pop()
                continue
            frames.append((nstack, npos, moves(nstack, npos)))
            advanced = True
            break
        if not advanced:
            frames.pop()
            if history and frames:
                history.pop()
    return out, truncated


def _closure(rtn, configs, max_len, nullable=()):
    """Call/reduce closure; with ``nullable``, also delete nullable states below the top."""
    seen = set(configs)
    todo = deque(configs)
    while todo:
        c = todo.popleft()
        nexts = []
        for d in rtn.out[c[0]]:
            if d.kind == CALL:
                nexts.append((d.arg, d.target) + c[1:])
            elif d.kind == REDUCE:
                nexts.append(c[1:])
        if nullable:
            nexts.extend(c[:i] + c[i + 1:] for i in range(1, len(c)) if c[i] in nullable)
        for nc in nexts:
            if nc and len(nc) <= max_len and nc not in seen:
                seen.add(nc)
                todo.append(nc)
    return seen


def config_language(rtn, prefix, max_len, max_steps=None):
    """Configurations reachable after reading ``prefix`` (closure included).

    Configurations are tuples of states, top first, ending with the stop
    guard.  Configurations longer than ``max_len`` are not explored.
    Returns ``(configs, budget_exceeded)``.
    """
    configs = _closure(rtn, {(rtn.start, rtn.stop)}, max_len)
    steps = len(configs)
    for a in prefix:
        shifted = set()
        for c in configs:
            for d in rtn.out[c[0]]:
                if d.kind == SHIFT and d.arg == a:
                    shifted.add((d.target,) + c[1:])
        configs = _closure(rtn, shifted, max_len)
        steps += len(configs)
        if max_steps is not None and steps > max_steps:
            return configs, True
    return configs, False


def null_variants(config, nullable):
    """All configurations obtained by deleting nullable states below the top."""
    top, rest = config[0], config[1:]
    choices = [((s,), ()) if s in nullable else ((s,),) for s in rest]
    for combo in itertools.product(*choices):
        yield (top,) + tuple(x for part in combo for x in part)


def null_closed_language(rtn, prefix, max_len, slack=2):
    """Configurations of length <= max_len in the null closure of the language.

    Deleting a nullable frame commutes with calls, reduces and shifts, so
    deletion is interleaved with the closure.  A shift followed by reduces
    pops at most one non-nullable frame, so before the i-th of n tokens
    configurations are explored up to ``max_len + (n - i) + slack`` states.
    """
    nullable = compute_nullability(rtn)
    n = len(prefix)
    configs = _closure(rtn, {(rtn.start, rtn.stop)}, max_len + n + slack, nullable)
    for i, a in enumerate(prefix, 1):
        shifted = set()
        for c in configs:
            for d in rtn.out[c[0]]:
                if d.kind == SHIFT and d.arg == a:
                    shifted.add((d.target,) + c[1:])
        configs = _closure(rtn, shifted, max_len + n - i + slack, nullable)
    return {c for c in configs if len(c) <= max_len}
