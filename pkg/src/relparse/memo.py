"""Phase memoization.

``trivial``: cache phase results by (relation node, terminal).  Nodes are
hash-consed, so equal structure means equal key.

``dominator``: keep the current relation as a stack of factor nodes whose
concatenation is the relation.  Every factor except the bottom one ends in
the session's hole node, which stands for the next factor down.  A phase
result is split at the nodes that dominate all of its exits, so the top of
the stack stays small and recurring shapes map to the same factor ids.  The
cache maps ``(terminal, ids of the k top factors)`` to ``(k, new factors)``,
where k is the number of factors the phase actually had to look at.
"""

from __future__ import annotations

from .dag import NeedDeeper
from .engine import Engine

DEEPER = object()


class TrivialMemo:
    def __init__(self, tables):
        self.engine = Engine(tables)
        self.cache = {}
        self.hits = 0
        self.misses = 0

    def phase(self, rel, a):
        key = (rel.id, a)
        hit = self.cache.get(key)
        if hit is not None:
            self.hits += 1
            return hit
        self.misses += 1
        out = self.engine.phase_relation(rel, a)
        self.cache[key] = out
        return out

    def run(self, tokens):
        eng = self.engine
        rel = eng.initial_relation()
        for a in tokens:
            rel = self.phase(rel, a)
        return eng.finish_relation(rel)

    def stats(self):
        st = self.engine.stats()
        st.update(hits=self.hits, misses=self.misses, cache_size=len(self.cache))
        return st


class DominatorMemo:
    def __init__(self, tables):
        self.engine = Engine(tables)
        self.session = self.engine.session
        self.hole = self.session.hole
        self.trie = {}
        self.hits = 0
        self.misses = 0
        self.max_depth = 0
        self.deeper_retries = 0

    # -- stack helpers ----------------------------------------------------

    def plug(self, node, below, cache=None):
        """Copy of ``node`` with the hole replaced by ``below``."""
        if cache is None:
            cache = {}
        sess, hole = self.session, self.hole
        order = []
        stack = [node]
        state = {}
        # post-order over nodes that can reach the hole
        while stack:
            x = stack[-1]
            if x.id in state:
                stack.pop()
                continue
            pending = [t for _, _, t in x.edges if t is not hole and t.id not in state and t.id not in cache]
            if pending:
                stack.extend(pending)
                continue
            stack.pop()
            touches = any(t is hole or cache.get(t.id, t) is not t for _, _, t in x.edges)
            if touches:
                edges = tuple((lab, a, below if t is hole else cache.get(t.id, t)) for lab, a, t in x.edges)
                cache[x.id] = sess.node(edges, x.final)
            else:
                cache[x.id] = x
            state[x.id] = True
            order.append(x)
        return cache[node.id]

    def materialize(self, stack, k):
        """Relation of the top k entries; the hole remains if k < len(stack)."""
        rel = stack[k - 1] if k <= len(stack) else None
        for entry in reversed(stack[:k - 1]):
            rel = self.plug(entry, rel)
        return rel

    def cut(self, node, at):
        """Copy of ``node`` with every edge into ``at`` redirected to the hole."""
        sess, hole = self.session, self.hole
        memo = {at.id: hole}
        order = sorted(self._reachable(node, stop=at), key=lambda x: x.id)
        for x in order:
            if x.id in memo:
                continue
            if any(t.id in memo and memo[t.id] is not t for _, _, t in x.edges):
                edges = tuple((lab, a, memo.get(t.id, t)) for lab, a, t in x.edges)
                memo[x.id] = sess.node(edges, x.final)
            else:
                memo[x.id] = x
        return memo[node.id]

    def _reachable(self, node, stop=None):
        seen = {}
        stack = [node]
        while stack:
            x = stack.pop()
            if x.id in seen or x is self.hole or x is stop:
                continue
            seen[x.id] = x
            stack.extend(t for _, _, t in x.edges)
        return list(seen.values())

    def factorize(self, node):
        """Split ``node`` at the common dominators of its exits, top factor first."""
        hole = self.hole
        nodes = sorted(self._reachable(node), key=lambda x: -x.id)
        if len(nodes) <= 1:
            return [node]
        preds = {x.id: [] for x in nodes}
        exit_preds = []
        for x in nodes:
            reaches_exit = x.final is not None
            for _, _, t in x.edges:
                if t is hole:
                    reaches_exit = True
                else:
                    preds[t.id].append(x)
            if reaches_exit:
                exit_preds.append(x)
        if not exit_preds:
            return [node]
        idom = {node.id: None}
        depth = {node.id: 0}

        def lca(a, b):
            while a is not b:
                if depth[a.id] < depth[b.id]:
                    a, b = b, a
                a = idom[a.id]
            return a

        for x in nodes[1:]:
            ps = preds[x.id]
            d = ps[0]
            for p in ps[1:]:
                d = lca(d, p)
            idom[x.id] = d
            depth[x.id] = depth[d.id] + 1
        d = exit_preds[0]
        for p in exit_preds[1:]:
            d = lca(d, p)
        chain = []
        while d is not None:
            chain.append(d)
            d = idom[d.id]
        chain.reverse()  # node first
        cuts = []
        for x in chain[1:]:
            cuts.append(x)
            if x.final is not None:
                break
        # never cut below a node carrying a final: it must stay in the bottom factor
        if chain[0].final is not None:
            return [node]
        factors = []
        top = node
        for x in cuts:
            factors.append(self.cut(top, x))
            top = x
            if x.final is not None:
                break
        factors.append(top)
        return factors

    # -- phases -----------------------------------------------------------

    def phase(self, stack, a):
        k = 1
        while True:
            key = (a,) + tuple(x.id for x in stack[:k])
            hit = self.trie.get(key)
            if hit is DEEPER:
                k += 1
                continue
            if hit is not None:
                self.hits += 1
                used, factors = hit
                self.max_depth = max(self.max_depth, used)
                return self._apply(stack, used, factors)
            rel = self.materialize(stack, k)
            try:
                out = self.engine.phase_relation(rel, a)
            except NeedDeeper:
                self.trie[key] = DEEPER
                self.deeper_retries += 1
                k += 1
                continue
            self.misses += 1
            self.max_depth = max(self.max_depth, k)
            factors = self.factorize(out)
            if k >= len(stack) or not self._reaches_hole(factors[-1]):
                factors = tuple(factors) + (None,)
            else:
                factors = tuple(factors)
            self.trie[key] = (k, factors)
            return self._apply(stack, k, factors)

    def _reaches_hole(self, node):
        return any(t is self.hole for x in self._reachable(node) for _, _, t in x.edges)

    @staticmethod
    def _apply(stack, used, factors):
        if factors and factors[-1] is None:
            return list(factors[:-1])
        return list(factors) + stack[used:]

    def initial_stack(self):
        return [self.engine.initial_relation()]

    def finish(self, stack):
        rel = self.materialize(stack, len(stack))
        return self.engine.finish_relation(rel)

    def run(self, tokens):
        stack = self.initial_stack()
        for a in tokens:
            stack = self.phase(stack, a)
        return self.finish(stack)

    def check_stack(self, stack):
        """Non-bottom entries never carry a final label anywhere above the hole."""
        for entry in stack[:-1]:
            for x in self._reachable(entry):
                if x.final is not None:
                    return False
        return True

    def stats(self):
        st = self.engine.stats()
        st.update(hits=self.hits, misses=self.misses, cache_size=len(self.trie),
                  max_depth=self.max_depth, deeper_retries=self.deeper_retries)
        return st


MEMO_MODES = ("none", "trivial", "dominator")


def make_memo_parser(tables, mode):
    if mode == "trivial":
        return TrivialMemo(tables)
    if mode == "dominator":
        return DominatorMemo(tables)
    raise ValueError(f"unknown memo mode {mode!r}")
