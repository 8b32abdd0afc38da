"""Immutable DAG of parsing relations and of the labels on their edges.

A :class:`RelationNode` denotes the relation::

    sum over edges (label, atomic, target) of  label . atomic . target
    + final label (the pair of empty configuration and its history)

Edges only point at nodes created earlier, so the structure is acyclic by
construction.  Nodes and labels are hash-consed inside a :class:`Session`;
two structurally equal nodes are the same object.

Labels defer semiring work: a label's tensor value is computed once, on
first use, and cached on the label.
"""

from __future__ import annotations

from .closures import EPS_PRIM


class ZeroPrepend(ValueError):
    pass


class NeedDeeper(Exception):
    """Raised when a derivative runs into a not yet materialized stack hole."""


class Label:
    __slots__ = ("kind", "delta", "prim", "tail", "children", "id", "tensor")

    def __init__(self, kind, delta, prim, tail, children, id_):
        self.kind = kind          # "eps", "pre" or "union"
        self.delta = delta
        self.prim = prim
        self.tail = tail
        self.children = children
        self.id = id_
        self.tensor = None

    def __repr__(self):
        return f"L{self.id}"


class RelationNode:
    __slots__ = ("id", "edges", "final", "hole", "_key")

    def __init__(self, id_, edges, final, hole=False):
        self.id = id_
        self.edges = edges        # tuple of (Label, atomic id, RelationNode)
        self.final = final        # Label or None
        self.hole = hole

    @property
    def is_dead(self):
        return not self.edges and self.final is None

    def __repr__(self):
        return f"node#{self.id}"


class Session:
    """Interning tables, statistics and the DAG operations for one table set."""

    def __init__(self, tables):
        self.table = tables.closures
        self.sr = tables.sr
        self._labels = {}
        self._nodes = {}
        self.label_count = 0
        self.node_count = 0
        self.edge_count = 0
        self.built_nodes = 0      # node constructions before sharing
        self.built_edges = 0
        self.derivative_calls = 0
        self.label_ops = 0
        # commutative values are cheap to combine, so fold labels eagerly and
        # intern them by value; equal values then share one label
        self.eager = self.sr.commutative
        self.epsilon_label = self._label("eps", None, None, None, None, ("eps",))
        if self.eager:
            self.epsilon_label.tensor = self.sr.t_one
            self._labels[("val", self.sr.t_one)] = self.epsilon_label
        self._root = self.node((), self.epsilon_label)
        self.hole = RelationNode(-1, (), None, hole=True)

    # -- interning --------------------------------------------------------

    def _label(self, kind, delta, prim, tail, children, key):
        lab = self._labels.get(key)
        if lab is None:
            lab = Label(kind, delta, prim, tail, children, self.label_count)
            self.label_count += 1
            self._labels[key] = lab
        return lab

    def _value(self, tensor):
        lab = self._labels.get(("val", tensor))
        if lab is None:
            lab = self._label("pre", tensor, EPS_PRIM, self.epsilon_label, None, ("val", tensor))
            lab.tensor = tensor
        return lab

    def prepend_label(self, delta, prim, tail):
        if self.eager:
            sr = self.sr
            v = sr.mul(delta, tail.tensor)
            if prim != EPS_PRIM:
                v = sr.mul(v, self.table.prim(prim))
            self.label_ops += 1
            return self._value(v)
        return self._label("pre", delta, prim, tail, None, ("pre", delta, prim, tail.id))

    def value_label(self, v):
        return self.prepend_label(v, EPS_PRIM, self.epsilon_label)

    def union_label(self, labels):
        if len(labels) == 1:
            return labels[0]
        if self.eager:
            sr = self.sr
            v = labels[0].tensor
            for x in labels[1:]:
                v = sr.add(v, x.tensor)
            self.label_ops += len(labels) - 1
            return self._value(v)
        labels = tuple(labels)
        return self._label("union", None, None, None, labels, ("union",) + tuple(x.id for x in labels))

    def node(self, edges, final):
        self.built_nodes += 1
        self.built_edges += len(edges)
        key = (tuple((lab.id, a, t.id) for lab, a, t in edges), final.id if final is not None else -1)
        node = self._nodes.get(key)
        if node is None:
            node = RelationNode(self.node_count, tuple(edges), final)
            self.node_count += 1
            self.edge_count += len(edges)
            self._nodes[key] = node
        return node

    # -- label semantics --------------------------------------------------

    def tensor(self, lab):
        t = lab.tensor
        if t is not None:
            return t
        sr = self.sr
        stack = [lab]
        while stack:
            x = stack[-1]
            if x.tensor is not None:
                stack.pop()
                continue
            if x.kind == "eps":
                x.tensor = sr.t_one
                stack.pop()
            elif x.kind == "pre":
                if x.tail.tensor is None:
                    stack.append(x.tail)
                    continue
                head = sr.t_pair(sr.one, x.delta)
                if x.prim != EPS_PRIM:
                    head = sr.t_mul(head, self.table.prim(x.prim))
                    self.label_ops += 1
                x.tensor = sr.t_mul(head, x.tail.tensor)
                self.label_ops += 1
                stack.pop()
            else:
                pending = [c for c in x.children if c.tensor is None]
                if pending:
                    stack.extend(pending)
                    continue
                acc = sr.t_zero
                for c in x.children:
                    acc = sr.t_add(acc, c.tensor)
                    self.label_ops += 1
                x.tensor = acc
                stack.pop()
        return lab.tensor

    def flatten(self, lab):
        return self.sr.t_wrap(self.sr.one, self.tensor(lab))

    # -- relation operations ----------------------------------------------

    def root(self):
        return self._root

    def prepend_atomic(self, a, tail):
        return self.node(((self.epsilon_label, a, tail),), None)

    def prepend_delta(self, delta, tail):
        if self.sr.is_zero(delta):
            raise ZeroPrepend("cannot prepend a zero value")
        edges = tuple((self.prepend_label(delta, EPS_PRIM, lab), a, t) for lab, a, t in tail.edges)
        final = None if tail.final is None else self.prepend_label(delta, EPS_PRIM, tail.final)
        return self.node(edges, final)

    def union(self, nodes):
        nodes = [x for x in nodes if x is not None]
        if not nodes:
            return None
        if len(nodes) == 1:
            return nodes[0]
        merged = {}
        finals = []
        for x in nodes:
            for lab, a, t in x.edges:
                merged.setdefault((a, t.id), [a, t, []])[2].append(lab)
            if x.final is not None:
                finals.append(x.final)
        return self._build(merged, finals)

    def _build(self, merged, finals, raw=False):
        """Node from grouped labels (or, with ``raw``, grouped eager values)."""
        if not merged and not finals:
            return None
        join = self._sum_label if raw else self.union_label
        edges = tuple((join(labs), a, t) for a, t, labs in merged.values())
        final = join(finals) if finals else None
        return self.node(edges, final)

    def _sum_label(self, values):
        add = self.sr.add
        v = values[0]
        for x in values[1:]:
            v = add(v, x)
        self.label_ops += len(values) - 1
        return self._value(v)

    def _expand(self, lab, a, t, items, prefix, acc):
        """Add the derivative contributions of one edge for ``items`` to ``acc``."""
        sr, table = self.sr, self.table
        eager = self.eager
        merged, finals = acc
        f = self.flatten(lab)
        for pid, a2 in items:
            v = f if pid == EPS_PRIM else sr.t_wrap(f, table.prim(pid))
            if prefix is not None:
                v = sr.mul(prefix, v)
            if sr.is_zero(v):
                continue
            if table.items(a2):
                merged.setdefault((a2, t.id), [a2, t, []])[2].append(v if eager else self.value_label(v))
            apid = table.accept(a2)
            if apid is None:
                continue
            if t.hole:
                raise NeedDeeper()
            if eager:
                # raw values; _build sums them into one interned label per edge
                vp = v if apid == EPS_PRIM else sr.mul(v, table.prim(apid))
                mul = sr.mul
                for l2, x2, t2 in t.edges:
                    merged.setdefault((x2, t2.id), [x2, t2, []])[2].append(mul(vp, l2.tensor))
                if t.final is not None:
                    finals.append(mul(vp, t.final.tensor))
                self.label_ops += len(t.edges)
                continue
            for l2, x2, t2 in t.edges:
                merged.setdefault((x2, t2.id), [x2, t2, []])[2].append(self.prepend_label(v, apid, l2))
            if t.final is not None:
                finals.append(self.prepend_label(v, apid, t.final))

    def derivative(self, node, s, prefix=None):
        """Relation of everything below top state ``s`` (None when empty)."""
        self.derivative_calls += 1
        acc = ({}, [])
        derive = self.table.derive
        for lab, a, t in node.edges:
            items = derive(a, s)
            if items:
                self._expand(lab, a, t, items, prefix, acc)
        return self._build(*acc, raw=self.eager)

    def derivative_all(self, node):
        """Derivatives by every possible top state, as a dict state -> node."""
        self.derivative_calls += 1
        groups = {}
        items_of = self.table.items
        for lab, a, t in node.edges:
            for u, items in items_of(a).items():
                acc = groups.get(u)
                if acc is None:
                    acc = groups[u] = ({}, [])
                self._expand(lab, a, t, items, None, acc)
        out = {}
        for u in sorted(groups):
            res = self._build(*groups[u], raw=self.eager)
            if res is not None:
                out[u] = res
        return out

    def epsilon(self, node):
        if node is None or node.final is None:
            return self.sr.zero
        return self.flatten(node.final)

    def top_states(self, node):
        tops = set()
        for _, a, _ in node.edges:
            tops.update(self.table.items(a))
        return tops

    # -- inspection -------------------------------------------------------

    def reachable(self, node):
        seen = {}
        stack = [node]
        while stack:
            x = stack.pop()
            if x.id in seen:
                continue
            seen[x.id] = x
            stack.extend(t for _, _, t in x.edges)
        return [seen[k] for k in sorted(seen)]

    def dump(self, node):
        lines = []
        for x in self.reachable(node):
            final = x.final.id if x.final is not None else "-"
            edges = ", ".join(f"({lab.id}, {self.table.describe(a)}, {t.id})" for lab, a, t in x.edges)
            lines.append(f"node#{x.id}: final={final} edges=[{edges}]")
        return "\n".join(lines)

    def audit(self, node):
        """Check the DAG invariants below ``node``; returns a list of problems."""
        problems = []
        for x in self.reachable(node):
            keys = set()
            for lab, a, t in x.edges:
                if t.id >= x.id and not t.hole:
                    problems.append(f"node#{x.id} has edge to later node#{t.id}")
                if (a, t.id) in keys:
                    problems.append(f"node#{x.id} has duplicate edge key")
                keys.add((a, t.id))
        return problems

    def audit_all(self):
        """Audit every node of the session, checking each still matches its intern key."""
        problems = []
        for key, x in self._nodes.items():
            now = (tuple((lab.id, a, t.id) for lab, a, t in x.edges),
                   x.final.id if x.final is not None else -1)
            if now != key:
                problems.append(f"node#{x.id} changed after creation")
            for _, _, t in x.edges:
                if t.id >= x.id and not t.hole:
                    problems.append(f"node#{x.id} has edge to later node#{t.id}")
        return problems

    def language(self, node, max_len):
        """Configurations (top first) with nonzero value, up to ``max_len`` states."""
        out = {}
        frontier = [((), node)]
        for _ in range(max_len):
            nxt = []
            for prefix, x in frontier:
                for u, comp in self.derivative_all(x).items():
                    conf = prefix + (u,)
                    v = self.epsilon(comp)
                    if not self.sr.is_zero(v):
                        out[conf] = self.sr.add(out[conf], v) if conf in out else v
                    if comp.edges:
                        nxt.append((conf, comp))
            frontier = nxt
        return out
