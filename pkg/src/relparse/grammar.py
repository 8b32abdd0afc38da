"""Grammar front end and recursive transition network (RTN) construction.

A grammar file looks like::

    # comment
    start S;
    S : 'a' S | ;

Terminals are quoted token names, nonterminals are bare identifiers.  Every
alternative gets a production label ``<Name>.<index>`` (zero based, source
order); the synthetic root production is labelled ``<root>``.

The RTN has one state per dot position of each alternative, plus a fresh
``start`` state, an ``accept`` state and the ``stop`` guard.  States are small
integers; transitions are :class:`Transition` tuples indexed by ``id``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple

import networkx as nx

ROOT_LABEL = "<root>"

SHIFT = "shift"
CALL = "call"
REDUCE = "reduce"

FINITE = "Finite"
REGULAR_INFINITE = "RegularInfinite"
NONREGULAR_INFINITE = "NonregularInfinite"


class GrammarError(Exception):
    """Problem in grammar text; carries an optional 1-based line/column."""

    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{line}:{col}: {message}"
        super().__init__(message)


class EmptyLanguage(GrammarError):
    pass


@dataclass
class Grammar:
    start: str
    rules: dict  # nonterminal -> list of alternatives (tuples of symbols)
    terminals: set = field(default_factory=set)
    # symbols are ('t', name) for terminals and ('n', name) for nonterminals

    @property
    def nonterminals(self):
        return set(self.rules)

    def labels(self):
        return [f"{nt}.{i}" for nt, alts in self.rules.items() for i in range(len(alts))]

    def alternatives(self):
        for nt, alts in self.rules.items():
            for i, alt in enumerate(alts):
                yield nt, i, alt

    def to_text(self):
        lines = [f"start {self.start};"]
        for nt, alts in self.rules.items():
            rendered = []
            for alt in alts:
                rendered.append(" ".join(f"'{v}'" if k == "t" else v for k, v in alt))
            lines.append(f"{nt} : " + " | ".join(rendered) + " ;")
        return "\n".join(lines) + "\n"


_TOKEN_RE = re.compile(
    r"""(?P<ws>[ \t\r\n]+)
      | (?P<comment>\#[^\n]*)
      | (?P<term>'(?:[^'\\\n]|\\.)*')
      | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
      | (?P<punct>[:|;])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise GrammarError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind not in ("ws", "comment"):
            value = m.group()
            if kind == "term":
                value = re.sub(r"\\(.)", r"\1", value[1:-1])
                if not value:
                    raise GrammarError("empty terminal", line, col)
            yield kind, value, line, col
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    yield "eof", None, line, pos - line_start + 1


def parse_grammar(text: str) -> Grammar:
    toks = list(_tokenize(text))
    i = 0

    def expect(kind, value=None):
        nonlocal i
        k, v, ln, col = toks[i]
        if k != kind or (value is not None and v != value):
            want = value or kind
            got = "end of input" if k == "eof" else repr(v)
            raise GrammarError(f"expected {want}, got {got}", ln, col)
        i += 1
        return v, ln, col

    start = None
    rules = {}
    uses = []  # (name, line, col)
    while toks[i][0] != "eof":
        k, v, ln, col = toks[i]
        if k == "name" and v == "start":
            i += 1
            if start is not None:
                raise GrammarError("duplicate start declaration", ln, col)
            name, sl, sc = expect("name")
            start = (name, sl, sc)
            expect("punct", ";")
            continue
        name, nl_, nc = expect("name")
        if name in rules:
            raise GrammarError(f"duplicate definition of {name}", nl_, nc)
        expect("punct", ":")
        alts = [[]]
        while True:
            k, v, ln, col = toks[i]
            if k == "term":
                alts[-1].append(("t", v))
                i += 1
            elif k == "name":
                if v == "start":
                    raise GrammarError("'start' is reserved", ln, col)
                alts[-1].append(("n", v))
                uses.append((v, ln, col))
                i += 1
            elif k == "punct" and v == "|":
                alts.append([])
                i += 1
            elif k == "punct" and v == ";":
                i += 1
                break
            else:
                got = "end of input" if k == "eof" else repr(v)
                raise GrammarError(f"expected symbol, '|' or ';', got {got}", ln, col)
        rules[name] = [tuple(a) for a in alts]
    if start is None:
        raise GrammarError("missing start declaration")
    for name, ln, col in uses:
        if name not in rules:
            raise GrammarError(f"undeclared symbol {name}", ln, col)
    if start[0] not in rules:
        raise GrammarError(f"undeclared symbol {start[0]}", start[1], start[2])
    terminals = {v for alts in rules.values() for alt in alts for k, v in alt if k == "t"}
    return Grammar(start=start[0], rules=rules, terminals=terminals)


class Transition(NamedTuple):
    id: int
    kind: str
    source: int
    arg: object  # terminal (shift), callee state (call), label (reduce)
    target: int | None  # None for reduce

    def describe(self, names):
        if self.kind == SHIFT:
            return f"shift({names[self.source]},{self.arg},{names[self.target]})"
        if self.kind == CALL:
            return f"call({names[self.source]},{names[self.arg]},{names[self.target]})"
        return f"reduce({names[self.source]},{self.arg})"


class RTN:
    """Recursive transition network over integer states.

    Attributes:
        names: printable name per state.
        start, accept, stop: distinguished states.
        transitions: list of :class:`Transition`, ``transitions[i].id == i``.
        out: per state, list of outgoing transitions.
        shifts: terminal -> list of shift transitions (the per-terminal index).
        nonshift: list of call and reduce transitions.
    """

    def __init__(self, names, start, accept, stop, transitions, terminals, labels):
        self.names = list(names)
        self.start = start
        self.accept = accept
        self.stop = stop
        self.terminals = sorted(terminals)
        self.labels = list(labels)
        self.transitions = [Transition(i, *t[1:]) for i, t in enumerate(transitions)]
        self.out = [[] for _ in self.names]
        self.shifts = {a: [] for a in self.terminals}
        self.nonshift = []
        for d in self.transitions:
            self.out[d.source].append(d)
            if d.kind == SHIFT:
                self.shifts.setdefault(d.arg, []).append(d)
            else:
                self.nonshift.append(d)
        if self.out[stop]:
            raise ValueError("stop state must not have outgoing transitions")

    @property
    def num_states(self):
        return len(self.names)

    def calls(self):
        return (d for d in self.transitions if d.kind == CALL)

    def describe(self, d):
        return self.transitions[d].describe(self.names) if isinstance(d, int) else d.describe(self.names)

    def restricted(self, keep):
        """Copy of the network keeping only states in ``keep`` (renumbered)."""
        keep = sorted(set(keep) | {self.start, self.stop})
        new = {s: i for i, s in enumerate(keep)}
        trans = []
        for d in self.transitions:
            if d.source not in new:
                continue
            if d.kind == CALL and (d.arg not in new or d.target not in new):
                continue
            if d.kind == SHIFT and d.target not in new:
                continue
            arg = new[d.arg] if d.kind == CALL else d.arg
            tgt = None if d.target is None else new[d.target]
            trans.append((None, d.kind, new[d.source], arg, tgt))
        return RTN([self.names[s] for s in keep], new[self.start], new.get(self.accept, -1),
                   new[self.stop], trans, self.terminals, self.labels)

    def to_dict(self):
        return {
            "names": self.names, "start": self.start, "accept": self.accept, "stop": self.stop,
            "terminals": self.terminals, "labels": self.labels,
            "transitions": [[d.kind, d.source, d.arg, d.target] for d in self.transitions],
        }

    @classmethod
    def from_dict(cls, data):
        trans = [(None, k, s, a, t) for k, s, a, t in data["transitions"]]
        return cls(data["names"], data["start"], data["accept"], data["stop"], trans,
                   data["terminals"], data["labels"])


def grammar_to_rtn(g: Grammar) -> RTN:
    names = ["start", "accept"]
    first = {}  # nonterminal -> first state of each alternative
    layout = []
    for nt, i, alt in g.alternatives():
        base = len(names)
        names.extend(f"{nt}.{i}@{k}" for k in range(len(alt) + 1))
        first.setdefault(nt, []).append(base)
        layout.append((nt, i, alt, base))
    stop = len(names)
    names.append("stop")
    trans = []
    for nt, i, alt, base in layout:
        for k, (kind, sym) in enumerate(alt):
            s, t = base + k, base + k + 1
            if kind == "t":
                trans.append((None, SHIFT, s, sym, t))
            else:
                for u in first[sym]:
                    trans.append((None, CALL, s, u, t))
        trans.append((None, REDUCE, base + len(alt), f"{nt}.{i}", None))
    for u in first[g.start]:
        trans.append((None, CALL, 0, u, 1))
    trans.append((None, REDUCE, 1, ROOT_LABEL, None))
    return RTN(names, 0, 1, stop, trans, g.terminals, g.labels() + [ROOT_LABEL])


def compute_nullability(rtn: RTN) -> frozenset:
    nullable = set()
    changed = True
    while changed:
        changed = False
        for d in rtn.nonshift:
            if d.source in nullable:
                continue
            if d.kind == REDUCE or (d.arg in nullable and d.target in nullable):
                nullable.add(d.source)
                changed = True
    return frozenset(nullable)


def productive_states(rtn: RTN) -> set:
    prod = set()
    changed = True
    while changed:
        changed = False
        for d in rtn.transitions:
            if d.source in prod:
                continue
            ok = (d.kind == REDUCE or (d.kind == SHIFT and d.target in prod)
                  or (d.kind == CALL and d.arg in prod and d.target in prod))
            if ok:
                prod.add(d.source)
                changed = True
    return prod


def reachable_states(rtn: RTN) -> set:
    seen = {rtn.start}
    todo = [rtn.start]
    while todo:
        s = todo.pop()
        for d in rtn.out[s]:
            nxt = [] if d.kind == REDUCE else [d.target] + ([d.arg] if d.kind == CALL else [])
            for t in nxt:
                if t not in seen:
                    seen.add(t)
                    todo.append(t)
    return seen


def compute_productivity(rtn: RTN) -> RTN:
    """Drop states that derive no terminal word, then states no longer reachable."""
    prod = productive_states(rtn)
    if rtn.start not in prod:
        raise EmptyLanguage("the start symbol derives no terminal word")
    if len(prod) + 1 < rtn.num_states:
        rtn = rtn.restricted(prod)
    live = reachable_states(rtn) | {rtn.stop}
    if len(live) < rtn.num_states:
        rtn = rtn.restricted(live)
    return rtn


def same_level_reach(rtn: RTN, nullable) -> list:
    """For each state s, the states t with s =>* t by calls whose callee is nulled."""
    step = [set() for _ in range(rtn.num_states)]
    for d in rtn.calls():
        if d.arg in nullable:
            step[d.source].add(d.target)
    reach = []
    for s in range(rtn.num_states):
        seen = {s}
        todo = [s]
        while todo:
            x = todo.pop()
            for y in step[x]:
                if y not in seen:
                    seen.add(y)
                    todo.append(y)
        reach.append(seen)
    return reach


@dataclass
class StateAnalysis:
    nullable: frozenset
    productive: frozenset
    ambiguity_class: str
    witness: list = field(default_factory=list)

    def to_dict(self):
        return {"nullable": sorted(self.nullable), "productive": sorted(self.productive),
                "ambiguity_class": self.ambiguity_class, "witness": self.witness}

    @classmethod
    def from_dict(cls, data):
        return cls(frozenset(data["nullable"]), frozenset(data["productive"]),
                   data["ambiguity_class"], list(data["witness"]))


def dependency_graph(rtn: RTN, nullable) -> nx.DiGraph:
    """Dependency graph between the nulling and stack-skipping unknowns.

    Nodes are ``('null', s)`` for the nulling language of s and ``('skip', u, t)``
    for the stack-skipping relation reading u with level state t.  Each edge has
    a boolean ``left`` attribute: True when the dependency inserts a nonempty
    nulled context that runs *before* the inner unknown (grammar-left context),
    in addition to the nulled material after it.
    """
    live = reachable_states(rtn)
    reach = same_level_reach(rtn, nullable)
    g = nx.DiGraph()

    def add(a, b, left):
        if g.has_edge(a, b):
            g[a][b]["left"] = g[a][b]["left"] or left
        else:
            g.add_edge(a, b, left=left)

    for d in rtn.calls():
        s, u, t = d.source, d.arg, d.target
        if s not in live or s not in nullable:
            continue
        if u in nullable and t in nullable:
            add(("null", s), ("null", u), False)
            add(("null", s), ("null", t), True)
    # skip(u, t') depends on skip(u', t'') when u' is nullable and some
    # call(t', t''', u) has t''' =>* t'' on the same level.
    returns_from = {}
    for d in rtn.calls():
        if d.target in nullable:
            returns_from.setdefault(d.source, []).append(d.target)
    for d in rtn.calls():
        tp, callee, u = d.source, d.arg, d.target
        if tp not in live:
            continue
        for tpp in reach[callee]:
            for up in returns_from.get(tpp, ()):
                add(("skip", u, tp), ("skip", up, tpp), tpp != callee)
    return g


def classify_ambiguity(rtn: RTN, nullable) -> StateAnalysis:
    g = dependency_graph(rtn, nullable)
    cls, witness = FINITE, []
    for comp in nx.strongly_connected_components(g):
        sub = g.subgraph(comp)
        if len(comp) == 1:
            (n,) = comp
            if not g.has_edge(n, n):
                continue
        left = any(data["left"] for _, _, data in sub.edges(data=True))
        if left and cls != NONREGULAR_INFINITE:
            cls = NONREGULAR_INFINITE
            witness = _cycle_witness(rtn, sub)
        elif not left and cls == FINITE:
            cls = REGULAR_INFINITE
            witness = _cycle_witness(rtn, sub)
    return StateAnalysis(frozenset(nullable), frozenset(productive_states(rtn)), cls, witness)


def _cycle_witness(rtn, sub):
    cycle = nx.find_cycle(sub)
    out = []
    for a, _b in cycle:
        if a[0] == "null":
            out.append(f"null({rtn.names[a[1]]})")
        else:
            out.append(f"skip({rtn.names[a[1]]},{rtn.names[a[2]]})")
    return out


def optimize_rtn(rtn: RTN) -> RTN:
    """Merge states with identical outgoing behaviour (Moore-style refinement).

    Transitions are kept as a multiset, so two distinct transitions never
    collapse into one and run counts are preserved.
    """
    n = rtn.num_states
    block = [0] * n
    block[rtn.start] = 1
    block[rtn.stop] = 2
    while True:
        sigs = {}
        new_block = []
        for s in range(n):
            sig = [block[s]]
            items = []
            for d in rtn.out[s]:
                if d.kind == SHIFT:
                    items.append((0, d.arg, block[d.target]))
                elif d.kind == CALL:
                    items.append((1, block[d.arg], block[d.target]))
                else:
                    items.append((2, d.arg))
            sig.append(tuple(sorted(items, key=repr)))
            new_block.append(sigs.setdefault(tuple(sig), len(sigs)))
        if len(sigs) == len(set(block)):
            break
        block = new_block
    reps = {}
    for s in range(n):
        reps.setdefault(block[s], s)
    if len(reps) == n:
        return rtn
    rep_of = [reps[block[s]] for s in range(n)]
    keep = sorted(reps.values())
    index = {s: i for i, s in enumerate(keep)}
    trans = []
    for s in keep:
        for d in rtn.out[s]:
            arg = index[rep_of[d.arg]] if d.kind == CALL else d.arg
            tgt = None if d.target is None else index[rep_of[d.target]]
            trans.append((None, d.kind, index[s], arg, tgt))
    return RTN([rtn.names[s] for s in keep], index[rep_of[rtn.start]], index.get(rep_of[rtn.accept], -1),
               index[rep_of[rtn.stop]], trans, rtn.terminals, rtn.labels)
