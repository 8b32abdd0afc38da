"""Table construction and the phase-by-phase parsing loop."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .closures import build_closure_table
from .dag import Session
from .grammar import (Grammar, classify_ambiguity, compute_nullability, compute_productivity,
                      grammar_to_rtn, optimize_rtn, parse_grammar)
from .semiring import make_semiring, solve_primitives


class UnknownToken(Exception):
    def __init__(self, position, name):
        self.position = position
        self.name = name
        super().__init__(f"unknown token {name!r} at position {position}")


@dataclass
class ParserTables:
    rtn: object
    analysis: object
    sr: object
    prims: object
    closures: object
    kind: str
    priorities: list = field(default_factory=list)

    def shifts(self, a):
        return self.rtn.shifts.get(a, ())


def build_tables(grammar, kind="bool", optimize=False, priorities=(), materialize=False) -> ParserTables:
    g = grammar if isinstance(grammar, Grammar) else parse_grammar(grammar)
    rtn = compute_productivity(grammar_to_rtn(g))
    if optimize:
        rtn = optimize_rtn(rtn)
    return tables_from_rtn(rtn, kind, priorities, materialize)


def tables_from_rtn(rtn, kind="bool", priorities=(), materialize=False) -> ParserTables:
    nullable = compute_nullability(rtn)
    analysis = classify_ambiguity(rtn, nullable)
    sr = make_semiring(kind, rtn, priorities)
    prims = solve_primitives(rtn, analysis, sr)
    closures = build_closure_table(rtn, prims, sr, materialize=materialize)
    return ParserTables(rtn, analysis, sr, prims, closures, kind, list(priorities))


@dataclass
class ParseState:
    relation: object
    position: int = 0


@dataclass
class ParseResult:
    value: object
    accepted: bool
    stats: dict


class Engine:
    """Runs phases over one DAG session.  Not thread safe."""

    def __init__(self, tables: ParserTables):
        self.tables = tables
        self.sr = tables.sr
        self.rtn = tables.rtn
        self.session = Session(tables)
        self.phases = 0
        null = tables.prims.null
        self._shift_plan = {}
        for a, shifts in self.rtn.shifts.items():
            plan = []
            for d in shifts:
                v = tables.prims.val[d.id]
                nt = null[d.target]
                aux = None if self.sr.is_zero(nt) else self.sr.mul(nt, v)
                plan.append((d.source, d.target, v, aux))
            self._shift_plan[a] = plan

    def init(self) -> ParseState:
        return ParseState(self.initial_relation(), 0)

    def initial_relation(self):
        sess, rtn = self.session, self.rtn
        below = sess.prepend_atomic(sess.table.init(rtn.stop), sess.root())
        rel = sess.prepend_atomic(sess.table.init(rtn.start), below)
        null_start = self.tables.prims.null[rtn.start]
        if not self.sr.is_zero(null_start):
            rel = sess.union([rel, sess.prepend_delta(null_start, below)])
        return rel

    def phase_relation(self, rel, a):
        """One input symbol: shift, then close under calls, reduces and nulling."""
        sess = self.session
        self.phases += 1
        init = sess.table.init
        merged = {}
        aux = []
        eps = sess.epsilon_label
        for s, t, v, auxv in self._shift_plan.get(a, ()):
            comp = sess.derivative(rel, s, v)
            if comp is None:
                continue
            merged.setdefault((t, comp.id), [init(t), comp, []])[2].append(eps)
            if auxv is not None:
                aux.append(sess.derivative(rel, s, auxv))
        rest = sess.union(aux)
        if rest is not None:
            for s2, comp in sess.derivative_all(rest).items():
                merged.setdefault((s2, comp.id), [init(s2), comp, []])[2].append(eps)
        return sess._build(merged, []) or sess.node((), None)

    def phase(self, state: ParseState, a) -> ParseState:
        return ParseState(self.phase_relation(state.relation, a), state.position + 1)

    def finish_relation(self, rel):
        sess = self.session
        return sess.epsilon(sess.derivative(rel, self.rtn.stop))

    def finish(self, state: ParseState):
        return self.finish_relation(state.relation)

    def stats(self):
        s = self.session
        return {"vertices": s.node_count, "edges": s.edge_count, "labels": s.label_count,
                "built_vertices": s.built_nodes, "built_edges": s.built_edges,
                "derivative_calls": s.derivative_calls, "phases": self.phases}


def check_tokens(rtn, tokens):
    known = set(rtn.terminals)
    for i, tok in enumerate(tokens):
        if tok not in known:
            raise UnknownToken(i, tok)


def parse(tables: ParserTables, tokens, memo="none", audit=False) -> ParseResult:
    tokens = list(tokens)
    check_tokens(tables.rtn, tokens)
    start = time.perf_counter()
    if memo == "none":
        eng = Engine(tables)
        rel = eng.initial_relation()
        for a in tokens:
            rel = eng.phase_relation(rel, a)
        value = eng.finish_relation(rel)
        session = eng.session
        stats = eng.stats()
        stats.update(hits=0, misses=len(tokens))
    else:
        from .memo import make_memo_parser
        runner = make_memo_parser(tables, memo)
        value = runner.run(tokens)
        session = runner.engine.session
        stats = runner.stats()
    stats["tokens"] = len(tokens)
    stats["wall_ms"] = (time.perf_counter() - start) * 1000.0
    if audit:
        stats["audit"] = session.audit_all()
    return ParseResult(value, not tables.sr.is_zero(value), stats)


def recognize(tables, tokens, memo="none") -> bool:
    return parse(tables, tokens, memo).accepted
