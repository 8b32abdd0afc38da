"""Cross-validation of generated tables against the oracles."""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .corpus import generate, min_yields
from .engine import Engine
from .oracle import INFINITE, Earley, count_trees, earley_recognize


@dataclass
class Mismatch:
    tokens: tuple
    expected: object
    got: object


@dataclass
class CheckReport:
    inputs: int = 0
    mismatches: list = field(default_factory=list)
    audit: list = field(default_factory=list)  # DAG invariant violations

    @property
    def ok(self):
        return not self.mismatches


class _Prober:
    """Engine runs with a per-(relation, token) phase cache.

    The DAG is hash-consed, so many prefixes end at the same relation node;
    the cache makes a whole prefix-tree walk cheap.
    """

    def __init__(self, tables):
        self.tables = tables
        self.engine = Engine(tables)
        self.steps = {}
        self.ends = {}
        self.root = self.engine.initial_relation()

    def step(self, rel, a):
        key = (rel.id, a)
        out = self.steps.get(key)
        if out is None:
            out = self.steps[key] = self.engine.phase_relation(rel, a)
        return out

    def value(self, rel):
        v = self.ends.get(rel.id)
        if v is None:
            v = self.ends[rel.id] = self.engine.finish_relation(rel)
        return v

    def run(self, tokens):
        rel = self.root
        for a in tokens:
            rel = self.step(rel, a)
        return self.value(rel)


def _expected(tables, g, tokens, accepted):
    if tables.kind == "count":
        if not accepted:
            return 0
        n = count_trees(g, tokens)
        return None if n is INFINITE else n
    return accepted


def _got(tables, value):
    sr = tables.sr
    if tables.kind == "count":
        return value
    return not sr.is_zero(value)


def exhaustive(tables, g, max_len, report=None, alphabet=None) -> CheckReport:
    """Every input up to ``max_len`` over the terminals, walked as a prefix tree."""
    report = report or CheckReport()
    alphabet = sorted(alphabet or tables.rtn.terminals)
    earley = Earley(g)
    prober = _Prober(tables)
    stack = [((), earley.initial(), prober.root)]
    while stack:
        tokens, sets, rel = stack.pop()
        report.inputs += 1
        accepted = earley.accepts(sets)
        exp = _expected(tables, g, tokens, accepted)
        got = _got(tables, prober.value(rel))
        if exp is not None and exp != got:
            report.mismatches.append(Mismatch(tokens, exp, got))
        if len(tokens) == max_len:
            continue
        for a in reversed(alphabet):
            nsets = earley.step(sets, a)
            nrel = prober.step(rel, a)
            if Earley.dead(nsets) and nrel.is_dead:
                continue  # both sides reject every extension
            stack.append((tokens + (a,), nsets, nrel))
    report.audit.extend(prober.engine.session.audit_all())
    return report


def randomized(tables, g, trials, min_len, max_len, seed=0, report=None) -> CheckReport:
    """Random inputs: half uniform token strings, half sampled sentences."""
    report = report or CheckReport()
    rng = random.Random(seed)
    alphabet = sorted(tables.rtn.terminals)
    prober = _Prober(tables)
    can_generate = min_yields(g)[g.start] is not None
    for i in range(trials):
        n = rng.randint(min_len, max_len)
        if can_generate and i % 2:
            tokens = tuple(generate(g, n, seed=rng.randrange(1 << 30), max_depth=8))
        else:
            tokens = tuple(rng.choice(alphabet) for _ in range(n))
        report.inputs += 1
        accepted = earley_recognize(g, tokens)
        exp = _expected(tables, g, tokens, accepted)
        got = _got(tables, prober.run(tokens))
        if exp is not None and exp != got:
            report.mismatches.append(Mismatch(tokens, exp, got))
    report.audit.extend(prober.engine.session.audit_all())
    return report


def shrink(tables, g, tokens):
    """Delete tokens while the engine still disagrees with the oracle."""
    prober = _Prober(tables)

    def bad(ts):
        exp = _expected(tables, g, ts, earley_recognize(g, ts))
        return exp is not None and exp != _got(tables, prober.run(ts))

    tokens = tuple(tokens)
    progress = True
    while progress:
        progress = False
        for i in range(len(tokens)):
            cand = tokens[:i] + tokens[i + 1:]
            if bad(cand):
                tokens = cand
                progress = True
                break
    return tokens
