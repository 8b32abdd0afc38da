"""Scaling and memoization benchmarks over the fixture grammars."""

from __future__ import annotations

import csv
import io
import random

from .corpus import generate
from .engine import build_tables, parse
from .fixtures import FIXTURES
from .grammar import parse_grammar

COLUMNS = ("suite", "size", "wall_ms", "vertices", "edges", "labels", "hits", "misses")

SUITES = {
    # suite -> (fixture, semiring, default sizes)
    "lr": ("G_SA", "bool", (1000, 2000, 4000, 8000)),
    "unambiguous": ("G_PAL", "bool", (200, 400, 800)),
    "ambiguous": ("G_CAT", "bool", (50, 100, 200, 300)),
    "memo": ("G_DYCK", "bool", (10000, 100000)),
}

MEMO_MODES = ("none", "trivial", "dominator")


def palindrome(n, seed=0):
    rng = random.Random(seed)
    half = [rng.choice("ab") for _ in range(n // 2)]
    mid = [rng.choice("ab")] if n % 2 else []
    return half + mid + half[::-1]


def suite_input(suite, n, seed=0):
    name = SUITES[suite][0]
    if suite == "unambiguous":
        return palindrome(n, seed)
    if suite == "memo":
        return generate(parse_grammar(FIXTURES[name]), n, seed=seed)
    return ["a"] * n


def _row(suite, n, res, edges_key="edges"):
    st = res.stats
    return {"suite": suite, "size": n, "wall_ms": round(st["wall_ms"], 3),
            "vertices": st["vertices"], "edges": st[edges_key], "labels": st["labels"],
            "hits": st["hits"], "misses": st["misses"]}


def run_suite(suite, sizes=None, repeat=1, seed=0, kind=None):
    """Rows of measurements; wall time is the best of ``repeat`` runs."""
    name, default_kind, default_sizes = SUITES[suite]
    tables = build_tables(FIXTURES[name], kind or default_kind)
    rows = []
    for n in sizes or default_sizes:
        tokens = suite_input(suite, n, seed)
        modes = MEMO_MODES if suite == "memo" else ("none",)
        for mode in modes:
            best = None
            for _ in range(repeat):
                res = parse(tables, tokens, memo=mode)
                if best is None or res.stats["wall_ms"] < best.stats["wall_ms"]:
                    best = res
            label = f"memo-{mode}" if suite == "memo" else suite
            # the lr suite counts edges as constructed, before sharing
            rows.append(_row(label, len(tokens), best, "built_edges" if suite == "lr" else "edges"))
    return rows


def to_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()
