"""Command line front end: generate, run, check, bench, gen-corpus."""

from __future__ import annotations

import argparse
import random
import sys

from . import bench
from .corpus import generate
from .crosscheck import CheckReport, exhaustive, randomized, shrink
from .engine import UnknownToken, build_tables, parse
from .fixtures import random_grammar
from .grammar import EmptyLanguage, GrammarError, parse_grammar
from .memo import MEMO_MODES
from .semiring import UnsupportedGrammar, enumerate_forest
from .serialize import TablesFormatError, load_tables, save_tables

EXIT_OK, EXIT_REJECT, EXIT_ERROR, EXIT_MISMATCH = 0, 1, 2, 3


class CliError(Exception):
    pass


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror}") from exc


def parse_semiring(spec):
    """``bool``, ``count``, ``forest``, ``first`` or ``priority:<file>``."""
    if spec.startswith("priority:"):
        text = _read(spec.split(":", 1)[1])
        prios = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
        return "priority", prios
    if spec in ("bool", "count", "forest", "first"):
        return spec, []
    raise CliError(f"unknown semiring {spec!r}")


def load_grammar(path):
    text = _read(path)
    try:
        return parse_grammar(text)
    except GrammarError as exc:
        raise CliError(f"{path}:{exc}") from exc


def read_tokens(path):
    return _read(path).split()


def summary(tables):
    rtn, closures = tables.rtn, tables.closures
    closures.materialize()
    nullable = sum(1 for v in tables.prims.null if not tables.sr.is_zero(v))
    atomic = sum(len(closures.atomic_states(s)) for s in range(rtn.num_states))
    derive = sum(len(lst) for row in closures._derive.values() for lst in row.values())
    lines = [
        f"semiring      {tables.kind}",
        f"states        {rtn.num_states}",
        f"transitions   {len(rtn.transitions)}",
        f"terminals     {len(rtn.terminals)}",
        f"nullable      {nullable}",
        f"class         {tables.analysis.ambiguity_class}",
        f"atomic        {atomic}",
        f"derive edges  {derive}",
        f"primitives    {len(closures.prim_values)}",
    ]
    return "\n".join(lines)


# -- commands -------------------------------------------------------------

def cmd_generate(args, out):
    g = load_grammar(args.grammar)
    kind, prios = parse_semiring(args.semiring)
    try:
        tables = build_tables(g, kind, optimize=args.optimize, priorities=prios)
    except (UnsupportedGrammar, EmptyLanguage) as exc:
        raise CliError(f"{args.grammar}: {exc}") from exc
    save_tables(tables, args.out)
    print(summary(tables), file=out)
    print(f"wrote {args.out}", file=out)
    return EXIT_OK


def render_value(tables, value, limit):
    sr, rtn = tables.sr, tables.rtn
    if tables.kind == "bool":
        return None
    if tables.kind == "count":
        return str(value)
    if tables.kind == "forest":
        seqs, truncated = enumerate_forest(value, limit)
        lines = [f"forest nodes {sr.size}", f"sequences {len(seqs)}{'+' if truncated else ''}"]
        for seq in seqs:
            lines.append("  " + (" ".join(rtn.describe(rtn.transitions[d]) for d in seq) or "<eps>"))
        return "\n".join(lines)
    return sr.render(value, rtn)


def cmd_run(args, out):
    try:
        tables = load_tables(args.tables)
    except (TablesFormatError, KeyError) as exc:
        raise CliError(f"{args.tables}: {exc}") from exc
    tokens = read_tokens(args.input)
    try:
        res = parse(tables, tokens, memo=args.memo)
    except UnknownToken as exc:
        raise CliError(str(exc)) from exc
    print("accept" if res.accepted else "reject", file=out)
    if args.mode == "value" and res.accepted:
        text = render_value(tables, res.value, args.limit)
        if text is not None:
            print(text, file=out)
    st = res.stats
    print(f"tokens {st['tokens']}  phases {st['phases']}  hits {st['hits']}  misses {st['misses']}  "
          f"vertices {st['vertices']}  edges {st['edges']}  wall {st['wall_ms']:.1f} ms", file=out)
    return EXIT_OK if res.accepted else EXIT_REJECT


def _check_one(g, tables, args, report):
    exhaustive(tables, g, args.max_len, report)
    if args.trials:
        randomized(tables, g, args.trials, args.max_len + 1, 2 * args.max_len + 4, args.seed, report)


def cmd_check(args, out):
    kind, prios = parse_semiring(args.semiring)
    report = CheckReport()
    if args.random_grammars:
        rng = random.Random(args.seed)
        done = 0
        while done < args.random_grammars:
            g = random_grammar(rng)
            try:
                tables = build_tables(g, kind, priorities=prios)
            except (EmptyLanguage, UnsupportedGrammar):
                continue
            before = len(report.mismatches)
            _check_one(g, tables, args, report)
            done += 1
            for m in report.mismatches[before:]:
                m.grammar = g
        print(f"grammars {done}", file=out)
    else:
        if not args.grammar:
            raise CliError("check needs --grammar or --random-grammars")
        g = load_grammar(args.grammar)
        if args.tables:
            tables = load_tables(args.tables)
        else:
            try:
                tables = build_tables(g, kind, priorities=prios)
            except (EmptyLanguage, UnsupportedGrammar) as exc:
                raise CliError(str(exc)) from exc
        _check_one(g, tables, args, report)
        for m in report.mismatches:
            m.grammar = g
            m.tables = tables
    print(f"inputs {report.inputs}  mismatches {len(report.mismatches)}", file=out)
    for problem in report.audit[:10]:
        print(f"audit: {problem}", file=out)
    if report.ok:
        return EXIT_MISMATCH if report.audit else EXIT_OK
    m = report.mismatches[0]
    tables = getattr(m, "tables", None) or build_tables(m.grammar, kind, priorities=prios)
    small = shrink(tables, m.grammar, m.tokens)
    if args.random_grammars:
        print("grammar:\n" + m.grammar.to_text().rstrip(), file=out)
    print(f"counterexample: {' '.join(small) or '<empty>'}  (from {' '.join(m.tokens) or '<empty>'})", file=out)
    print(f"expected {m.expected}  got {m.got}", file=out)
    return EXIT_MISMATCH


def cmd_bench(args, out):
    sizes = [int(x) for x in args.sizes.split(",")] if args.sizes else None
    rows = bench.run_suite(args.suite, sizes, repeat=args.repeat, seed=args.seed)
    text = bench.to_csv(rows)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    out.write(text)
    return EXIT_OK


def cmd_gen_corpus(args, out):
    g = load_grammar(args.grammar)
    try:
        tokens = generate(g, args.tokens, seed=args.seed, max_depth=args.max_depth)
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    text = " ".join(tokens) + "\n"
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        out.write(text)
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="relparse", description="Relational parser generator and runner.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="build parser tables from a grammar file")
    g.add_argument("grammar")
    g.add_argument("-s", "--semiring", default="bool")
    g.add_argument("-o", "--out", required=True)
    g.add_argument("--optimize", action="store_true", help="merge equivalent RTN states first")
    g.set_defaults(func=cmd_generate)

    r = sub.add_parser("run", help="parse a token file with generated tables")
    r.add_argument("tables")
    r.add_argument("input", help="file of whitespace-separated tokens")
    r.add_argument("--mode", choices=("recognize", "value"), default="value")
    r.add_argument("--memo", choices=MEMO_MODES, default="none")
    r.add_argument("--limit", type=int, default=20, help="forest sequences to print")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("check", help="cross-validate against the oracles")
    c.add_argument("--grammar")
    c.add_argument("--tables", help="check these tables instead of freshly generated ones")
    c.add_argument("-s", "--semiring", default="bool")
    c.add_argument("--max-len", type=int, default=8)
    c.add_argument("--trials", type=int, default=100)
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--random-grammars", type=int, default=0, metavar="N")
    c.set_defaults(func=cmd_check)

    b = sub.add_parser("bench", help="scaling and memoization measurements (CSV)")
    b.add_argument("suite", choices=sorted(bench.SUITES))
    b.add_argument("--sizes", help="comma-separated input sizes")
    b.add_argument("--repeat", type=int, default=1)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("-o", "--out")
    b.set_defaults(func=cmd_bench)

    k = sub.add_parser("gen-corpus", help="emit a random sentence of a grammar")
    k.add_argument("--grammar", required=True)
    k.add_argument("--tokens", type=int, required=True)
    k.add_argument("--seed", type=int, default=0)
    k.add_argument("--max-depth", type=int, default=12)
    k.add_argument("-o", "--out")
    k.set_defaults(func=cmd_gen_corpus)
    return p


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
