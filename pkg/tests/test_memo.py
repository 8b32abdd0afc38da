import random
from collections import Counter

import pytest

from relparse import parse
from relparse.corpus import generate
from relparse.memo import DominatorMemo, TrivialMemo, make_memo_parser
from relparse.semiring import enumerate_forest

from conftest import all_inputs, grammar_for, tables_for

FINITE = ["G_A", "G_AS", "G_SA", "G_CAT", "G_DYCK", "G_PAL"]


def hit_pattern(memo, tokens):
    state = memo.initial_stack() if isinstance(memo, DominatorMemo) else memo.engine.initial_relation()
    out = []
    for a in tokens:
        before = memo.hits
        state = memo.phase(state, a)
        out.append(memo.hits > before)
    return out


@pytest.mark.parametrize("cls", [TrivialMemo, DominatorMemo])
def test_g_as_hits(cls):
    memo = cls(tables_for("G_AS"))
    assert hit_pattern(memo, ["a"] * 4) == [False, False, True, True]


@pytest.mark.parametrize("cls", [TrivialMemo, DominatorMemo])
def test_repeated_run(cls):
    sizes = []
    for n in (100, 1000):
        memo = cls(tables_for("G_AS"))
        memo.run(["a"] * n)
        st = memo.stats()
        sizes.append(st["cache_size"])
        assert st["hits"] / n >= 0.97
    assert sizes[0] == sizes[1]
    memo = cls(tables_for("G_AS"))
    memo.run(["a"] * 1000)
    assert memo.hits / 1000 >= 0.99


def chain(memo, n):
    """node -> ... -> hole, a straight line of n nodes above the hole."""
    sess = memo.session
    node = memo.hole
    out = []
    for _ in range(n):
        node = sess.node(((sess.epsilon_label, 0, node),), None)
        out.append(node)
    return out


def test_factorize_chain():
    memo = DominatorMemo(tables_for("G_DYCK"))
    nodes = chain(memo, 3)
    top = nodes[-1]
    factors = memo.factorize(top)
    assert len(factors) >= 2
    assert memo.materialize(factors + [memo.session.root()], len(factors) + 1) is \
        memo.plug(top, memo.session.root())


def test_factorize_two_paths_is_single():
    memo = DominatorMemo(tables_for("G_DYCK"))
    sess = memo.session
    x = sess.node(((sess.epsilon_label, 0, memo.hole),), None)
    y = sess.node(((sess.epsilon_label, 1, memo.hole),), None)
    top = sess.node(((sess.epsilon_label, 0, x), (sess.epsilon_label, 1, y)), None)
    assert memo.factorize(top) == [top]


def test_refactored_phases_keep_language():
    t = tables_for("G_DYCK")
    rng = random.Random(7)
    memo = DominatorMemo(t)
    sess = memo.session
    stack = memo.initial_stack()
    tokens = generate(grammar_for("G_DYCK"), 60, seed=3)
    checked = 0
    for a in tokens:
        before = memo.materialize(stack, len(stack))
        want = memo.engine.phase_relation(before, a)
        stack = memo.phase(stack, a)
        got = memo.materialize(stack, len(stack))
        if rng.random() < 0.9 and checked < 50:
            assert sess.language(got, 6) == sess.language(want, 6)
            checked += 1
        assert memo.check_stack(stack)
    assert checked == 50


def test_touch_depth_bound():
    for name in ("G_DYCK", "G_PAL", "G_CAT", "G_SA"):
        t = tables_for(name)
        memo = DominatorMemo(t)
        rng = random.Random(1)
        tokens = generate(grammar_for(name), 80, seed=rng.randrange(100), max_depth=8)
        memo.run(tokens)
        assert memo.max_depth <= 3


def same(kind, a, b):
    if kind == "forest":
        return Counter(enumerate_forest(a)[0]) == Counter(enumerate_forest(b)[0])
    return a == b


@pytest.mark.parametrize("name", FINITE)
@pytest.mark.parametrize("kind", ["bool", "count", "forest", "first", "priority"])
def test_transparency_exhaustive(name, kind):
    t = tables_for(name, kind)
    max_len = 6 if kind == "forest" else 8
    if len(t.rtn.terminals) > 2:
        max_len = 5
    for tokens in all_inputs(t.rtn.terminals, max_len):
        base = parse(t, tokens).value
        for mode in ("trivial", "dominator"):
            assert same(kind, parse(t, tokens, memo=mode).value, base), (mode, tokens)


@pytest.mark.parametrize("name", ["G_DYCK", "G_PAL", "G_CAT"])
def test_transparency_random_long(name):
    t = tables_for(name, "count")
    rng = random.Random(11)
    alphabet = sorted(t.rtn.terminals)
    for i in range(40):
        n = rng.randint(9, 24)
        if i % 2:
            tokens = generate(grammar_for(name), n, seed=rng.randrange(10**6))
        else:
            tokens = [rng.choice(alphabet) for _ in range(n)]
        base = parse(t, tokens).value
        for mode in ("trivial", "dominator"):
            assert parse(t, tokens, memo=mode).value == base


def test_unknown_mode():
    with pytest.raises(ValueError):
        make_memo_parser(tables_for("G_A"), "bogus")
