import random

from hypothesis import given, strategies as st

from relparse.corpus import generate, min_yields
from relparse.fixtures import FIXTURES, random_grammar
from relparse.grammar import parse_grammar
from relparse.oracle import earley_recognize

from conftest import grammar_for


def test_min_yields():
    assert min_yields(grammar_for("G_CAT")) == {"S": 1}
    assert min_yields(grammar_for("G_DYCK")) == {"S": 0}
    assert min_yields(parse_grammar("start S; S: S;")) == {"S": None}


def test_dyck_stream_is_long_and_valid():
    g = grammar_for("G_DYCK")
    tokens = generate(g, 5000, seed=4)
    assert len(tokens) >= 5000
    depth = 0
    for tok in tokens:
        depth += 1 if tok == "(" else -1
        assert depth >= 0
    assert depth == 0
    assert earley_recognize(g, generate(g, 300, seed=4))


def test_seeded():
    g = grammar_for("G_PAL")
    assert generate(g, 50, seed=9) == generate(g, 50, seed=9)


def test_unit_cycles_terminate():
    g = parse_grammar("start S; S: S | A 'x'; A: A | ;")
    assert generate(g, 20, seed=1)[-1] == "x"


@given(st.integers(0, 10_000), st.integers(0, 30))
def test_generated_sentences_are_in_language(seed, n):
    g = random_grammar(random.Random(seed))
    if min_yields(g)[g.start] is None:
        return
    tokens = generate(g, n, seed=seed, max_depth=6)
    assert earley_recognize(g, tokens)


def test_fixture_sentences():
    for name in ("G_A", "G_AS", "G_SA", "G_CAT", "G_DYCK", "G_PAL"):
        g = parse_grammar(FIXTURES[name])
        for seed in range(5):
            assert earley_recognize(g, generate(g, 12, seed=seed))
