import random

import pytest
from hypothesis import given, strategies as st

from relparse.fixtures import FIXTURES, random_grammar
from relparse.grammar import (CALL, FINITE, NONREGULAR_INFINITE, REDUCE, REGULAR_INFINITE, ROOT_LABEL,
                              RTN, SHIFT, EmptyLanguage, GrammarError, classify_ambiguity,
                              compute_nullability, compute_productivity, grammar_to_rtn, optimize_rtn,
                              parse_grammar)
from relparse.oracle import earley_recognize, nullable_nonterminals

from conftest import all_inputs, grammar_for


def rtn_of(name):
    return grammar_to_rtn(grammar_for(name))


def state(rtn, name):
    return rtn.names.index(name)


def test_parse_simple():
    g = parse_grammar("start S; S : 'a' S | ;")
    assert g.start == "S"
    assert g.rules["S"] == [(("t", "a"), ("n", "S")), ()]
    assert g.terminals == {"a"}


def test_left_recursion_is_accepted():
    g = parse_grammar("start S; S : S 'a' | 'a';")
    assert g.rules["S"][0] == (("n", "S"), ("t", "a"))


def test_comments_and_layout():
    g = parse_grammar("# lead\nstart E;\nE : E '+' T   # sum\n  | T ;\nT : 'x' ;\n")
    assert g.labels() == ["E.0", "E.1", "T.0"]


@pytest.mark.parametrize("text, line, col, fragment", [
    ("start S; S : T;", 1, 14, "undeclared symbol T"),
    ("start S;\nS : 'a'", 2, 8, "end of input"),
    ("start S; S: 'a'; S: 'b';", 1, 18, "duplicate definition"),
    ("S : 'a';", None, None, "missing start"),
    ("start S;\n  S : 'a' ! ;", 2, 11, "unexpected"),
])
def test_grammar_errors(text, line, col, fragment):
    with pytest.raises(GrammarError) as info:
        parse_grammar(text)
    assert fragment in str(info.value)
    assert info.value.line == line
    assert info.value.col == col


def test_to_text_roundtrip():
    for text in FIXTURES.values():
        g = parse_grammar(text)
        again = parse_grammar(g.to_text())
        assert again.rules == g.rules and again.start == g.start


def test_g_a_rtn():
    rtn = rtn_of("G_A")
    assert rtn.names == ["start", "accept", "S.0@0", "S.0@1", "stop"]
    got = {(d.kind, rtn.names[d.source], d.arg if d.kind != CALL else rtn.names[d.arg],
            None if d.target is None else rtn.names[d.target]) for d in rtn.transitions}
    assert got == {
        (CALL, "start", "S.0@0", "accept"),
        (SHIFT, "S.0@0", "a", "S.0@1"),
        (REDUCE, "S.0@1", "S.0", None),
        (REDUCE, "accept", ROOT_LABEL, None),
    }
    assert not rtn.out[rtn.stop]


def test_empty_alternative_is_one_state():
    rtn = rtn_of("G_AS")
    eps_state = state(rtn, "S.1@0")
    assert [d.kind for d in rtn.out[eps_state]] == [REDUCE]


def test_state_count_formula():
    rng = random.Random(5)
    for _ in range(10):
        g = random_grammar(rng)
        n_alts = sum(len(a) for a in g.rules.values())
        m_syms = sum(len(alt) for alts in g.rules.values() for alt in alts)
        assert grammar_to_rtn(g).num_states == m_syms + n_alts + 3


def test_shift_index_partitions_transitions():
    rtn = rtn_of("G_PAL")
    shifts = [d for lst in rtn.shifts.values() for d in lst]
    assert sorted(d.id for d in shifts + rtn.nonshift) == list(range(len(rtn.transitions)))
    for a, lst in rtn.shifts.items():
        assert all(d.kind == SHIFT and d.arg == a for d in lst)


def test_nullability_examples():
    as_ = rtn_of("G_AS")
    assert state(as_, "S.0@0") not in compute_nullability(as_)
    assert state(as_, "S.1@0") in compute_nullability(as_)
    assert state(as_, "S.0@1") in compute_nullability(as_)   # S is nullable
    sa = rtn_of("G_SA")
    sa_null = compute_nullability(sa)
    # every alternative of G_SA contains a terminal
    assert not any(sa.names[s].endswith("@0") and s in sa_null for s in range(sa.num_states))
    dyck = rtn_of("G_DYCK")
    assert state(dyck, "S.1@0") in compute_nullability(dyck)
    for name in FIXTURES:
        rtn = rtn_of(name)
        assert rtn.stop not in compute_nullability(rtn)


def test_productivity_removes_dead_rules():
    rtn = compute_productivity(grammar_to_rtn(parse_grammar("start S; S:'a'|T; T: T 'b';")))
    assert not any(n.startswith("T.") for n in rtn.names)
    assert "S.0@0" in rtn.names
    assert earley_recognize(parse_grammar("start S; S:'a';"), ["a"])


def test_productivity_keeps_cat():
    rtn = rtn_of("G_CAT")
    assert compute_productivity(rtn).names == rtn.names


def test_empty_language():
    with pytest.raises(EmptyLanguage):
        compute_productivity(grammar_to_rtn(parse_grammar("start S; S: S;")))


@pytest.mark.parametrize("name, cls", [
    ("G_A", FINITE), ("G_AS", FINITE), ("G_SA", FINITE), ("G_CAT", FINITE), ("G_DYCK", FINITE),
    ("G_PAL", FINITE), ("G_INF", NONREGULAR_INFINITE), ("G_RINF", REGULAR_INFINITE),
])
def test_classification(name, cls):
    rtn = rtn_of(name)
    an = classify_ambiguity(rtn, compute_nullability(rtn))
    assert an.ambiguity_class == cls
    assert bool(an.witness) == (cls != FINITE)


def test_rtn_dict_roundtrip():
    rtn = rtn_of("G_DYCK")
    again = RTN.from_dict(rtn.to_dict())
    assert again.transitions == rtn.transitions and again.names == rtn.names


def test_optimize_merges_identical_states():
    # the two 'b' tails end in identical states except for their reduce labels,
    # while the two continuation states after X are truly identical
    g = parse_grammar("start S; S: X 'b' | 'c' X; X: 'a';")
    rtn = compute_productivity(grammar_to_rtn(g))
    tiny = RTN(["start", "accept", "p", "q", "r", "stop"], 0, 1, 5,
               [(None, CALL, 0, 2, 1), (None, REDUCE, 1, ROOT_LABEL, None),
                (None, SHIFT, 2, "a", 3), (None, SHIFT, 2, "b", 4),
                (None, REDUCE, 3, "S.0", None), (None, REDUCE, 4, "S.0", None)],
               ["a", "b"], ["S.0", ROOT_LABEL])
    small = optimize_rtn(tiny)
    assert small.num_states == tiny.num_states - 1
    assert optimize_rtn(rtn).num_states <= rtn.num_states


def test_optimize_keeps_g_a():
    rtn = rtn_of("G_A")
    assert optimize_rtn(rtn) is rtn


@given(st.integers(0, 10_000))
def test_nullability_matches_oracle(seed):
    g = random_grammar(random.Random(seed))
    rtn = grammar_to_rtn(g)
    null_states = compute_nullability(rtn)
    oracle = nullable_nonterminals(g)
    for nt, i, alt in g.alternatives():
        first = rtn.names.index(f"{nt}.{i}@0")
        # an alternative's first state is nullable iff every symbol is
        expect = all(k == "n" and s in oracle for k, s in alt)
        assert (first in null_states) == expect


@given(st.integers(0, 10_000))
def test_optimize_preserves_recognition(seed):
    from relparse import build_tables, parse
    rng = random.Random(seed)
    g = random_grammar(rng)
    try:
        plain = build_tables(g, "bool")
        opt = build_tables(g, "bool", optimize=True)
    except Exception as exc:  # empty languages and unsupported classes
        assert type(exc).__name__ in ("EmptyLanguage", "UnsupportedGrammar")
        return
    for tokens in all_inputs(plain.rtn.terminals, 4):
        want = earley_recognize(g, tokens)
        assert parse(plain, tokens).accepted == want
        assert parse(opt, tokens).accepted == want
