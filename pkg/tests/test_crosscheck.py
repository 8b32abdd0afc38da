from relparse.crosscheck import exhaustive, randomized, shrink
from relparse.serialize import tables_from_dict, tables_to_dict

from conftest import grammar_for, tables_for


def corrupted(name):
    data = tables_to_dict(tables_for(name))
    # forget that anything can be nulled
    data["primitives"]["null"] = [False for _ in data["primitives"]["null"]]
    return tables_from_dict(data)


def test_pal_exhaustive_clean():
    rep = exhaustive(tables_for("G_PAL"), grammar_for("G_PAL"), 8)
    assert rep.ok and rep.inputs > 100 and not rep.audit


def test_count_mode_compares_tree_counts():
    rep = exhaustive(tables_for("G_CAT", "count"), grammar_for("G_CAT"), 8)
    assert rep.ok and rep.inputs == 9


def test_randomized_clean():
    rep = randomized(tables_for("G_DYCK"), grammar_for("G_DYCK"), 60, 9, 20, seed=2)
    assert rep.ok and rep.inputs == 60


def test_corrupted_tables_are_caught_and_shrunk():
    bad = corrupted("G_PAL")
    g = grammar_for("G_PAL")
    rep = exhaustive(bad, g, 6)
    assert not rep.ok
    worst = max(rep.mismatches, key=lambda m: len(m.tokens))
    small = shrink(bad, g, worst.tokens)
    assert len(small) <= len(worst.tokens)
    assert small == ()  # the empty palindrome is already misjudged
