"""Named test grammars and a seeded random grammar generator."""

from __future__ import annotations

import random

from .grammar import Grammar

FIXTURES = {
    "G_A": "start S; S:'a';",
    "G_AS": "start S; S:'a' S|;",
    "G_SA": "start S; S:S 'a'|'a';",
    "G_CAT": "start S; S:S S|'a';",
    "G_DYCK": "start S; S:'(' S ')' S|;",
    "G_PAL": "start S; S:'a' S 'a'|'b' S 'b'|'a'|'b'|;",
    "G_INF": "start S; S:A S A|'a'; A:;",
    "G_RINF": "start S; S:S A|'a'; A:;",
}

# grammars every semiring accepts
FINITE_FIXTURES = ("G_A", "G_AS", "G_SA", "G_CAT", "G_DYCK", "G_PAL")


def random_grammar(rng: random.Random, max_nts=6, max_alts=3, max_syms=4, max_terms=3) -> Grammar:
    """Random grammar within the given size bounds.

    Nonterminal ``N0`` is the start symbol; the language may be empty and
    the grammar may have unreachable rules.  Callers filter as needed.
    """
    n_nt = rng.randint(1, max_nts)
    n_t = rng.randint(1, max_terms)
    nts = [f"N{i}" for i in range(n_nt)]
    terms = "abc"[:n_t]
    rules = {}
    for nt in nts:
        alts = []
        for _ in range(rng.randint(1, max_alts)):
            alt = []
            for _ in range(rng.randint(0, max_syms)):
                if rng.random() < 0.5:
                    alt.append(("t", rng.choice(terms)))
                else:
                    alt.append(("n", rng.choice(nts)))
            alts.append(tuple(alt))
        rules[nt] = alts
    used = {sym for alts in rules.values() for alt in alts for k, sym in alt if k == "t"}
    return Grammar("N0", rules, used or {terms[0]})
