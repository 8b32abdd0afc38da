"""Synthetic token streams by seeded stochastic derivation."""

from __future__ import annotations

import random

from .grammar import Grammar


def min_yields(g: Grammar):
    """Shortest terminal yield per nonterminal (None if it derives nothing)."""
    return {nt: None if k is None else k[0] for nt, k in _min_keys(g).items()}


def _alt_key(alt, keys):
    cost, height = 0, 0
    for kind, sym in alt:
        if kind == "t":
            cost += 1
        elif keys[sym] is None:
            return None
        else:
            cost += keys[sym][0]
            height = max(height, keys[sym][1])
    return (cost, height + 1)


def _min_keys(g: Grammar):
    # (shortest yield, height of the derivation achieving it); following the
    # minimal alternative strictly lowers the height, so it always terminates
    best = {nt: None for nt in g.rules}
    changed = True
    while changed:
        changed = False
        for nt, alts in g.rules.items():
            for alt in alts:
                k = _alt_key(alt, best)
                if k is not None and (best[nt] is None or k < best[nt]):
                    best[nt] = k
                    changed = True
    return best


def generate(g: Grammar, tokens: int, seed: int = 0, max_depth: int = 12, grow: float = 0.75):
    """One sentence of ``g`` with at least ``tokens`` tokens (when the language allows).

    Leftmost expansion.  While the budget is not met and the depth bound is
    not hit, alternatives that keep growing are preferred with probability
    ``grow``; otherwise the cheapest alternative closes the branch.
    """
    rng = random.Random(seed)
    keys = _min_keys(g)
    if keys[g.start] is None:
        raise ValueError("start symbol derives no sentence")
    ylds = {nt: k[0] for nt, k in keys.items() if k is not None}
    akeys = {nt: [_alt_key(a, keys) for a in alts] for nt, alts in g.rules.items()}
    idle_limit = 4 * len(g.rules) + 8
    out = []
    stack = [(("n", g.start), 0)]
    pending = ylds[g.start]  # minimal yield still owed by the stack
    idle = 0  # expansions since the last emitted token
    open_nts = 1  # nonterminals still on the stack
    while stack:
        (kind, sym), depth = stack.pop()
        if kind == "t":
            out.append(sym)
            pending -= 1
            idle = 0
            continue
        idle += 1
        open_nts -= 1
        pending -= ylds[sym]
        alts = g.rules[sym]
        viable = [i for i, k in enumerate(akeys[sym]) if k is not None]
        cheapest = min(viable, key=lambda i: (akeys[sym][i], i))
        if depth >= max_depth or idle > idle_limit or len(out) + pending + ylds[sym] >= tokens:
            choice = cheapest
        else:
            growing = [i for i in viable if any(k == "n" for k, _ in alts[i])]
            # if no other nonterminal is left, only growing can meet the budget
            if growing and (not open_nts or rng.random() < grow):
                choice = rng.choice(growing)
            else:
                choice = rng.choice(viable)
        pending += akeys[sym][choice][0]
        # the last symbol is in tail position and does not nest deeper
        chosen = alts[choice]
        open_nts += sum(1 for k, _ in chosen if k == "n")
        for i in range(len(chosen) - 1, -1, -1):
            stack.append((chosen[i], depth if i == len(chosen) - 1 else depth + 1))
    return out
