import functools
import itertools

import pytest
from hypothesis import settings

from relparse import build_tables
from relparse.fixtures import FIXTURES
from relparse.grammar import parse_grammar

settings.register_profile("repo", deadline=None, max_examples=60)
settings.load_profile("repo")


@functools.lru_cache(maxsize=None)
def tables_for(name, kind="bool"):
    return build_tables(FIXTURES[name], kind)


@functools.lru_cache(maxsize=None)
def grammar_for(name):
    return parse_grammar(FIXTURES[name])


def all_inputs(alphabet, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(sorted(alphabet), repeat=n)


@pytest.fixture
def tables():
    return tables_for


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
