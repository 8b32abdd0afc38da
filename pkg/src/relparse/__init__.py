"""Generalized context-free parsing by derivatives of configuration relations."""

from .engine import ParserTables, UnknownToken, build_tables, parse, recognize
from .grammar import GrammarError, EmptyLanguage, parse_grammar, grammar_to_rtn
from .semiring import StarRequired, UnsupportedGrammar, make_semiring

__all__ = [
    "ParserTables", "UnknownToken", "build_tables", "parse", "recognize",
    "GrammarError", "EmptyLanguage", "parse_grammar", "grammar_to_rtn",
    "StarRequired", "UnsupportedGrammar", "make_semiring",
]
