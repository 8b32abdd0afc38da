"""Versioned JSON file format for generated parser tables."""

from __future__ import annotations

import json

from .closures import ClosureTable
from .engine import ParserTables
from .grammar import RTN, StateAnalysis
from .semiring import PrimitiveTable, make_semiring

FORMAT = "relparse-tables"
VERSION = 1


class TablesFormatError(Exception):
    pass


def tables_to_dict(tables: ParserTables) -> dict:
    sr = tables.sr
    p = tables.prims
    return {
        "format": FORMAT,
        "version": VERSION,
        "semiring": tables.kind,
        "priorities": tables.priorities,
        "rtn": tables.rtn.to_dict(),
        "analysis": tables.analysis.to_dict(),
        "primitives": {
            "null": [sr.dump(v) for v in p.null],
            "reach": [{str(t): sr.dump(v) for t, v in row.items()} for row in p.reach],
            "call_into": [[[u, tp, sr.dump(v)] for u, tp, v in row] for row in p.call_into],
        },
        "closures": tables.closures.to_dict(),
    }


def tables_from_dict(data: dict) -> ParserTables:
    if data.get("format") != FORMAT:
        raise TablesFormatError("not a tables file")
    if data.get("version") != VERSION:
        raise TablesFormatError(f"tables version {data.get('version')} is not supported (expected {VERSION})")
    rtn = RTN.from_dict(data["rtn"])
    analysis = StateAnalysis.from_dict(data["analysis"])
    sr = make_semiring(data["semiring"], rtn, data.get("priorities", []))
    raw = data["primitives"]
    prims = PrimitiveTable(
        null=[sr.load(v) for v in raw["null"]],
        reach=[{int(t): sr.load(v) for t, v in row.items()} for row in raw["reach"]],
        call_into=[[(u, tp, sr.load(v)) for u, tp, v in row] for row in raw["call_into"]],
        val=[sr.val(d) for d in rtn.transitions],
    )
    closures = ClosureTable.from_dict(rtn, prims, sr, data["closures"])
    return ParserTables(rtn, analysis, sr, prims, closures, data["semiring"], list(data.get("priorities", [])))


def save_tables(tables: ParserTables, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(tables_to_dict(tables), fh)


def load_tables(path) -> ParserTables:
    with open(path, encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise TablesFormatError(f"unreadable tables file: {exc}") from exc
    return tables_from_dict(data)
