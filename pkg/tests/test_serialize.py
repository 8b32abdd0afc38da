import json
from collections import Counter

import pytest

from relparse import parse
from relparse.semiring import enumerate_forest
from relparse.serialize import (TablesFormatError, load_tables, save_tables, tables_from_dict,
                                tables_to_dict)

from conftest import all_inputs, tables_for

PROBE = ["G_A", "G_AS", "G_SA", "G_CAT", "G_DYCK", "G_PAL"]


def norm(kind, v):
    return Counter(enumerate_forest(v)[0]) if kind == "forest" else v


@pytest.mark.parametrize("name", PROBE)
@pytest.mark.parametrize("kind", ["bool", "count", "forest", "first", "priority"])
def test_roundtrip_probe_suite(tmp_path, name, kind):
    t = tables_for(name, kind)
    path = tmp_path / "t.json"
    save_tables(t, path)
    again = load_tables(path)
    assert again.kind == kind
    for tokens in all_inputs(t.rtn.terminals, 5):
        assert norm(kind, parse(again, tokens).value) == norm(kind, parse(t, tokens).value)


def test_file_is_self_describing():
    data = tables_to_dict(tables_for("G_CAT", "count"))
    assert data["format"] == "relparse-tables" and data["version"] == 1
    assert data["semiring"] == "count"
    assert {"rtn", "analysis", "primitives", "closures"} <= set(data)
    json.dumps(data)


def test_rejects_other_versions():
    data = tables_to_dict(tables_for("G_A"))
    data["version"] = 2
    with pytest.raises(TablesFormatError):
        tables_from_dict(data)
    with pytest.raises(TablesFormatError):
        tables_from_dict({"format": "something else"})


def test_priority_list_survives(tmp_path):
    from relparse import build_tables
    from relparse.fixtures import FIXTURES
    t = build_tables(FIXTURES["G_CAT"], "priority", priorities=["S.0"])
    path = tmp_path / "p.json"
    save_tables(t, path)
    again = load_tables(path)
    assert again.priorities == ["S.0"]
    tokens = ["a"] * 4
    assert parse(again, tokens).value == parse(t, tokens).value
