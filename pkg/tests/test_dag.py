import pytest

from relparse.closures import EPS_PRIM
from relparse.dag import Session, ZeroPrepend
from relparse.engine import Engine
from relparse.semiring import enumerate_forest

from conftest import tables_for


def session(name="G_A", kind="bool"):
    return Session(tables_for(name, kind))


def run(name, tokens, kind="bool"):
    eng = Engine(tables_for(name, kind))
    rel = eng.initial_relation()
    for a in tokens:
        rel = eng.phase_relation(rel, a)
    return eng, rel


def test_root():
    s = session()
    root = s.root()
    assert root.edges == ()
    assert s.epsilon(root) is True
    for st in range(s.table.n):
        assert s.derivative(root, st) is None


def test_prepend_atomic_and_initial_node():
    s = session()
    rtn = s.table.rtn
    one = s.prepend_atomic(s.table.init(rtn.stop), s.root())
    assert len(one.edges) == 1
    init = s.prepend_atomic(s.table.init(rtn.start), one)
    assert len(init.edges) == 1 and init.edges[0][2] is one
    assert s.epsilon(init) is False
    eng = Engine(tables_for("G_A"))
    assert eng.initial_relation() is eng.session.prepend_atomic(
        eng.session.table.init(rtn.start),
        eng.session.prepend_atomic(eng.session.table.init(rtn.stop), eng.session.root()))


def test_prepend_delta():
    s = session("G_CAT", "count")
    assert s.epsilon(s.prepend_delta(5, s.root())) == 5
    three = s.prepend_delta(3, s.root())
    assert s.epsilon(s.prepend_delta(2, three)) == 6
    with pytest.raises(ZeroPrepend):
        s.prepend_delta(0, three)


def test_prepend_unit_keeps_language():
    eng, rel = run("G_CAT", ["a", "a"], "count")
    s = eng.session
    assert s.language(s.prepend_delta(1, rel), 4) == s.language(rel, 4)


def test_hash_consing():
    s = session()
    rtn = s.table.rtn
    a = s.prepend_atomic(s.table.init(rtn.stop), s.root())
    b = s.prepend_atomic(s.table.init(rtn.stop), s.root())
    assert a is b
    before = s.node_count
    s.prepend_atomic(s.table.init(rtn.stop), s.root())
    assert s.node_count == before


def test_union():
    s = session("G_CAT", "count")
    rtn = s.table.rtn
    x = s.prepend_atomic(s.table.init(rtn.stop), s.root())
    y = s.prepend_atomic(s.table.init(rtn.start), s.root())
    assert s.union([x]) is x
    assert len(s.union([x, y]).edges) == 2
    z = s.prepend_delta(2, x)
    merged = s.union([x, z])
    assert len(merged.edges) == 1
    assert s.flatten(merged.edges[0][0]) == 3


def test_union_merge_counts_match_oracle():
    # after "a a" with G_CAT, completing by "a" has two parses; both go
    # through merged edges and are counted once each
    eng, rel = run("G_CAT", ["a", "a"], "count")
    rel = eng.phase_relation(rel, "a")
    assert eng.finish_relation(rel) == 2


def test_g_a_stop_derivative():
    eng, rel = run("G_A", ["a"])
    comp = eng.session.derivative(rel, eng.rtn.stop)
    assert comp is not None and eng.session.epsilon(comp) is True


def test_g_pal_rejects_ab():
    eng, rel = run("G_PAL", ["a", "b"])
    comp = eng.session.derivative(rel, eng.rtn.stop)
    assert comp is None or eng.session.epsilon(comp) is False


def test_epsilon_without_final():
    s = session()
    node = s.prepend_atomic(s.table.init(0), s.root())
    assert s.epsilon(node) is False
    assert s.epsilon(None) is False


def test_nested_prepend_flatten_order():
    s = session("G_A", "forest")
    sr = s.sr
    d1, d2 = sr.leaf(0), sr.leaf(1)
    lab = s.prepend_label(d1, EPS_PRIM, s.prepend_label(d2, EPS_PRIM, s.epsilon_label))
    assert enumerate_forest(s.flatten(lab))[0] == [(0, 1)]


def test_flatten_distributes_over_union():
    s = session("G_A", "forest")
    sr = s.sr
    a = s.value_label(sr.leaf(0))
    b = s.value_label(sr.leaf(1))
    u = s.union_label([a, b])
    assert sorted(enumerate_forest(s.flatten(u))[0]) == [(0,), (1,)]


@pytest.mark.parametrize("name, tokens", [
    ("G_CAT", "a a a a a"), ("G_DYCK", "( ( ) ( ) ) ( )"), ("G_PAL", "a b b a b b a"),
])
@pytest.mark.parametrize("kind", ["bool", "count", "forest"])
def test_audit(name, tokens, kind):
    eng, rel = run(name, tokens.split(), kind)
    s = eng.session
    assert s.audit(rel) == []
    assert s.audit_all() == []
    for x in s.reachable(rel):
        for _, _, t in x.edges:
            assert t.id < x.id
        # the per-node edge bound: prior nodes times atomic states per source
        assert len(x.edges) <= max(1, x.id) * (s.table.n + 1) * s.table.n


def test_flatten_work_is_linear_in_labels():
    # deferred labels: each label is combined once, so the total work over
    # a whole parse stays proportional to the label DAG
    eng, rel = run("G_CAT", ["a"] * 8, "forest")
    s = eng.session
    eng.finish_relation(rel)
    labels = s.label_count
    assert s.label_ops <= 4 * labels + 4 * s.edge_count


def test_dump_format():
    eng, rel = run("G_A", ["a"])
    text = eng.session.dump(rel)
    assert text.splitlines()[0].startswith("node#0: final=")
    assert "Init(stop)" in text or "Reach(" in text
