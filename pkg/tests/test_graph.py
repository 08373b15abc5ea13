import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exrec.errors import EmptyGraph, LayerViolation, MalformedLine, UnknownNode, WrongKind
from exrec.graph import (
    Kind,
    NodeId,
    TripartiteGraph,
    exercises_of_pivot,
    incident_pivots,
    kcs_of_exercise,
    load_graph,
)

from conftest import FIXTURES


def write(tmp_path, *lines):
    path = tmp_path / "g.tsv"
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def test_load_counts(tmp_path):
    g = load_graph(write(tmp_path, "E1\tk1\tq1", "E1\tk1\tq2", "E2\tq1\tm1"))
    assert (len(g.kcs), len(g.exercises), len(g.materials)) == (1, 2, 1)
    assert (len(g.e1_edges), len(g.e2_edges)) == (2, 1)
    assert g.duplicate_edges == 0


def test_duplicates_collapse(tmp_path):
    g = load_graph(write(tmp_path, "E1\tk1\tq1", "E1\tk1\tq1"))
    assert len(g.e1_edges) == 1
    assert g.duplicate_edges == 1


@pytest.mark.parametrize("line", ["E3\ta\tb", "E1\tk1", "E1\tk1\tq1\textra", "NODE\tFOO\tx", "E1\t\tq1"])
def test_malformed(tmp_path, line):
    with pytest.raises(MalformedLine):
        load_graph(write(tmp_path, "E1\tk0\tq0", line))


def test_layer_violation(tmp_path):
    # q1 is an exercise in the first line and a KC in the second.
    with pytest.raises(LayerViolation):
        load_graph(write(tmp_path, "E1\tk1\tq1", "E1\tq1\tq2"))
    with pytest.raises(LayerViolation):
        load_graph(write(tmp_path, "NODE\tMAT\tq1", "E1\tk1\tq1"))


def test_empty_graph(tmp_path):
    with pytest.raises(EmptyGraph):
        load_graph(write(tmp_path, "# nothing", "", "NODE\tKC\tk1"))


def test_comments_blank_and_crlf(tmp_path):
    path = tmp_path / "g.tsv"
    path.write_bytes(b"# c\r\n\r\nE1\tk1\tq1\r\nNODE\tEX\tq9\r\n")
    g = load_graph(path)
    assert g.exercises == {"q1", "q9"}


def test_g0_neighbours(g0):
    assert incident_pivots(g0, "q1") == [NodeId(Kind.KC, "k1"), NodeId(Kind.MATERIAL, "m1")]
    assert [str(p) for p in incident_pivots(g0, "q3")] == ["k1"]
    assert exercises_of_pivot(g0, "k1") == ["q1", "q2", "q3"]
    assert exercises_of_pivot(g0, NodeId(Kind.MATERIAL, "m1")) == ["q1", "q2"]
    assert kcs_of_exercise(g0, "q1") == ["k1"]
    with pytest.raises(WrongKind):
        exercises_of_pivot(g0, "q1")
    with pytest.raises(UnknownNode):
        incident_pivots(g0, "nope")
    with pytest.raises(UnknownNode):
        kcs_of_exercise(g0, "k1")


def test_isolated_and_material_only(tmp_path):
    g = load_graph(write(tmp_path, "E1\tk1\tq1", "E1\tk2\tq1", "E2\tq2\tm1", "NODE\tEX\tq9"))
    assert incident_pivots(g, "q9") == []
    assert kcs_of_exercise(g, "q1") == ["k1", "k2"]
    assert kcs_of_exercise(g, "q2") == []


def test_load_twice_equal():
    assert load_graph(FIXTURES / "random40.tsv") == load_graph(FIXTURES / "random40.tsv")


def test_without_pivots(g0):
    view = g0.without_pivots(["m1"])
    assert [str(p) for p in incident_pivots(view, "q1")] == ["k1"]
    assert [str(p) for p in incident_pivots(g0, "q1")] == ["k1", "m1"]
    with pytest.raises(WrongKind):
        g0.without_pivots(["q1"])


ids = st.sampled_from([f"n{i}" for i in range(6)])
edges = st.lists(st.tuples(ids, ids), max_size=25)


@settings(max_examples=200, deadline=None)
@given(edges, edges)
def test_structure_properties(raw1, raw2):
    e1 = [("K" + k, "Q" + q) for k, q in raw1]
    e2 = [("Q" + q, "M" + m) for q, m in raw2]
    if not e1 and not e2:
        return
    g = TripartiteGraph(e1, e2)
    for k, q in g.e1_edges:
        assert k in g.kcs and q in g.exercises
    for q, m in g.e2_edges:
        assert q in g.exercises and m in g.materials
    assert g.duplicate_edges == len(e1) - len(set(e1)) + len(e2) - len(set(e2))
    for q in g.exercises:
        kcs = kcs_of_exercise(g, q)
        assert kcs == sorted(kcs) == kcs_of_exercise(g, q)
        for k in g.kcs:
            assert (q in exercises_of_pivot(g, k)) == (k in kcs)
        pivots = [p.id for p in incident_pivots(g, q)]
        mats = [p for p in pivots if p.startswith("M")]
        assert pivots == kcs + sorted(mats)
        for m in g.materials:
            assert (q in exercises_of_pivot(g, m)) == (m in mats)
