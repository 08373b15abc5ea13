import pytest

from exrec.errors import DuplicateKc, EmptyFile, SyllabusError, UnknownCutoff
from exrec.graph import TripartiteGraph
from exrec.scope import Progress, SyllabusOrder, load_syllabus, restrict, write_syllabus
from exrec.walker import CandidateList


@pytest.fixture
def setup():
    graph = TripartiteGraph(
        [("k1", "a"), ("k1", "b"), ("k3", "b"), ("k9", "d")],
        [("c", "m1"), ("a", "m1")],
    )
    syllabus = SyllabusOrder.from_sequence(["k1", "k2", "k3"])
    pool = CandidateList((("a", 9), ("b", 8), ("c", 7), ("d", 6)))
    return graph, syllabus, pool


def test_load_syllabus(tmp_path):
    path = tmp_path / "s.txt"
    write_syllabus(path, ["k1", "k2", "k3"])
    assert load_syllabus(path).ranks == {"k1": 0, "k2": 1, "k3": 2}
    path.write_text("k1\nk1\n")
    with pytest.raises(DuplicateKc):
        load_syllabus(path)
    path.write_text("# only\n\n")
    with pytest.raises(EmptyFile):
        load_syllabus(path)


def test_bad_ranks():
    with pytest.raises(SyllabusError):
        SyllabusOrder({"k1": 0, "k2": 2})


def test_restrict_examples(setup):
    graph, syllabus, pool = setup
    out = restrict(pool, graph, syllabus, Progress("k2"))
    assert out.ids == ["a"] and out.stage == "after_sr"
    assert (out.tallies["sr_out_of_scope"], out.tallies["sr_no_kc"], out.tallies["sr_unknown_kc"]) == (1, 1, 1)
    assert restrict(pool, graph, syllabus, "k3").ids == ["a", "b"]


def test_unknown_cutoff(setup):
    graph, syllabus, pool = setup
    with pytest.raises(UnknownCutoff):
        restrict(pool, graph, syllabus, Progress("k7"))


def test_last_cutoff_drops_only_no_kc(setup):
    graph, _, pool = setup
    syllabus = SyllabusOrder.from_sequence(["k1", "k2", "k3", "k9"])
    out = restrict(pool, graph, syllabus, "k9")
    assert out.ids == ["a", "b", "d"]
    assert out.tallies["sr_no_kc"] == 1
