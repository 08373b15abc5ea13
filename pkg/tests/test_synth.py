import filecmp

import pytest

from exrec.diversity import tokenize
from exrec.errors import InfeasibleConfig
from exrec.evaluation import SynthConfig, synth_dataset
from exrec.graph import load_graph
from exrec.scope import load_syllabus

SMALL = dict(kc_count=24, exercise_count=240, material_count=24, exercises_per_material=8)


def test_byte_identical(tmp_path):
    cfg = SynthConfig(**SMALL, seed=11)
    a = synth_dataset(cfg).write(tmp_path / "a")
    b = synth_dataset(cfg).write(tmp_path / "b")
    assert set(a) == {"graph", "corpus", "embeddings", "syllabus", "cases"}
    for key in a:
        assert filecmp.cmp(a[key], b[key], shallow=False), key
    c = synth_dataset(SynthConfig(**SMALL, seed=12)).write(tmp_path / "c")
    assert not filecmp.cmp(a["corpus"], c["corpus"], shallow=False)


def test_no_near_duplicates():
    ds = synth_dataset(SynthConfig(**SMALL, near_duplicate_fraction=0.0))
    streams = [tuple(tokenize(t)) for t in ds.corpus.values()]
    assert len(set(streams)) == len(streams)
    assert ds.near_duplicates == {}


def test_near_duplicates_differ_by_one_token():
    ds = synth_dataset(SynthConfig(**SMALL, near_duplicate_fraction=0.3))
    assert len(ds.near_duplicates) == round(0.3 * (240 - len(ds.distractors)))
    for q, src in ds.near_duplicates.items():
        a, b = tokenize(ds.corpus[q]), tokenize(ds.corpus[src])
        assert len(a) == len(b) and sum(x != y for x, y in zip(a, b)) == 1


def test_structure(tmp_path):
    ds = synth_dataset(SynthConfig(**SMALL, out_of_scope_distractor_fraction=0.2))
    paths = ds.write(tmp_path)
    graph = load_graph(paths["graph"])
    syllabus = load_syllabus(paths["syllabus"])
    assert len(graph.exercises) == 240 and len(graph.materials) == 24 and len(graph.kcs) == 24
    assert len(ds.distractors) == 48
    for case in ds.cases:
        cutoff = syllabus.rank(case.progress_kc)
        members = [q for q, m in ds.e2 if m == case.material]
        assert len(members) == 8 and set(case.query) <= set(members)
        # Ground truth always fits the case's progress.
        for q in members:
            assert max(syllabus.rank(k) for k, x in ds.e1 if x == q) <= cutoff
        # Distractors are in no case's ground truth.
        assert not ds.distractors & set(members)
    late = {k for k in ds.kcs if syllabus.rank(k) >= 18}
    for q in ds.distractors:
        assert late & {k for k, x in ds.e1 if x == q}


@pytest.mark.parametrize("kw", [
    dict(exercises_per_material=10, exercise_count=5),
    dict(queries_per_case=12),
    dict(near_duplicate_fraction=1.0),
    dict(kc_count=1),
    dict(kc_count=4, exercise_count=20, material_count=20, exercises_per_material=8),
])
def test_infeasible(kw):
    with pytest.raises(InfeasibleConfig):
        synth_dataset(SynthConfig(**{**SMALL, **kw}))


def test_no_distractors_sr_changes_nothing():
    from exrec.diversity import BuiltinEmbeddings
    from exrec.evaluation import evaluate_ablations, make_case
    from exrec.graph import TripartiteGraph
    from exrec.pipeline import PipelineConfig, Stores
    from exrec.scope import SyllabusOrder
    from exrec.walker import WalkConfig

    ds = synth_dataset(SynthConfig(**SMALL, out_of_scope_distractor_fraction=0.0, near_duplicate_fraction=0.2))
    graph = TripartiteGraph(ds.e1, ds.e2, kcs=ds.kcs)
    stores = Stores(graph, BuiltinEmbeddings(ds.corpus), SyllabusOrder.from_sequence(ds.kcs), ds.corpus)
    cases = [make_case(graph, c.material, c.material, c.progress_kc, c.query) for c in ds.cases]
    base = PipelineConfig(WalkConfig(total_steps=20_000, pool_size=100), top_n=100)
    tg, sr = evaluate_ablations(stores, cases, [base.with_modules("tg"), base.with_modules("tg,sr")])
    assert tg.metrics() == sr.metrics()
