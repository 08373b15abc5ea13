from fractions import Fraction
from pathlib import Path

import pytest

from exrec.diversity import BuiltinEmbeddings, load_corpus
from exrec.evaluation.harness import load_cases
from exrec.evaluation.synth import SynthConfig, synth_dataset
from exrec.graph import load_graph
from exrec.pipeline import Stores
from exrec.scope import load_syllabus

FIXTURES = Path(__file__).parent / "fixtures"

# (fixture file, query set) pairs used by the oracle checks.
ORACLE_FIXTURES = [
    ("g0.tsv", ("q1",)),
    ("chain.tsv", ("e00", "e06")),
    ("random40.tsv", ("x03", "x17", "x38")),
]


def one_step_law(e1, e2, current):
    """Exact one-step law by enumerating the edge sets with rationals."""
    incident = [("kc", k) for k, q in e1 if q == current] + [("mat", m) for q, m in e2 if q == current]
    law = {}
    for kind, p in incident:
        if kind == "kc":
            targets = [q for k, q in e1 if k == p]
        else:
            targets = [q for q, m in e2 if m == p]
        for t in targets:
            law[t] = law.get(t, 0) + Fraction(1, len(incident)) / len(targets)
    return law


@pytest.fixture(scope="session")
def g0():
    return load_graph(FIXTURES / "g0.tsv")


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """A few dozen cases; enough for pipeline and CLI checks."""
    cfg = SynthConfig(
        kc_count=40, exercise_count=400, material_count=40,
        exercises_per_material=8, near_duplicate_fraction=0.2,
        out_of_scope_distractor_fraction=0.2, seed=3,
    )
    out = tmp_path_factory.mktemp("small")
    paths = synth_dataset(cfg).write(out)
    return paths


@pytest.fixture(scope="session")
def small_stores(small_dataset):
    graph = load_graph(small_dataset["graph"])
    corpus = load_corpus(small_dataset["corpus"])
    return Stores(graph, BuiltinEmbeddings(corpus), load_syllabus(small_dataset["syllabus"]), corpus)


@pytest.fixture(scope="session")
def small_cases(small_dataset, small_stores):
    return load_cases(small_dataset["cases"], small_stores.graph)


# Acceptance checks append (criterion, passed, detail) here; printed at the end of the run.
ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")
