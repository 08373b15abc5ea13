"""Offline evaluation: recall@N (macro and micro) and pooled Distinct-2."""

from __future__ import annotations

import dataclasses
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

from exrec.diversity import distinct_2, tokenize
from exrec.errors import CaseError, EmptyCaseList, EmptyGroundTruth, ExrecError, InvalidConfig, MalformedRecord
from exrec.evaluation.metrics import aggregate_recall
from exrec.graph import Kind, TripartiteGraph, exercises_of_pivot
from exrec.pipeline import (
    PipelineConfig,
    RecommendationResponse,
    Stores,
    filter_candidates,
    parse_case_record,
    walk_counts,
)
from exrec.rng import derive_seed
from exrec.scope import Progress
from exrec.walker import QuerySet

DEFAULT_NS = (10, 25, 100)


@dataclass(frozen=True)
class EvalCase:
    case_id: str
    material: str
    query: QuerySet
    progress: Progress
    ground_truth: frozenset[str]

    @property
    def target(self) -> frozenset[str]:
        """Ground truth without the query exercises, which are never recommended."""
        return self.ground_truth - set(self.query.exercises)


@dataclass
class EvalReport:
    ns: tuple[int, ...]
    macro_recall: dict[int, float]
    micro_recall: dict[int, float]
    distinct2: float
    modules: str
    case_count: int
    warnings: list[str] = field(default_factory=list)
    distinct2_pooling: str = "micro"

    def lines(self) -> list[str]:
        out = [f"ablation\t{self.modules}"]
        for n in self.ns:
            out.append(f"macro_recall@{n}\t{self.macro_recall[n]:.4f}")
            out.append(f"micro_recall@{n}\t{self.micro_recall[n]:.4f}")
        out.append(f"distinct2\t{self.distinct2:.4f}")
        return out

    def metrics(self) -> tuple:
        """Everything except the module label, for comparing ablations."""
        return (self.ns, self.macro_recall, self.micro_recall, self.distinct2, self.case_count)


def make_case(graph: TripartiteGraph, case_id: str, material: str, progress: str,
              query: Sequence[str]) -> EvalCase:
    if graph.kind_of(material) is not Kind.MATERIAL:
        raise MalformedRecord(f"{material!r} is not a material")
    truth = frozenset(exercises_of_pivot(graph, material))
    case = EvalCase(case_id, material, QuerySet(query), Progress(progress), truth)
    for q in case.query:
        graph.exercise_idx(q)
    if not case.target:
        raise EmptyGroundTruth(f"case {case_id}: no ground truth left after removing the query")
    return case


def load_cases(path: str | os.PathLike, graph: TripartiteGraph) -> list[EvalCase]:
    cases = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip() or line.startswith("#"):
                continue
            try:
                material, progress, query = parse_case_record(line)
                cases.append(make_case(graph, material, material, progress, query))
            except ExrecError as exc:
                raise MalformedRecord(f"line {lineno}: {exc}") from exc
    return cases


def evaluate(
    stores: Stores,
    cases: Sequence[EvalCase],
    config: PipelineConfig,
    ns: Sequence[int] = DEFAULT_NS,
    workers: int = 1,
    holdout: bool = True,
) -> EvalReport:
    """Run the pipeline once per case at the largest N and score every N.

    Case ``i`` walks with seed ``derive_seed(config.walk.seed, i)``. With
    ``holdout`` the case's own material is hidden from the walker, so its
    exercises have to be found through KCs and other materials.
    """
    return evaluate_ablations(stores, cases, [config], ns, workers, holdout)[0]


def evaluate_ablations(
    stores: Stores,
    cases: Sequence[EvalCase],
    configs: Sequence[PipelineConfig],
    ns: Sequence[int] = DEFAULT_NS,
    workers: int = 1,
    holdout: bool = True,
) -> list[EvalReport]:
    """Evaluate several module toggles that share one walk configuration.

    The walks do not depend on DP or SR, so each case is walked once and
    every ablation filters the same visit counts.
    """
    ns = tuple(sorted(set(ns)))
    if not ns or ns[0] < 1:
        raise InvalidConfig(f"every N must be >= 1, got {ns}")
    if not cases:
        raise EmptyCaseList("no evaluation cases")
    if not configs:
        raise InvalidConfig("no pipeline configuration given")
    walk = configs[0].walk
    if any(c.walk != walk for c in configs):
        raise InvalidConfig("ablations must share the walk configuration")
    top = ns[-1]
    if walk.pool_size < top:
        raise InvalidConfig(f"pool_size ({walk.pool_size}) must be >= max N ({top})")
    for config in configs:
        stores.check(config)
    if stores.corpus is None:
        raise InvalidConfig("evaluation needs a corpus for Distinct-2")

    def run(i: int) -> list[RecommendationResponse]:
        case = cases[i]
        try:
            walk_stores = stores
            if holdout:
                walk_stores = dataclasses.replace(
                    stores, graph=stores.graph.without_pivots([case.material])
                )
            counter = walk_counts(case.query, walk_stores, configs[0], derive_seed(walk.seed, i))
            return [
                filter_candidates(counter, case.query, case.progress, top, stores, c, case.case_id)
                for c in configs
            ]
        except ExrecError as exc:
            raise CaseError(case.case_id, exc) from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_case = list(pool.map(run, range(len(cases))))
    else:
        per_case = [run(i) for i in range(len(cases))]

    reports = []
    for a, config in enumerate(configs):
        responses = [row[a] for row in per_case]
        macro, micro = {}, {}
        for n in ns:
            pairs = []
            for case, resp in zip(cases, responses):
                target = case.target
                pairs.append((len(target.intersection(resp.ids[:n])), len(target)))
            macro[n], micro[n] = aggregate_recall(pairs)
        texts = [tokenize(stores.corpus.get(e, "")) for resp in responses for e in resp.ids]
        warnings = [f"{r.request_id}: {w}" for r in responses for w in r.warnings]
        reports.append(
            EvalReport(ns, macro, micro, distinct_2(texts), config.label, len(cases), warnings)
        )
    return reports


def random_baseline_recall(n: int, exercise_count: int) -> float:
    """Expected recall@n of n exercises drawn uniformly without replacement."""
    return min(1.0, n / exercise_count)
