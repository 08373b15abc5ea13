"""Budgeted short random walks over the tripartite graph.

A step from exercise ``q`` picks one of ``q``'s incident edges uniformly
(landing on a KC or material pivot), then one exercise attached to that
pivot uniformly. Walk lengths are geometric with per-step stop probability
``alpha``. The step budget ``total_steps`` is split evenly over the query
exercises, and visits are counted after every step.
"""

from __future__ import annotations

import math
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from exrec.errors import EmptyQuery, InvalidAlpha, InvalidConfig
from exrec.graph import NodeId, TripartiteGraph
from exrec.rng import Stream

STAGES = ("generated", "after_dp", "after_sr", "final")


@dataclass(frozen=True)
class WalkConfig:
    alpha: float = 0.04
    total_steps: int = 100_000
    pool_size: int = 40
    seed: int = 0

    def __post_init__(self):
        if not (isinstance(self.alpha, (int, float)) and 0.0 < self.alpha <= 1.0):
            raise InvalidAlpha(f"alpha must be in (0, 1], got {self.alpha!r}")
        if self.total_steps < 1:
            raise InvalidConfig(f"total_steps must be >= 1, got {self.total_steps}")
        if self.pool_size < 1:
            raise InvalidConfig(f"pool_size must be >= 1, got {self.pool_size}")
        if not 0 <= self.seed < 2**64:
            raise InvalidConfig(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass(frozen=True)
class QuerySet:
    exercises: tuple[str, ...]

    def __init__(self, exercises: Iterable[str | NodeId]):
        ids = tuple(str(q) for q in exercises)
        if not ids:
            raise EmptyQuery("query set is empty")
        if len(set(ids)) != len(ids):
            raise EmptyQuery(f"query set has duplicate exercises: {ids}")
        object.__setattr__(self, "exercises", ids)

    def __iter__(self):
        return iter(self.exercises)

    def __len__(self) -> int:
        return len(self.exercises)


@dataclass
class VisitCounter:
    counts: dict[str, int] = field(default_factory=dict)
    executed_steps: int = 0
    warnings: list[str] = field(default_factory=list)

    def normalized(self) -> dict[str, float]:
        if not self.executed_steps:
            return {}
        return {q: c / self.executed_steps for q, c in self.counts.items()}


@dataclass(frozen=True)
class CandidateList:
    entries: tuple[tuple[str, int], ...]
    stage: str = "generated"
    # Filters record why they dropped (or failed open on) candidates here.
    tallies: dict[str, int] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.stage not in STAGES:
            raise ValueError(f"unknown stage {self.stage!r}")

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def ids(self) -> list[str]:
        return [e for e, _ in self.entries]

    def truncate(self, n: int, stage: str | None = None) -> "CandidateList":
        return CandidateList(self.entries[:n], stage or self.stage, dict(self.tallies))


def sample_walk_length(alpha: float, rng: Stream) -> int:
    """Geometric length on {1, 2, ...} with mean ``1/alpha``, by inversion."""
    if not 0.0 < alpha <= 1.0:
        raise InvalidAlpha(f"alpha must be in (0, 1], got {alpha!r}")
    u = rng.uniform()
    if alpha == 1.0:
        return 1
    return max(1, math.ceil(math.log1p(-u) / math.log1p(-alpha)))


def random_step(graph: TripartiteGraph, current: str | NodeId, rng: Stream) -> str | None:
    """One two-stage step from ``current``; ``None`` means a dead end."""
    pivots = graph.pivots_of[graph.exercise_idx(current)]
    if not pivots:
        return None
    members = graph.members[pivots[int(rng.uniform() * len(pivots))]]
    if not members:
        return None
    return graph.exercise_ids[members[int(rng.uniform() * len(members))]]


def split_budget(total: int, n: int) -> list[int]:
    base, extra = divmod(total, n)
    return [base + (1 if i < extra else 0) for i in range(n)]


def _walk_query(
    graph: TripartiteGraph, start: int, budget: int, alpha: float, rng: Stream
) -> tuple[dict[int, int], int]:
    pivots_of = graph.pivots_of
    members = graph.members
    counts: dict[int, int] = defaultdict(int)
    uniform = rng.uniform
    log_keep = math.log1p(-alpha) if alpha < 1.0 else None
    executed = 0
    while executed < budget:
        # Inlined sample_walk_length; keep the two in step.
        u = uniform()
        length = 1 if log_keep is None else max(1, math.ceil(math.log1p(-u) / log_keep))
        length = min(length, budget - executed)
        cur = start
        for _ in range(length):
            ps = pivots_of[cur]
            if not ps:
                break
            ms = members[ps[int(uniform() * len(ps))]]
            cur = ms[int(uniform() * len(ms))]
            counts[cur] += 1
            executed += 1
    return counts, executed


def run_walks(
    graph: TripartiteGraph, query: QuerySet | Sequence[str], config: WalkConfig, workers: int = 1
) -> VisitCounter:
    """Run the budgeted walks for every query exercise and merge the counts.

    Query ``i`` draws from the substream keyed ``(seed, i)``, so the result is
    the same for any ``workers``.
    """
    if not isinstance(query, QuerySet):
        query = QuerySet(query)
    starts = [graph.exercise_idx(q) for q in query]
    budgets = split_budget(config.total_steps, len(starts))
    warnings: list[str] = []

    def job(i: int) -> tuple[dict[int, int], int]:
        start = starts[i]
        if not graph.pivots_of[start] or budgets[i] == 0:
            return {}, 0
        return _walk_query(graph, start, budgets[i], config.alpha, Stream(config.seed, (i,)))

    if workers > 1 and len(starts) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(job, range(len(starts))))
    else:
        parts = [job(i) for i in range(len(starts))]

    merged: dict[int, int] = defaultdict(int)
    executed = 0
    for i, (counts, steps) in enumerate(parts):
        if not graph.pivots_of[starts[i]]:
            warnings.append(f"query exercise {query.exercises[i]!r} is a dead end; skipped")
        for j, c in counts.items():
            merged[j] += c
        executed += steps
    ids = graph.exercise_ids
    counts = {ids[j]: merged[j] for j in sorted(merged)}
    return VisitCounter(counts, executed, warnings)


def top_candidates(
    counter: VisitCounter | dict[str, int], pool_size: int, exclusions: Iterable[str] = ()
) -> CandidateList:
    """Highest visit counts first, ties by ascending id, excluded ids removed."""
    if pool_size < 1:
        raise InvalidConfig(f"pool_size must be >= 1, got {pool_size}")
    counts = counter.counts if isinstance(counter, VisitCounter) else counter
    excluded = {str(e) for e in exclusions}
    ranked = sorted(
        ((q, c) for q, c in counts.items() if q not in excluded), key=lambda qc: (-qc[1], qc[0])
    )
    return CandidateList(tuple(ranked[:pool_size]), "generated")
