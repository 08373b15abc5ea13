"""Recall aggregation and distribution distances."""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from exrec.errors import EmptyCaseList, EmptyGroundTruth


def recall_at_n(recommended: Iterable[str], ground_truth: Iterable[str]) -> float:
    truth = set(ground_truth)
    if not truth:
        raise EmptyGroundTruth("ground truth is empty")
    return len(truth.intersection(recommended)) / len(truth)


def aggregate_recall(cases: Sequence[tuple[int, int]]) -> tuple[float, float]:
    """(macro, micro) recall from per-case ``(hits, truth_size)`` pairs."""
    if not cases:
        raise EmptyCaseList("no cases to aggregate")
    for hits, size in cases:
        if size < 1:
            raise EmptyGroundTruth("truth_size must be >= 1")
        if not 0 <= hits <= size:
            raise ValueError(f"hits={hits} outside [0, {size}]")
    macro = sum(h / s for h, s in cases) / len(cases)
    micro = sum(h for h, _ in cases) / sum(s for _, s in cases)
    return macro, micro


def total_variation(p: Mapping[str, float], q: Mapping[str, float]) -> float:
    keys = set(p) | set(q)
    return 0.5 * sum(abs(p.get(k, 0.0) - q.get(k, 0.0)) for k in keys)
