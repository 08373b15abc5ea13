"""Exact restart-walk visit distribution, used to check the sampler."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from exrec.errors import GraphTooLarge, InvalidAlpha, NoMass
from exrec.graph import TripartiteGraph
from exrec.walker import QuerySet, split_budget

SERIES_CUTOFF = 1e-9


def transition_matrix(graph: TripartiteGraph) -> np.ndarray:
    """Exercise-to-exercise one-step law of the two-stage uniform step.

    Rows of isolated exercises are left at zero: the walk stops there.
    """
    n = len(graph.exercise_ids)
    P = np.zeros((n, n))
    for i, pivots in enumerate(graph.pivots_of):
        if not pivots:
            continue
        w_pivot = 1.0 / len(pivots)
        for p in pivots:
            ms = graph.members[p]
            w = w_pivot / len(ms)
            for j in ms:
                P[i, j] += w
    return P


def stationary_oracle(
    graph: TripartiteGraph,
    query: QuerySet | Sequence[str],
    alpha: float,
    total_steps: int | None = None,
    max_exercises: int = 1000,
) -> np.ndarray:
    """Expected normalised visit frequencies, aligned with ``graph.exercise_ids``.

    Per query q this is sum_t (1-alpha)^(t-1) P^t[q, :] normalised to one,
    truncated once the weight drops below 1e-9. Queries are mixed with the
    walker's per-query step budgets (even split when ``total_steps`` is None).
    """
    if not 0.0 < alpha <= 1.0:
        raise InvalidAlpha(f"alpha must be in (0, 1], got {alpha!r}")
    n = len(graph.exercise_ids)
    if n > max_exercises:
        raise GraphTooLarge(f"{n} exercises exceeds oracle cap {max_exercises}")
    if not isinstance(query, QuerySet):
        query = QuerySet(query)
    starts = [graph.exercise_idx(q) for q in query]
    if total_steps is None:
        budgets = [1] * len(starts)
    else:
        budgets = split_budget(total_steps, len(starts))

    P = transition_matrix(graph)
    state = np.zeros((len(starts), n))
    state[np.arange(len(starts)), starts] = 1.0
    acc = np.zeros_like(state)
    weight = 1.0
    while weight >= SERIES_CUTOFF:
        state = state @ P
        acc += weight * state
        weight *= 1.0 - alpha

    mix = np.zeros(n)
    mass = 0.0
    for row, b in zip(acc, budgets):
        s = row.sum()
        if s > 0 and b > 0:
            mix += b * row / s
            mass += b
    if mass == 0:
        raise NoMass("every query exercise is a dead end")
    return mix / mass


def oracle_distribution(graph: TripartiteGraph, query, alpha: float, **kw) -> dict[str, float]:
    vec = stationary_oracle(graph, query, alpha, **kw)
    return {q: float(v) for q, v in zip(graph.exercise_ids, vec) if v > 0}
