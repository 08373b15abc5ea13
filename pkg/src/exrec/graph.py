"""KC / exercise / material tripartite graph.

The graph is immutable once built. Public queries work on string ids; the
walker and oracle use the integer indexes (``pivots_of`` / ``members``)
directly, which is why they are exposed as attributes.

Exercises are indexed in ascending id order, and pivots are indexed as all
KCs (ascending) followed by all materials (ascending), so integer order and
id order coincide within each kind.
"""

from __future__ import annotations

import contextlib
import enum
import gc
import os
from dataclasses import dataclass
from typing import Iterable

from exrec.errors import EmptyGraph, LayerViolation, MalformedLine, UnknownNode, WrongKind


class Kind(enum.Enum):
    KC = "KC"
    EXERCISE = "EX"
    MATERIAL = "MAT"


@dataclass(frozen=True)
class NodeId:
    kind: Kind
    id: str

    def __str__(self) -> str:
        return self.id


def _check_disjoint(kcs: set, exercises: set, materials: set) -> None:
    for a, b, la, lb in (
        (kcs, exercises, "KC", "exercise"),
        (exercises, materials, "exercise", "material"),
        (kcs, materials, "KC", "material"),
    ):
        clash = a & b
        if clash:
            name = min(clash)
            raise LayerViolation(f"identifier {name!r} is used both as {la} and as {lb}")


class TripartiteGraph:
    """Validated tripartite graph with adjacency indexes in both directions."""

    def __init__(
        self,
        e1_edges: Iterable[tuple[str, str]],
        e2_edges: Iterable[tuple[str, str]],
        kcs: Iterable[str] = (),
        exercises: Iterable[str] = (),
        materials: Iterable[str] = (),
        duplicate_edges: int = 0,
    ):
        """Edges given more than once are collapsed and counted in ``duplicate_edges``."""
        # Ordered dedup: iterating edges in input order is much faster than
        # set order on large graphs.
        raw1 = list(e1_edges)
        raw2 = list(e2_edges)
        e1_list = list(dict.fromkeys(raw1))
        e2_list = list(dict.fromkeys(raw2))
        duplicate_edges += len(raw1) - len(e1_list) + len(raw2) - len(e2_list)
        e1 = frozenset(e1_list)
        e2 = frozenset(e2_list)
        e1_kcs, e1_ex = zip(*e1_list) if e1_list else ((), ())
        e2_ex, e2_mats = zip(*e2_list) if e2_list else ((), ())
        kc_set = set(kcs)
        kc_set.update(e1_kcs)
        ex_set = set(exercises)
        ex_set.update(e1_ex)
        ex_set.update(e2_ex)
        mat_set = set(materials)
        mat_set.update(e2_mats)
        _check_disjoint(kc_set, ex_set, mat_set)
        if not ex_set:
            raise EmptyGraph("graph has no exercises")
        names = (kc_set, ex_set, mat_set)
        blob = "\x00".join(x for group in names for x in group)
        if "\t" in blob or "\n" in blob or any("" in group for group in names):
            raise MalformedLine(0, "identifiers must be non-empty and free of tabs and newlines")

        self.kcs = frozenset(kc_set)
        self.exercises = frozenset(ex_set)
        self.materials = frozenset(mat_set)
        self.e1_edges = e1
        self.e2_edges = e2
        self.duplicate_edges = duplicate_edges

        self.exercise_ids: tuple[str, ...] = tuple(sorted(ex_set))
        self.exercise_index = {q: i for i, q in enumerate(self.exercise_ids)}
        kc_ids = sorted(kc_set)
        mat_ids = sorted(mat_set)
        self.n_kcs = len(kc_ids)
        self.pivot_ids: tuple[str, ...] = (*kc_ids, *mat_ids)
        self.pivot_index = {p: i for i, p in enumerate(self.pivot_ids)}

        xi = self.exercise_index
        pi = self.pivot_index
        n_ex = len(self.exercise_ids)
        pivots_of: list[list[int]] = [[] for _ in range(n_ex)]
        members: list[list[int]] = [[] for _ in range(len(self.pivot_ids))]
        for pivots, exs in ((e1_kcs, e1_ex), (e2_mats, e2_ex)):
            for p, q in zip(map(pi.__getitem__, pivots), map(xi.__getitem__, exs)):
                pivots_of[q].append(p)
                members[p].append(q)
        for row in pivots_of:
            row.sort()
        for row in members:
            row.sort()
        self.pivots_of = pivots_of
        self.members = members

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TripartiteGraph):
            return NotImplemented
        return (
            self.kcs == other.kcs
            and self.exercises == other.exercises
            and self.materials == other.materials
            and self.e1_edges == other.e1_edges
            and self.e2_edges == other.e2_edges
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return (
            f"TripartiteGraph(kcs={len(self.kcs)}, exercises={len(self.exercises)}, "
            f"materials={len(self.materials)}, e1={len(self.e1_edges)}, e2={len(self.e2_edges)})"
        )

    def kind_of(self, ident: str) -> Kind:
        if ident in self.exercise_index:
            return Kind.EXERCISE
        if ident in self.kcs:
            return Kind.KC
        if ident in self.materials:
            return Kind.MATERIAL
        raise UnknownNode(f"unknown node {ident!r}")

    def node(self, ident: str) -> NodeId:
        return NodeId(self.kind_of(ident), ident)

    def exercise_idx(self, q: str | NodeId) -> int:
        q = str(q)
        try:
            return self.exercise_index[q]
        except KeyError:
            raise UnknownNode(f"unknown exercise {q!r}") from None

    def without_pivots(self, pivots) -> "TripartiteGraph":
        """A view in which the given KCs or materials have no incident edges.

        Only the exercise-side index is copied; node and edge sets are shared
        with the original, so the view is meant for walking, not comparison.
        """
        blocked = set()
        for p in pivots:
            p = str(p)
            if self.kind_of(p) is Kind.EXERCISE:
                raise WrongKind(f"{p!r} is an exercise, not a KC or material")
            blocked.add(self.pivot_index[p])
        view = object.__new__(TripartiteGraph)
        view.__dict__.update(self.__dict__)
        pivots_of = list(self.pivots_of)
        members = list(self.members)
        for p in blocked:
            for q in self.members[p]:
                pivots_of[q] = [x for x in pivots_of[q] if x not in blocked]
            members[p] = []
        view.pivots_of = pivots_of
        view.members = members
        return view

    def pivot_node(self, p: int) -> NodeId:
        kind = Kind.KC if p < self.n_kcs else Kind.MATERIAL
        return NodeId(kind, self.pivot_ids[p])


@contextlib.contextmanager
def _gc_paused():
    # The loader allocates ~1M small tuples/lists; generational GC passes
    # over them cost more than the parse itself.
    enabled = gc.isenabled()
    gc.disable()
    try:
        yield
    finally:
        if enabled:
            gc.enable()


def load_graph(path: str | os.PathLike) -> TripartiteGraph:
    """Parse a graph TSV file.

    Duplicate edge lines are collapsed; the number collapsed is available as
    ``graph.duplicate_edges``.
    """
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    with _gc_paused():
        return _parse_graph(text)


def _parse_graph(text: str) -> TripartiteGraph:
    e1: list[tuple[str, str]] = []
    e2: list[tuple[str, str]] = []
    declared = {"KC": set(), "EX": set(), "MAT": set()}
    for lineno, raw in enumerate(text.split("\n"), 1):
        line = raw.rstrip("\r")
        if not line.strip() or line[0] == "#":
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise MalformedLine(lineno, f"expected 3 tab-separated fields, got {len(parts)}")
        tag, a, b = parts
        if not a or not b:
            raise MalformedLine(lineno, "empty identifier")
        if tag == "E1":
            e1.append((a, b))
        elif tag == "E2":
            e2.append((a, b))
        elif tag == "NODE":
            if a not in declared:
                raise MalformedLine(lineno, f"unknown node kind {a!r}")
            declared[a].add(b)
        else:
            raise MalformedLine(lineno, f"unknown record tag {tag!r}")

    return TripartiteGraph(
        e1, e2, kcs=declared["KC"], exercises=declared["EX"], materials=declared["MAT"]
    )


def incident_pivots(graph: TripartiteGraph, q: str | NodeId) -> list[NodeId]:
    """KCs then materials adjacent to exercise ``q``, each group sorted by id."""
    i = graph.exercise_idx(q)
    return [graph.pivot_node(p) for p in graph.pivots_of[i]]


def exercises_of_pivot(graph: TripartiteGraph, pivot: str | NodeId) -> list[str]:
    ident = str(pivot)
    kind = graph.kind_of(ident)
    if kind is Kind.EXERCISE:
        raise WrongKind(f"{ident!r} is an exercise, not a KC or material")
    ids = graph.exercise_ids
    return [ids[j] for j in graph.members[graph.pivot_index[ident]]]


def kcs_of_exercise(graph: TripartiteGraph, q: str | NodeId) -> list[str]:
    i = graph.exercise_idx(q)
    n = graph.n_kcs
    ids = graph.pivot_ids
    return [ids[p] for p in graph.pivots_of[i] if p < n]
