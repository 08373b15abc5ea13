"""Syllabus-scope restriction of candidates."""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Mapping, Sequence

from exrec.errors import DuplicateKc, EmptyFile, SyllabusError, UnknownCutoff
from exrec.graph import TripartiteGraph, kcs_of_exercise
from exrec.walker import CandidateList


@dataclass(frozen=True)
class SyllabusOrder:
    ranks: Mapping[str, int]

    def __post_init__(self):
        if sorted(self.ranks.values()) != list(range(len(self.ranks))):
            raise SyllabusError("syllabus ranks must be exactly 0..n-1")

    @classmethod
    def from_sequence(cls, kcs: Sequence[str]) -> "SyllabusOrder":
        ranks: dict[str, int] = {}
        for kc in kcs:
            if kc in ranks:
                raise DuplicateKc(f"KC {kc!r} appears twice in the syllabus")
            ranks[kc] = len(ranks)
        return cls(ranks)

    def __len__(self) -> int:
        return len(self.ranks)

    def __contains__(self, kc: str) -> bool:
        return kc in self.ranks

    def rank(self, kc: str) -> int:
        try:
            return self.ranks[kc]
        except KeyError:
            raise UnknownCutoff(f"KC {kc!r} is not in the syllabus") from None

    @property
    def ordered(self) -> list[str]:
        return sorted(self.ranks, key=self.ranks.__getitem__)


@dataclass(frozen=True)
class Progress:
    cutoff_kc: str


def load_syllabus(path: str | os.PathLike) -> SyllabusOrder:
    with open(path, encoding="utf-8") as fh:
        kcs = [ln.strip() for ln in fh]
    kcs = [kc for kc in kcs if kc and not kc.startswith("#")]
    if not kcs:
        raise EmptyFile(f"{os.fspath(path)}: no KC lines")
    return SyllabusOrder.from_sequence(kcs)


def write_syllabus(path: str | os.PathLike, kcs: Sequence[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("# syllabus order, earliest first\n")
        for kc in kcs:
            fh.write(f"{kc}\n")


def restrict(
    candidates: CandidateList,
    graph: TripartiteGraph,
    syllabus: SyllabusOrder,
    progress: Progress | str,
) -> CandidateList:
    """Keep candidates whose KCs all sit at or before the cutoff KC.

    Candidates with no KC, or with a KC the syllabus does not list, are
    dropped. Drop reasons go to ``tallies`` as ``sr_no_kc``,
    ``sr_out_of_scope`` and ``sr_unknown_kc``.
    """
    cutoff_kc = progress.cutoff_kc if isinstance(progress, Progress) else progress
    limit = syllabus.rank(cutoff_kc)
    ranks = syllabus.ranks
    kept = []
    no_kc = out_of_scope = unknown = 0
    for entry in candidates.entries:
        kcs = kcs_of_exercise(graph, entry[0])
        if not kcs:
            no_kc += 1
            continue
        if any(kc not in ranks for kc in kcs):
            unknown += 1
            continue
        if max(ranks[kc] for kc in kcs) > limit:
            out_of_scope += 1
            continue
        kept.append(entry)
    tallies = dict(candidates.tallies)
    tallies.update(sr_no_kc=no_kc, sr_out_of_scope=out_of_scope, sr_unknown_kc=unknown)
    return CandidateList(tuple(kept), "after_sr", tallies)
