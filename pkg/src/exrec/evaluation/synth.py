"""Seeded synthetic KC / exercise / material datasets.

Layout of a generated dataset:

* The syllabus is ``k0..k{K-1}``. The first three quarters are the regular
  KCs, cut into consecutive *units*; the last quarter holds only the KCs of
  out-of-scope distractors.
* Each unit owns a block of regular materials and regular exercises. An
  exercise carries KCs from its unit only. A material has a focus KC of its
  unit and bundles exercises tagged with it (topped up from the unit when
  too few are). Without distractors every unit is its own connected
  component.
* Near duplicates copy the text of another exercise from a shared material
  and change one token.
* Distractors carry the focus KC of an early-unit case plus late KCs, so
  they are reachable from that case but out of its scope. They sit in *review*
  materials, each of which also bundles the query exercises of one
  early-unit case. Review materials are not cases.

Each case is a regular material. Its query exercises are sampled from the
material, and its progress cutoff is the last KC of the material's unit.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from exrec.diversity import DEFAULT_DIM, BuiltinEmbeddings, write_corpus, write_embeddings
from exrec.errors import InfeasibleConfig
from exrec.rng import generator
from exrec.scope import write_syllabus

COMMON_WORDS = (
    "solve find the value of x if and what is given a number sum total each how many "
    "more than less equal to then write answer show that compute when its in for"
).split()

FILES = {
    "graph": "graph.tsv",
    "corpus": "corpus.tsv",
    "embeddings": "embeddings.tsv",
    "syllabus": "syllabus.txt",
    "cases": "cases.tsv",
}


@dataclass(frozen=True)
class SynthConfig:
    kc_count: int = 400
    exercise_count: int = 3000
    material_count: int = 300
    exercises_per_material: int = 12
    kcs_per_exercise: int = 2
    near_duplicate_fraction: float = 0.1
    out_of_scope_distractor_fraction: float = 0.1
    queries_per_case: int = 3
    materials_per_unit: int = 5
    text_length: int = 20
    dim: int = DEFAULT_DIM
    seed: int = 0

    def __post_init__(self):
        for name in (
            "kc_count", "exercise_count", "material_count", "exercises_per_material",
            "kcs_per_exercise", "queries_per_case", "materials_per_unit", "text_length", "dim",
        ):
            if getattr(self, name) < 1:
                raise InfeasibleConfig(f"{name} must be >= 1, got {getattr(self, name)}")
        for name in ("near_duplicate_fraction", "out_of_scope_distractor_fraction"):
            if not 0.0 <= getattr(self, name) < 1.0:
                raise InfeasibleConfig(f"{name} must be in [0, 1), got {getattr(self, name)}")
        if not 0 <= self.seed < 2**64:
            raise InfeasibleConfig(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.exercises_per_material > self.exercise_count:
            raise InfeasibleConfig(
                f"exercises_per_material ({self.exercises_per_material}) exceeds "
                f"exercise_count ({self.exercise_count})"
            )
        if self.queries_per_case >= self.exercises_per_material:
            raise InfeasibleConfig("queries_per_case must be < exercises_per_material")
        if self.kc_count < 2:
            raise InfeasibleConfig("kc_count must be >= 2 (regular and late KCs)")
        if self.text_length < 2:
            raise InfeasibleConfig("text_length must be >= 2")


@dataclass
class Case:
    material: str
    progress_kc: str
    query: tuple[str, ...]


@dataclass
class SynthDataset:
    config: SynthConfig
    kcs: list[str]
    e1: list[tuple[str, str]]
    e2: list[tuple[str, str]]
    corpus: dict[str, str]
    cases: list[Case]
    distractors: frozenset[str] = field(default_factory=frozenset)
    near_duplicates: dict[str, str] = field(default_factory=dict)

    def write(self, out_dir: str | os.PathLike, embeddings: bool = True) -> dict[str, Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        paths = {k: out / v for k, v in FILES.items()}
        with open(paths["graph"], "w", encoding="utf-8", newline="\n") as fh:
            fh.write("# synthetic tripartite graph\n")
            for kc in self.kcs:
                fh.write(f"NODE\tKC\t{kc}\n")
            for k, q in sorted(self.e1):
                fh.write(f"E1\t{k}\t{q}\n")
            for q, m in sorted(self.e2):
                fh.write(f"E2\t{q}\t{m}\n")
        write_corpus(paths["corpus"], self.corpus)
        write_syllabus(paths["syllabus"], self.kcs)
        with open(paths["cases"], "w", encoding="utf-8", newline="\n") as fh:
            for c in self.cases:
                fh.write(f"{c.material}\t{c.progress_kc}\t{','.join(c.query)}\n")
        if embeddings:
            write_embeddings(paths["embeddings"], BuiltinEmbeddings(self.corpus, self.config.dim).table())
        else:
            paths.pop("embeddings")
        return paths


def _ids(prefix: str, n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"{prefix}{i:0{width}d}" for i in range(n)]


def _pseudo_words(rng: np.random.Generator, n: int) -> list[str]:
    consonants = list("bcdfghklmnprstvz")
    vowels = list("aeiou")
    words: list[str] = []
    seen = set(COMMON_WORDS)
    while len(words) < n:
        k = int(rng.integers(2, 4))
        w = "".join(consonants[rng.integers(16)] + vowels[rng.integers(5)] for _ in range(k))
        if w not in seen:
            seen.add(w)
            words.append(w)
    return words


def synth_dataset(config: SynthConfig) -> SynthDataset:
    c = config
    rng = generator(c.seed, 0)
    K, E, M = c.kc_count, c.exercise_count, c.material_count
    epm, nq = c.exercises_per_material, c.queries_per_case

    late_n = max(1, K // 4)
    reg_kc_n = K - late_n
    kcs = _ids("k", K)
    reg_kcs, late_kcs = kcs[:reg_kc_n], kcs[reg_kc_n:]

    n_dis = round(c.out_of_scope_distractor_fraction * E)
    per_review = epm - nq
    n_review = math.ceil(n_dis / per_review) if n_dis else 0
    n_reg_mat = M - n_review
    n_reg_ex = E - n_dis
    if n_reg_mat < 1:
        raise InfeasibleConfig(f"{n_review} review materials leave no regular material")
    units = min(reg_kc_n, math.ceil(n_reg_mat / c.materials_per_unit))
    if n_reg_ex // units < epm:
        raise InfeasibleConfig(
            f"{n_reg_ex} regular exercises over {units} units is fewer than "
            f"exercises_per_material ({epm}) per unit"
        )

    ex_ids = _ids("q", E)
    perm = rng.permutation(E)
    reg_ex = [ex_ids[i] for i in perm[:n_reg_ex]]
    dis_ex = [ex_ids[i] for i in perm[n_reg_ex:]]
    mat_ids = _ids("m", M)
    mperm = rng.permutation(M)
    reg_mat = [mat_ids[i] for i in sorted(mperm[:n_reg_mat])]
    review_mat = [mat_ids[i] for i in sorted(mperm[n_reg_mat:])]

    unit_kcs = [list(a) for a in np.array_split(np.array(reg_kcs, dtype=object), units)]
    unit_ex = [list(a) for a in np.array_split(np.array(reg_ex, dtype=object), units)]
    unit_mat = [list(a) for a in np.array_split(np.array(reg_mat, dtype=object), units)]

    e1: set[tuple[str, str]] = set()
    e2: set[tuple[str, str]] = set()
    ex_kcs: dict[str, list[str]] = {}
    mat_members: dict[str, list[str]] = {}
    ex_mats: dict[str, list[str]] = {q: [] for q in ex_ids}
    unit_of_mat: dict[str, int] = {}
    focus_of_mat: dict[str, str] = {}

    for u in range(units):
        ukcs, uex = unit_kcs[u], unit_ex[u]
        kpe = min(c.kcs_per_exercise, len(ukcs))
        for q in uex:
            chosen = sorted(ukcs[i] for i in rng.choice(len(ukcs), kpe, replace=False))
            ex_kcs[q] = chosen
            e1.update((k, q) for k in chosen)
        for j, m in enumerate(unit_mat[u]):
            focus = ukcs[j % len(ukcs)]
            tagged = [q for q in uex if focus in ex_kcs[q]]
            rest = [q for q in uex if focus not in ex_kcs[q]]
            if len(tagged) >= epm:
                picked = [tagged[i] for i in rng.choice(len(tagged), epm, replace=False)]
            else:
                fill = rng.choice(len(rest), epm - len(tagged), replace=False)
                picked = tagged + [rest[i] for i in fill]
            members = sorted(picked)
            focus_of_mat[m] = focus
            mat_members[m] = members
            unit_of_mat[m] = u
            for q in members:
                e2.add((q, m))
                ex_mats[q].append(m)

    cases: list[Case] = []
    case_of_mat: dict[str, Case] = {}
    for m in reg_mat:
        u = unit_of_mat[m]
        members = mat_members[m]
        query = tuple(sorted(members[i] for i in rng.choice(len(members), nq, replace=False)))
        case = Case(m, unit_kcs[u][-1], query)
        cases.append(case)
        case_of_mat[m] = case

    # Review materials pair with cases from the first half of the units.
    early = [m for m in reg_mat if unit_of_mat[m] < max(1, units // 2)]
    host_of_distractor: dict[str, str] = {}
    for r, m in enumerate(review_mat):
        host_case = case_of_mat[early[r % len(early)]]
        bundle = dis_ex[r * per_review:(r + 1) * per_review]
        for q in bundle:
            host_of_distractor[q] = host_case.material
        members = sorted(set(host_case.query) | set(bundle))
        mat_members[m] = members
        for q in members:
            e2.add((q, m))
            ex_mats[q].append(m)
    # A distractor shares the focus KC of its host case and adds late KCs.
    kpd = min(max(1, c.kcs_per_exercise - 1), late_n)
    for q in dis_ex:
        chosen = [focus_of_mat[host_of_distractor[q]]]
        chosen += [late_kcs[i] for i in rng.choice(late_n, kpd, replace=False)]
        ex_kcs[q] = sorted(chosen)
        e1.update((k, q) for k in chosen)

    corpus, near = _texts(c, rng, kcs, reg_ex, dis_ex, ex_kcs, ex_mats, mat_members, unit_ex)
    return SynthDataset(c, kcs, sorted(e1), sorted(e2), corpus, cases, frozenset(dis_ex), near)


def _texts(c, rng, kcs, reg_ex, dis_ex, ex_kcs, ex_mats, mat_members, unit_ex):
    words = _pseudo_words(rng, 12 * len(kcs) + 64)
    topic = {k: words[12 * i:12 * (i + 1)] for i, k in enumerate(kcs)}
    seen: set[tuple[str, ...]] = set()
    texts: dict[str, list[str]] = {}

    def fresh(q: str) -> list[str]:
        vocab = [w for k in ex_kcs[q] for w in topic[k]]
        while True:
            coin = rng.random(c.text_length) < 0.5
            common = rng.integers(len(COMMON_WORDS), size=c.text_length)
            own = rng.integers(len(vocab), size=c.text_length)
            toks = [
                COMMON_WORDS[a] if flip else vocab[b]
                for flip, a, b in zip(coin.tolist(), common.tolist(), own.tolist())
            ]
            if tuple(toks) not in seen:
                seen.add(tuple(toks))
                return toks

    n_near = round(c.near_duplicate_fraction * len(reg_ex))
    copies = set(reg_ex[i] for i in rng.choice(len(reg_ex), n_near, replace=False)) if n_near else set()
    for q in reg_ex + dis_ex:
        if q not in copies:
            texts[q] = fresh(q)

    distractors = set(dis_ex)
    unit_lookup = {q: u for u, qs in enumerate(unit_ex) for q in qs}
    near: dict[str, str] = {}
    for q in sorted(copies):
        shared = {x for m in ex_mats[q] for x in mat_members[m]}
        neighbours = sorted(shared - copies - distractors - {q})
        if not neighbours:
            neighbours = sorted(set(unit_ex[unit_lookup[q]]) - copies)
        src = neighbours[rng.integers(len(neighbours))]
        base = texts[src]
        while True:
            toks = list(base)
            pos = int(rng.integers(len(toks)))
            vocab = COMMON_WORDS + [w for k in ex_kcs[q] for w in topic[k]]
            repl = vocab[rng.integers(len(vocab))]
            if repl == toks[pos]:
                continue
            toks[pos] = repl
            if tuple(toks) not in seen:
                seen.add(tuple(toks))
                break
        texts[q] = toks
        near[q] = src

    corpus = {q: " ".join(t) for q, t in sorted(texts.items())}
    return corpus, near
