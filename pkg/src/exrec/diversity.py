"""Near-duplicate filtering over exercise embeddings, and Distinct-2."""

from __future__ import annotations

import math
import os
import unicodedata
from typing import Iterable, Mapping, Protocol, Sequence

import numpy as np

from exrec.errors import DimensionMismatch, EmbeddingError, EmptyTokenList, NoBigrams, ZeroVector
from exrec.rng import text_hash64
from exrec.walker import CandidateList

DEFAULT_DIM = 256
DEFAULT_TAU = 0.9


def tokenize(text: str) -> list[str]:
    """NFC + lowercase; whitespace runs split words, otherwise one token per code point."""
    text = unicodedata.normalize("NFC", text).lower()
    if any(ch.isspace() for ch in text):
        return text.split()
    return list(text)


def hashed_index(token: str, dim: int = DEFAULT_DIM) -> int:
    return text_hash64(token) % dim


def embed_text(tokens: Sequence[str], dim: int = DEFAULT_DIM, lookup=None) -> np.ndarray:
    """Unit-normalised mean of per-token vectors.

    With no ``lookup`` each token is a one-hot vector at its hashed index.
    ``lookup`` maps a token to its own vector otherwise.
    """
    if not tokens:
        raise EmptyTokenList("cannot embed an empty token list")
    if lookup is None:
        acc = np.zeros(dim)
        for tok in tokens:
            acc[hashed_index(tok, dim)] += 1.0
    else:
        acc = np.mean([np.asarray(lookup(tok), dtype=float) for tok in tokens], axis=0)
    norm = float(np.linalg.norm(acc))
    if norm == 0.0:
        raise ZeroVector("mean token vector is zero")
    return acc / norm


def cosine(u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise DimensionMismatch(f"{u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("cosine of a zero vector")
    return min(1.0, max(-1.0, float(np.dot(u, v)) / (nu * nv)))


class Embeddings(Protocol):
    dim: int

    def vector(self, exercise: str) -> np.ndarray | None:
        """Unit vector, or None when missing or all-zero."""


class EmbeddingTable:
    """Fixed table of exercise vectors, rows L2-normalised on construction."""

    def __init__(self, dim: int, vectors: Mapping[str, Sequence[float]]):
        if dim < 1:
            raise EmbeddingError(f"dim must be positive, got {dim}")
        self.dim = dim
        self.vectors: dict[str, np.ndarray] = {}
        zero = set()
        for ex, vec in vectors.items():
            arr = np.asarray(vec, dtype=float)
            if arr.shape != (dim,):
                raise DimensionMismatch(f"{ex!r}: expected {dim} components, got {arr.shape}")
            if not np.all(np.isfinite(arr)):
                raise EmbeddingError(f"{ex!r}: non-finite component")
            norm = float(np.linalg.norm(arr))
            if norm == 0.0:
                zero.add(ex)
                self.vectors[ex] = arr
            else:
                self.vectors[ex] = arr / norm
        self.zero = frozenset(zero)

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, exercise: str) -> bool:
        return exercise in self.vectors

    def vector(self, exercise: str) -> np.ndarray | None:
        if exercise in self.zero:
            return None
        return self.vectors.get(exercise)


class BuiltinEmbeddings:
    """Hashed-token embeddings computed on demand from exercise texts."""

    def __init__(self, corpus: Mapping[str, str], dim: int = DEFAULT_DIM):
        self.dim = dim
        self.corpus = corpus
        self._cache: dict[str, np.ndarray | None] = {}

    def vector(self, exercise: str) -> np.ndarray | None:
        try:
            return self._cache[exercise]
        except KeyError:
            pass
        text = self.corpus.get(exercise)
        vec = None
        if text is not None:
            tokens = tokenize(text)
            if tokens:
                vec = embed_text(tokens, self.dim)
        self._cache[exercise] = vec
        return vec

    def table(self, exercises: Iterable[str] | None = None) -> EmbeddingTable:
        ids = sorted(self.corpus) if exercises is None else list(exercises)
        rows = {}
        for ex in ids:
            vec = self.vector(ex)
            if vec is not None:
                rows[ex] = vec
        return EmbeddingTable(self.dim, rows)


def load_embeddings(path: str | os.PathLike) -> EmbeddingTable:
    with open(path, encoding="utf-8") as fh:
        lines = [ln.rstrip("\r\n") for ln in fh]
    if not lines or not lines[0].startswith("DIM\t"):
        raise EmbeddingError("embedding file must start with 'DIM<TAB><d>'")
    try:
        dim = int(lines[0].split("\t", 1)[1])
    except ValueError:
        raise EmbeddingError(f"bad DIM header {lines[0]!r}") from None
    rows: dict[str, list[float]] = {}
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0]:
            raise EmbeddingError(f"line {lineno}: expected '<exercise_id><TAB><values>'")
        try:
            values = [float(x) for x in parts[1].split(",")]
        except ValueError:
            raise EmbeddingError(f"line {lineno}: non-numeric component") from None
        if not all(math.isfinite(x) for x in values):
            raise EmbeddingError(f"line {lineno}: non-finite component")
        if len(values) != dim:
            raise DimensionMismatch(f"line {lineno}: expected {dim} components, got {len(values)}")
        rows[parts[0]] = values
    return EmbeddingTable(dim, rows)


def write_embeddings(path: str | os.PathLike, table: EmbeddingTable) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"DIM\t{table.dim}\n")
        for ex in sorted(table.vectors):
            vals = ",".join(format(float(x), ".9g") for x in table.vectors[ex])
            fh.write(f"{ex}\t{vals}\n")


def dedupe(
    candidates: CandidateList,
    table: Embeddings,
    tau: float = DEFAULT_TAU,
    against: str = "preceding",
) -> CandidateList:
    """Drop candidates whose cosine to a higher-ranked candidate exceeds ``tau``.

    ``against="preceding"`` compares with every earlier candidate, dropped or
    not, which keeps the retained set monotone in ``tau``. ``"retained"`` is
    the classic greedy pass that only compares with candidates already kept.
    Candidates without a usable vector are kept and tallied as ``missing``.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValueError(f"tau must be in [0, 1], got {tau!r}")
    if against not in ("preceding", "retained"):
        raise ValueError(f"unknown comparison mode {against!r}")
    entries = candidates.entries
    vecs = [table.vector(ex) for ex in candidates.ids]
    have = [i for i, v in enumerate(vecs) if v is not None]
    missing = len(entries) - len(have)

    keep = [True] * len(entries)
    if have:
        mat = np.stack([vecs[i] for i in have])
        gram = np.clip(mat @ mat.T, -1.0, 1.0)
        if against == "preceding":
            clash = np.tril(gram > tau, k=-1).any(axis=1)
            for r, i in enumerate(have):
                keep[i] = not clash[r]
        else:
            kept_rows: list[int] = []
            for r, i in enumerate(have):
                if kept_rows and gram[r, kept_rows].max() > tau:
                    keep[i] = False
                else:
                    kept_rows.append(r)

    out = tuple(e for e, k in zip(entries, keep) if k)
    tallies = dict(candidates.tallies)
    tallies["dp_dropped"] = len(entries) - len(out)
    tallies["dp_missing"] = missing
    return CandidateList(out, "after_dp", tallies)


def bigrams(tokens: Sequence[str]) -> list[tuple[str, str]]:
    return list(zip(tokens, tokens[1:]))


def distinct_2(texts: Iterable[Sequence[str]]) -> float:
    """Distinct bigrams over total bigram occurrences, pooled over ``texts``."""
    seen: set[tuple[str, str]] = set()
    total = 0
    for tokens in texts:
        grams = bigrams(list(tokens))
        total += len(grams)
        seen.update(grams)
    if total == 0:
        raise NoBigrams("no text has two or more tokens")
    return len(seen) / total


def load_corpus(path: str | os.PathLike) -> dict[str, str]:
    """Read ``<exercise_id><TAB><text>`` lines."""
    corpus: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\r\n")
            if not line.strip() or line.startswith("#"):
                continue
            ex, sep, text = line.partition("\t")
            if not sep or not ex:
                raise EmbeddingError(f"corpus line {lineno}: expected '<exercise_id><TAB><text>'")
            corpus[ex] = text
    return corpus


def write_corpus(path: str | os.PathLike, corpus: Mapping[str, str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for ex in sorted(corpus):
            fh.write(f"{ex}\t{corpus[ex]}\n")
