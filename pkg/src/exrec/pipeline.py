"""TG -> DP -> SR recommendation pipeline and its wire records."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Mapping

from exrec.diversity import DEFAULT_TAU, Embeddings, dedupe
from exrec.errors import CaseError, ExrecError, InvalidConfig, MalformedRecord
from exrec.graph import TripartiteGraph
from exrec.rng import derive_seed, text_hash64
from exrec.scope import Progress, SyllabusOrder, restrict
from exrec.walker import QuerySet, VisitCounter, WalkConfig, run_walks, top_candidates

MODULES = ("tg", "dp", "sr")
TABLE_ROWS = ("tg", "tg,dp", "tg,sr", "tg,dp,sr")


@dataclass(frozen=True)
class PipelineConfig:
    walk: WalkConfig = field(default_factory=WalkConfig)
    dp: bool = True
    sr: bool = True
    tau: float = DEFAULT_TAU
    top_n: int = 10

    def __post_init__(self):
        if self.top_n < 1:
            raise InvalidConfig(f"top_n must be >= 1, got {self.top_n}")
        if self.walk.pool_size < self.top_n:
            raise InvalidConfig(
                f"pool_size ({self.walk.pool_size}) must be >= top_n ({self.top_n})"
            )
        if not 0.0 <= self.tau <= 1.0:
            raise InvalidConfig(f"tau must be in [0, 1], got {self.tau}")

    @property
    def label(self) -> str:
        return "+".join(["TG"] + (["DP"] if self.dp else []) + (["SR"] if self.sr else []))

    def with_modules(self, modules: str) -> "PipelineConfig":
        dp, sr = parse_modules(modules)
        return dataclasses.replace(self, dp=dp, sr=sr)


def parse_modules(text: str) -> tuple[bool, bool]:
    """``"tg,dp"`` -> (dp, sr) flags. TG is mandatory."""
    parts = [p.strip().lower() for p in text.split(",") if p.strip()]
    unknown = sorted(set(parts) - set(MODULES))
    if unknown:
        raise InvalidConfig(f"unknown module(s) {unknown}; expected a subset of {MODULES}")
    if "tg" not in parts:
        raise InvalidConfig("module list must include tg")
    if len(set(parts)) != len(parts):
        raise InvalidConfig(f"repeated module in {text!r}")
    return "dp" in parts, "sr" in parts


@dataclass
class Stores:
    graph: TripartiteGraph
    embeddings: Embeddings | None = None
    syllabus: SyllabusOrder | None = None
    corpus: Mapping[str, str] | None = None

    def check(self, config: PipelineConfig) -> None:
        if config.dp and self.embeddings is None:
            raise InvalidConfig("dp enabled but no embeddings loaded")
        if config.sr and self.syllabus is None:
            raise InvalidConfig("sr enabled but no syllabus loaded")


@dataclass(frozen=True)
class Request:
    request_id: str
    query: QuerySet
    progress: Progress
    top_n: int | None = None


@dataclass
class RecommendationResponse:
    request_id: str
    entries: tuple[tuple[str, int], ...]
    generated: int
    after_dp: int
    after_sr: int
    final: int
    warnings: list[str] = field(default_factory=list)

    @property
    def ids(self) -> list[str]:
        return [e for e, _ in self.entries]

    def format(self) -> str:
        recs = ",".join(f"{e}:{s}" for e, s in self.entries)
        return f"{self.request_id}\t{recs}\t{self.generated}/{self.after_dp}/{self.after_sr}"


def request_seed(master: int, request_id: str) -> int:
    return derive_seed(master, text_hash64(request_id))


def walk_counts(
    query: QuerySet, stores: Stores, config: PipelineConfig, seed: int, workers: int = 1
) -> VisitCounter:
    return run_walks(stores.graph, query, dataclasses.replace(config.walk, seed=seed), workers)


def filter_candidates(
    counter: VisitCounter,
    query: QuerySet,
    progress: Progress,
    top_n: int,
    stores: Stores,
    config: PipelineConfig,
    request_id: str = "-",
) -> RecommendationResponse:
    """Pool selection, DP, SR and truncation on an existing visit counter."""
    if top_n < 1:
        raise InvalidConfig(f"top_n must be >= 1, got {top_n}")
    if config.walk.pool_size < top_n:
        raise InvalidConfig(f"pool_size ({config.walk.pool_size}) must be >= top_n ({top_n})")
    stores.check(config)
    warnings = list(counter.warnings)
    pool = top_candidates(counter, config.walk.pool_size, exclusions=query.exercises)
    generated = len(pool)
    if config.dp:
        pool = dedupe(pool, stores.embeddings, config.tau)
        if pool.tallies.get("dp_missing"):
            warnings.append(f"{pool.tallies['dp_missing']} candidate(s) without embeddings kept")
    after_dp = len(pool)
    if config.sr:
        pool = restrict(pool, stores.graph, stores.syllabus, progress)
        if generated and not len(pool):
            warnings.append("every candidate is out of scope")
    after_sr = len(pool)
    final = pool.truncate(top_n, "final")
    if len(final) < top_n:
        warnings.append(f"only {len(final)} of {top_n} recommendations available")
    return RecommendationResponse(
        request_id, final.entries, generated, after_dp, after_sr, len(final), warnings
    )


def recommend(
    query: QuerySet,
    progress: Progress,
    top_n: int,
    stores: Stores,
    config: PipelineConfig,
    seed: int,
    request_id: str = "-",
    workers: int = 1,
) -> RecommendationResponse:
    """Run the pipeline with an explicit walk seed."""
    if config.walk.pool_size < top_n:
        raise InvalidConfig(f"pool_size ({config.walk.pool_size}) must be >= top_n ({top_n})")
    stores.check(config)
    counter = walk_counts(query, stores, config, seed, workers)
    return filter_candidates(counter, query, progress, top_n, stores, config, request_id)


def run_pipeline(
    request: Request, stores: Stores, config: PipelineConfig, workers: int = 1
) -> RecommendationResponse:
    """Serve one request; the walk seed comes from (master seed, request id)."""
    top_n = request.top_n if request.top_n is not None else config.top_n
    try:
        return recommend(
            request.query,
            request.progress,
            top_n,
            stores,
            config,
            request_seed(config.walk.seed, request.request_id),
            request.request_id,
            workers,
        )
    except ExrecError as exc:
        raise CaseError(request.request_id, exc) from exc


def _split_ids(field_text: str) -> list[str]:
    ids = [q for q in field_text.split(",")]
    if not ids or any(not q for q in ids):
        raise MalformedRecord(f"bad exercise id list {field_text!r}")
    return ids


def parse_case_record(line: str) -> tuple[str, str, list[str]]:
    """``<id><TAB><progress_kc><TAB><q1,q2,...>``."""
    parts = line.rstrip("\r\n").split("\t")
    if len(parts) != 3 or not parts[0] or not parts[1]:
        raise MalformedRecord(f"expected 3 tab-separated fields: {line.rstrip()!r}")
    return parts[0], parts[1], _split_ids(parts[2])


def parse_serve_record(line: str) -> Request:
    """``<request_id><TAB><progress_kc><TAB><q1,q2,...><TAB><top_n>``."""
    parts = line.rstrip("\r\n").split("\t")
    if len(parts) != 4 or not parts[0] or not parts[1]:
        raise MalformedRecord(f"expected 4 tab-separated fields: {line.rstrip()!r}")
    try:
        top_n = int(parts[3])
    except ValueError:
        raise MalformedRecord(f"bad top_n {parts[3]!r}") from None
    if top_n < 1:
        raise MalformedRecord(f"top_n must be >= 1, got {top_n}")
    try:
        query = QuerySet(_split_ids(parts[2]))
    except ExrecError as exc:
        raise MalformedRecord(str(exc)) from None
    return Request(parts[0], query, Progress(parts[1]), top_n)
