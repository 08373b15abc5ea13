"""Command line: ``synth``, ``recommend``, ``evaluate`` and ``serve``.

Exit codes: 0 success, 1 configuration or load failure, 2 malformed batch input.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from typing import Sequence, TextIO

from exrec.diversity import DEFAULT_TAU, BuiltinEmbeddings, load_corpus, load_embeddings
from exrec.errors import CaseError, ExrecError, InvalidConfig, MalformedRecord
from exrec.evaluation.harness import evaluate_ablations, load_cases
from exrec.evaluation.synth import SynthConfig, synth_dataset
from exrec.graph import load_graph
from exrec.pipeline import (
    TABLE_ROWS,
    PipelineConfig,
    Request,
    Stores,
    parse_case_record,
    parse_modules,
    parse_serve_record,
    run_pipeline,
)
from exrec.scope import Progress, load_syllabus
from exrec.walker import QuerySet, WalkConfig


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _u64(text: str) -> int:
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"{text} is not a 64-bit unsigned integer")
    return value


def _add_store_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--graph", required=True, help="graph TSV file")
    p.add_argument("--corpus", help="exercise text file (<id><TAB><text>)")
    p.add_argument("--embeddings", default="builtin", help="embedding file, or 'builtin'")
    p.add_argument("--syllabus", help="syllabus file, one KC per line")
    p.add_argument("--alpha", type=float, default=0.04, help="per-step walk stop probability")
    p.add_argument("--total-steps", type=int, default=100_000)
    p.add_argument("--top-n", type=int, default=10)
    p.add_argument("--pool-size", type=int, help="candidate pool size (default 4 x top-n)")
    p.add_argument("--tau", type=float, default=DEFAULT_TAU)
    p.add_argument("--seed", type=_u64, default=0)
    p.add_argument("--threads", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="exrec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic dataset")
    defaults = SynthConfig()
    for f in dataclasses.fields(SynthConfig):
        flag = "--" + f.name.replace("_", "-")
        kind = _u64 if f.name == "seed" else type(getattr(defaults, f.name))
        p.add_argument(flag, type=kind, default=getattr(defaults, f.name))
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-embeddings", action="store_true", help="skip the embedding file")

    p = sub.add_parser("recommend", help="answer a file of requests")
    _add_store_flags(p)
    p.add_argument("--queries", required=True, help="<id><TAB><progress_kc><TAB><q1,q2,...> lines")
    p.add_argument("--modules", default="tg,dp,sr")

    p = sub.add_parser("evaluate", help="recall@N and Distinct-2 over evaluation cases")
    _add_store_flags(p)
    p.add_argument("--cases", required=True)
    p.add_argument("--ns", default="10,25,100")
    p.add_argument("--modules", action="append", help="repeat for several ablations")
    p.add_argument("--no-holdout", action="store_true",
                   help="let the walker use each case's own material")

    p = sub.add_parser("serve", help="answer requests from standard input")
    _add_store_flags(p)
    p.add_argument("--modules", default="tg,dp,sr")
    return parser


def _pipeline_config(args, modules: str, top_n: int | None = None) -> PipelineConfig:
    dp, sr = parse_modules(modules)
    top_n = top_n or args.top_n
    pool = args.pool_size if args.pool_size is not None else 4 * top_n
    walk = WalkConfig(args.alpha, args.total_steps, pool, args.seed)
    return PipelineConfig(walk, dp=dp, sr=sr, tau=args.tau, top_n=top_n)


def _load_stores(args, configs: Sequence[PipelineConfig], need_corpus: bool = False) -> Stores:
    graph = load_graph(args.graph)
    if graph.duplicate_edges:
        print(f"warning: collapsed {graph.duplicate_edges} duplicate edge line(s)", file=sys.stderr)
    corpus = load_corpus(args.corpus) if args.corpus else None
    stores = Stores(graph, corpus=corpus)
    if any(c.dp for c in configs):
        if args.embeddings == "builtin":
            if corpus is None:
                raise InvalidConfig("builtin embeddings need --corpus")
            stores.embeddings = BuiltinEmbeddings(corpus)
        else:
            stores.embeddings = load_embeddings(args.embeddings)
    if any(c.sr for c in configs):
        if not args.syllabus:
            raise InvalidConfig("sr enabled but --syllabus not given")
        stores.syllabus = load_syllabus(args.syllabus)
    if need_corpus and corpus is None:
        raise InvalidConfig("--corpus is required")
    return stores


def _emit_warnings(resp, err: TextIO) -> None:
    for w in resp.warnings:
        print(f"warning\t{resp.request_id}\t{w}", file=err)


def cmd_synth(args, out: TextIO, err: TextIO) -> int:
    values = {f.name: getattr(args, f.name) for f in dataclasses.fields(SynthConfig)}
    dataset = synth_dataset(SynthConfig(**values))
    paths = dataset.write(args.out, embeddings=not args.no_embeddings)
    for name, path in paths.items():
        print(f"{name}\t{path}", file=out)
    return 0


def cmd_recommend(args, out: TextIO, err: TextIO) -> int:
    config = _pipeline_config(args, args.modules)
    stores = _load_stores(args, [config])
    with open(args.queries, encoding="utf-8") as fh:
        lines = fh.readlines()
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        try:
            rid, progress, query = parse_case_record(line)
            request = Request(rid, QuerySet(query), Progress(progress), config.top_n)
            resp = run_pipeline(request, stores, config, workers=args.threads)
        except ExrecError as exc:
            print(f"error: {args.queries}:{lineno}: {exc}", file=err)
            return 2
        _emit_warnings(resp, err)
        print(resp.format(), file=out)
    return 0


def cmd_evaluate(args, out: TextIO, err: TextIO) -> int:
    try:
        ns = [int(n) for n in args.ns.split(",")]
    except ValueError:
        raise InvalidConfig(f"bad --ns {args.ns!r}") from None
    if not ns or min(ns) < 1:
        raise InvalidConfig("every N in --ns must be >= 1")
    top = max(ns)
    configs = [_pipeline_config(args, m, top) for m in (args.modules or TABLE_ROWS)]
    stores = _load_stores(args, configs, need_corpus=True)
    try:
        cases = load_cases(args.cases, stores.graph)
    except MalformedRecord as exc:
        print(f"error: {args.cases}: {exc}", file=err)
        return 2
    for report in evaluate_ablations(
        stores, cases, configs, ns, workers=args.threads, holdout=not args.no_holdout
    ):
        print("\n".join(report.lines()), file=out)
    return 0


def cmd_serve(args, out: TextIO, err: TextIO, stdin: TextIO) -> int:
    base = _pipeline_config(args, args.modules)
    stores = _load_stores(args, [base])
    for line in stdin:
        if not line.strip():
            continue
        rid = line.split("\t", 1)[0].strip() or "-"
        try:
            request = parse_serve_record(line)
            config = base
            if args.pool_size is None:
                config = _pipeline_config(args, args.modules, request.top_n)
            resp = run_pipeline(request, stores, config, workers=args.threads)
        except (ExrecError, ValueError) as exc:
            detail = exc.cause if isinstance(exc, CaseError) else exc
            print(f"ERR\t{rid}\t{type(detail).__name__}: {detail}", file=out, flush=True)
            continue
        _emit_warnings(resp, err)
        print(resp.format(), file=out, flush=True)
    return 0


def main(argv: Sequence[str] | None = None, stdin: TextIO | None = None,
         out: TextIO | None = None, err: TextIO | None = None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 1
    try:
        if args.command == "synth":
            return cmd_synth(args, out, err)
        if args.command == "recommend":
            return cmd_recommend(args, out, err)
        if args.command == "evaluate":
            return cmd_evaluate(args, out, err)
        return cmd_serve(args, out, err, stdin or sys.stdin)
    except (ExrecError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=err)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
