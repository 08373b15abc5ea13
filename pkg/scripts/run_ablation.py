"""Generate a synthetic dataset and print the four-row ablation table."""

import argparse
import tempfile
import time

from exrec.diversity import BuiltinEmbeddings
from exrec.evaluation.harness import evaluate_ablations, load_cases
from exrec.evaluation.synth import SynthConfig, synth_dataset
from exrec.graph import load_graph
from exrec.pipeline import TABLE_ROWS, PipelineConfig, Stores
from exrec.scope import load_syllabus
from exrec.diversity import load_corpus
from exrec.walker import WalkConfig


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--distractors", type=float, default=0.1)
    ap.add_argument("--near-duplicates", type=float, default=0.1)
    ap.add_argument("--materials", type=int, default=300)
    ap.add_argument("--exercises", type=int, default=3000)
    ap.add_argument("--total-steps", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = SynthConfig(
        exercise_count=args.exercises,
        material_count=args.materials,
        near_duplicate_fraction=args.near_duplicates,
        out_of_scope_distractor_fraction=args.distractors,
        seed=args.seed,
    )
    with tempfile.TemporaryDirectory() as tmp:
        paths = synth_dataset(cfg).write(tmp, embeddings=False)
        graph = load_graph(paths["graph"])
        corpus = load_corpus(paths["corpus"])
        stores = Stores(graph, BuiltinEmbeddings(corpus), load_syllabus(paths["syllabus"]), corpus)
        cases = load_cases(paths["cases"], graph)

    base = PipelineConfig(WalkConfig(0.04, args.total_steps, 400, args.seed), top_n=100)
    configs = [base.with_modules(m) for m in TABLE_ROWS]
    t0 = time.perf_counter()
    reports = evaluate_ablations(stores, cases, configs)
    elapsed = time.perf_counter() - t0

    ns = reports[0].ns
    head = ["model"] + [f"{k}@{n}" for n in ns for k in ("macro", "micro")] + ["distinct2"]
    print("\t".join(head))
    for r in reports:
        vals = [f"{100 * v:.2f}" for n in ns for v in (r.macro_recall[n], r.micro_recall[n])]
        print("\t".join([r.modules, *vals, f"{100 * r.distinct2:.2f}"]))
    print(f"# {len(cases)} cases, {elapsed:.1f} s")


if __name__ == "__main__":
    main()
