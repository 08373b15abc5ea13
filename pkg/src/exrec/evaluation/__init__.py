"""Evaluation harness, walk oracle and synthetic data."""

from exrec.evaluation.harness import (
    DEFAULT_NS,
    EvalCase,
    EvalReport,
    evaluate,
    evaluate_ablations,
    load_cases,
    make_case,
    random_baseline_recall,
)
from exrec.evaluation.metrics import aggregate_recall, recall_at_n, total_variation
from exrec.evaluation.oracle import oracle_distribution, stationary_oracle, transition_matrix
from exrec.evaluation.synth import SynthConfig, SynthDataset, synth_dataset

__all__ = [
    "DEFAULT_NS", "EvalCase", "EvalReport", "evaluate", "evaluate_ablations", "load_cases",
    "make_case", "random_baseline_recall",
    "aggregate_recall", "recall_at_n", "total_variation",
    "oracle_distribution", "stationary_oracle", "transition_matrix",
    "SynthConfig", "SynthDataset", "synth_dataset",
]
