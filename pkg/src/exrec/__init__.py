"""Exercise recommendation by budgeted random walks on a KC-exercise-material graph."""

from exrec.diversity import BuiltinEmbeddings, EmbeddingTable, dedupe, distinct_2, load_embeddings, tokenize
from exrec.graph import Kind, NodeId, TripartiteGraph, load_graph
from exrec.pipeline import PipelineConfig, Request, Stores, run_pipeline
from exrec.scope import Progress, SyllabusOrder, load_syllabus, restrict
from exrec.walker import CandidateList, QuerySet, VisitCounter, WalkConfig, run_walks, top_candidates

__version__ = "0.1.0"
