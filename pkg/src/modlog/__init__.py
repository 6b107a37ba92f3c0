"""Learn from search logs which query modification strategies lead to clicks."""

__version__ = "0.1.0"

from .kgraph import Graph, load_ntriples
from .logmodel import QueryPair, QueryRecord, extract_pairs, label_success, parse_log, sessionize
from .metrics import Stratum, SuccessStats, isr, success_rate
from .porter import porter_stem
from .report import AnalysisConfig, run_analysis
from .semrel import (
    ModificationType,
    RelationPath,
    SemanticClass,
    SemanticModificationTyper,
    abstract_path,
    classify_semantic,
    match_query,
    relate_queries,
    shortest_relations,
)
from .termmod import TermModification, TermModificationClassifier, classify_term_mod

__all__ = [
    "AnalysisConfig",
    "Graph",
    "ModificationType",
    "QueryPair",
    "QueryRecord",
    "RelationPath",
    "SemanticClass",
    "SemanticModificationTyper",
    "Stratum",
    "SuccessStats",
    "TermModification",
    "TermModificationClassifier",
    "abstract_path",
    "classify_semantic",
    "classify_term_mod",
    "extract_pairs",
    "isr",
    "label_success",
    "load_ntriples",
    "match_query",
    "parse_log",
    "porter_stem",
    "relate_queries",
    "run_analysis",
    "sessionize",
    "shortest_relations",
    "success_rate",
]
