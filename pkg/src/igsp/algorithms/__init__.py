"""Search procedures, their scores and the interventional arrow classes."""

from .definitions import (
    count_i_contradicting,
    i_covered_arrows,
    index_sets,
    is_i_contradicting,
    is_i_covered,
)
from .score import (
    LocalScore,
    ScoreConfig,
    interventional_bic,
    node_score,
    score_diff_covered_reversal,
)
from .search import SearchConfig, SearchResult, TraceStep, algorithm1, igsp

__all__ = [
    "LocalScore",
    "ScoreConfig",
    "SearchConfig",
    "SearchResult",
    "TraceStep",
    "algorithm1",
    "count_i_contradicting",
    "i_covered_arrows",
    "igsp",
    "index_sets",
    "interventional_bic",
    "is_i_contradicting",
    "is_i_covered",
    "node_score",
    "score_diff_covered_reversal",
]
