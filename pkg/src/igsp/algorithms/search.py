"""Permutation searches: IGSP and the slack-scored greedy search.

Both walk the space of minimal I-MAPs by reversing covered arrows and
rebuilding the graph from a linear extension of the result. IGSP minimizes
the edge count using only I-covered reversals, then the number of
I-contradicting arrows; the scored search maximizes the interventional BIC,
letting intermediate moves lose up to ``delta``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

from ..citest import CiOracle, RegimeData
from ..errors import InvalidArgumentError
from ..graph import Arrow, Dag, InterventionFamily, covered_arrows, reverse_arrow
from ..imap import Permutation, as_permutation, linear_extension, minimal_imap, random_permutation
from ..rng import derive_rng
from .definitions import count_i_contradicting, is_i_contradicting, is_i_covered
from .score import LocalScore, ScoreConfig

# a committed score gain must exceed this, so rounding noise on
# score-equivalent moves cannot cycle the search
_IMPROVEMENT_TOL = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    """Search bounds. ``max_depth=None`` searches plateaus without a depth limit."""

    max_depth: int | None = 4
    max_restarts: int = 0
    rng_seed: int = 0

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 1:
            raise InvalidArgumentError(f"max_depth must be at least 1, got {self.max_depth}")
        if self.max_restarts < 0:
            raise InvalidArgumentError(f"max_restarts must be nonnegative, got {self.max_restarts}")


@dataclass(frozen=True)
class TraceStep:
    """One accepted event of a search run.

    ``kind`` is ``"start"``, ``"sparser"`` or ``"improve"`` (a committed
    move), ``"plateau-best"`` (IGSP's final contradicting-arrow choice) or
    ``"depth-limit"`` (a plateau was cut off at ``max_depth``).
    """

    kind: str
    run: int
    n_edges: int
    moves: tuple[Arrow, ...] = ()
    n_contradicting: int | None = None
    score: float | None = None


@dataclass(frozen=True)
class SearchResult:
    perm: Permutation
    dag: Dag
    score: Union[float, tuple[int, int]]
    trace: tuple[TraceStep, ...]
    depth_limited: bool = False


def _starts(pi0: Sequence[int], config: SearchConfig) -> list[Permutation]:
    p = len(pi0)
    starts = [as_permutation(pi0)]
    for r in range(1, config.max_restarts + 1):
        starts.append(random_permutation(p, derive_rng(config.rng_seed, r)))
    return starts


def _within(depth: int, max_depth: int | None) -> bool:
    return max_depth is None or depth < max_depth


# --------------------------------------------------------------------- IGSP


def igsp(
    oracle: CiOracle,
    family: InterventionFamily,
    pi0: Sequence[int],
    config: SearchConfig = SearchConfig(),
) -> SearchResult:
    """Interventional greedy sparsest-permutation search.

    Starting from the minimal I-MAP of ``pi0`` (built from the observational
    regime), repeatedly run a depth-first search over sequences of I-covered
    arrow reversals that keep the edge count, trying I-contradicting arrows
    first, and restart from the first strictly sparser minimal I-MAP found.
    Once no sparser graph is reachable, return the plateau member with the
    fewest I-contradicting arrows (the first one met in DFS order on ties).

    With ``config.max_restarts > 0`` further runs start from seeded random
    permutations; the result with the fewest edges, then fewest
    I-contradicting arrows, wins.
    """
    family.validate_for(len(pi0))
    if oracle.n_regimes < len(family):
        raise InvalidArgumentError(
            f"oracle covers {oracle.n_regimes} regimes but the family has {len(family)}"
        )
    best = None
    trace: list[TraceStep] = []
    limited = False
    for run, start in enumerate(_starts(pi0, config)):
        result = _igsp_run(oracle, family, start, config.max_depth, run)
        trace.extend(result.trace)
        limited |= result.depth_limited
        if best is None or result.score < best.score:
            best = result
    return SearchResult(best.perm, best.dag, best.score, tuple(trace), limited)


def _igsp_run(oracle, family, start, max_depth, run) -> SearchResult:
    perm = start
    dag = minimal_imap(perm, oracle, 0)
    trace = [TraceStep("start", run, len(dag), (), count_i_contradicting(dag, family, oracle))]
    limited = False
    while True:
        sparser, plateau_best, cut = _igsp_plateau(oracle, family, dag, perm, max_depth)
        limited |= cut
        if sparser is not None:
            perm, dag, moves = sparser
            trace.append(
                TraceStep("sparser", run, len(dag), moves, count_i_contradicting(dag, family, oracle))
            )
            continue
        n_contra, dag, perm, moves = plateau_best
        trace.append(TraceStep("plateau-best", run, len(dag), moves, n_contra))
        if limited:
            trace.append(TraceStep("depth-limit", run, len(dag)))
        return SearchResult(perm, dag, (len(dag), n_contra), tuple(trace), limited)


def _igsp_moves(dag, perm, family, oracle) -> list[Arrow]:
    """I-covered arrows, I-contradicting ones first, then by arrow."""
    moves = [a for a in sorted(covered_arrows(dag)) if is_i_covered(dag, a, family, oracle, perm)]
    moves.sort(key=lambda a: (not is_i_contradicting(a[0], a[1], family, oracle), a))
    return moves


def _igsp_plateau(oracle, family, root, root_perm, max_depth):
    """DFS over equal-size minimal I-MAPs reachable by I-covered reversals.

    Returns ``(sparser, plateau_best, depth_cut)`` where ``sparser`` is
    ``(perm, dag, moves)`` for the first strictly sparser graph, or None.
    """
    size = len(root)
    visited = {root.arrows: 0}
    best = (count_i_contradicting(root, family, oracle), root, root_perm, ())
    stack = [(root, root_perm, 0, ())]
    cut = False
    while stack:
        dag, perm, depth, path = stack.pop()
        children = []
        for arrow in _igsp_moves(dag, perm, family, oracle):
            tau = linear_extension(reverse_arrow(dag, arrow))
            g_tau = minimal_imap(tau, oracle, 0)
            moves = path + (arrow,)
            if len(g_tau) < size:
                return (tau, g_tau, moves), None, cut
            if len(g_tau) > size:
                continue
            d = depth + 1
            seen = visited.get(g_tau.arrows)
            if seen is not None and seen <= d:
                continue
            visited[g_tau.arrows] = d
            if seen is None:
                n_contra = count_i_contradicting(g_tau, family, oracle)
                if n_contra < best[0]:
                    best = (n_contra, g_tau, tau, moves)
            if _within(d, max_depth):
                children.append((g_tau, tau, d, moves))
            else:
                cut = True
        stack.extend(reversed(children))
    return None, best, cut


# ------------------------------------------------------- scored search (slack)


def algorithm1(
    dataset: Sequence[RegimeData],
    family: InterventionFamily,
    pi0: Sequence[int],
    cfg: ScoreConfig | None = None,
    search: SearchConfig = SearchConfig(),
) -> SearchResult:
    """Greedy permutation search on the interventional BIC with slack.

    Each permutation is mapped to its best-scoring consistent DAG (per-node
    parent selection). From the current permutation a depth-first search
    over covered-arrow reversals accepts intermediate moves that lose less
    than ``cfg.delta`` relative to their predecessor, and commits to the
    first permutation that beats the current score. The run stops when no
    such permutation is reachable within ``search.max_depth``.
    """
    if cfg is None:
        cfg = ScoreConfig.default(dataset)
    scorer = LocalScore(dataset, family, cfg)
    best = None
    trace: list[TraceStep] = []
    limited = False
    for run, start in enumerate(_starts(pi0, search)):
        result = _alg1_run(scorer, start, cfg.delta, search.max_depth, run)
        trace.extend(result.trace)
        limited |= result.depth_limited
        if best is None or result.score > best.score:
            best = result
    return SearchResult(best.perm, best.dag, best.score, tuple(trace), limited)


def _alg1_run(scorer: LocalScore, start, delta, max_depth, run) -> SearchResult:
    perm = start
    dag = scorer.best_dag(perm)
    score = scorer.total(dag)
    trace = [TraceStep("start", run, len(dag), score=score)]
    limited = False
    while True:
        found, cut = _alg1_dfs(scorer, dag, perm, score, delta, max_depth)
        limited |= cut
        if found is None:
            break
        perm, dag, score, moves = found
        trace.append(TraceStep("improve", run, len(dag), moves, score=score))
    if limited:
        trace.append(TraceStep("depth-limit", run, len(dag), score=score))
    return SearchResult(perm, dag, score, tuple(trace), limited)


def _alg1_dfs(scorer, root, root_perm, root_score, delta, max_depth):
    visited = {root.arrows: 0}
    stack = [(root, root_score, 0, ())]
    cut = False
    while stack:
        dag, score, depth, path = stack.pop()
        children = []
        for arrow in sorted(covered_arrows(dag)):
            tau = linear_extension(reverse_arrow(dag, arrow))
            g_tau = scorer.best_dag(tau)
            s_tau = scorer.total(g_tau)
            moves = path + (arrow,)
            if s_tau > root_score + _IMPROVEMENT_TOL:
                return (tau, g_tau, s_tau, moves), cut
            if not s_tau > score - delta:
                continue
            d = depth + 1
            seen = visited.get(g_tau.arrows)
            if seen is not None and seen <= d:
                continue
            visited[g_tau.arrows] = d
            if _within(d, max_depth):
                children.append((g_tau, s_tau, d, moves))
            else:
                cut = True
        stack.extend(reversed(children))
    return None, cut
