"""Gaussian interventional BIC and its covered-reversal shortcut.

Each regime keeps its own linear-Gaussian parameters, and log-likelihoods
are taken per sample, so

    Score(G) = sum_k [ -1/2 sum_j log sigma^2_{j,k}(pa_{G^k}(j)) - lambda_k |G^k| / 2 ]

where ``sigma^2_{j,k}`` is the maximum-likelihood residual variance of node
``j`` regressed (with intercept) on its parents in regime ``k``. Constants
shared by all DAGs are dropped. The factor 1/2 on the penalty is the BIC
convention (``log n / 2`` per parameter, per sample) and is what makes the
reversal identity in :func:`score_diff_covered_reversal` exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from ..citest import RegimeData, partial_correlation
from ..errors import (
    InsufficientSamplesError,
    InvalidArgumentError,
    NumericalDegeneracyError,
)
from ..graph import Arrow, Dag, InterventionFamily, interventional_dag, is_covered
from .definitions import index_sets

OBSERVATIONAL = InterventionFamily()

# parent sets up to this size are searched exhaustively
EXHAUSTIVE_PARENT_LIMIT = 4


@dataclass(frozen=True)
class ScoreConfig:
    """Per-regime penalties ``lambdas`` and the search slack ``delta``."""

    lambdas: tuple[float, ...]
    delta: float

    def __post_init__(self):
        lambdas = tuple(float(v) for v in self.lambdas)
        if not lambdas or any(not v > 0 for v in lambdas):
            raise InvalidArgumentError(f"penalties must be positive, got {lambdas}")
        if not self.delta > sum(lambdas):
            raise InvalidArgumentError(
                f"slack delta={self.delta} must exceed the penalty sum {sum(lambdas)}"
            )
        object.__setattr__(self, "lambdas", lambdas)

    @classmethod
    def default(
        cls, dataset: Sequence[RegimeData], delta: float | None = None, delta_factor: float = 2.0
    ) -> "ScoreConfig":
        """``lambda_k = log(n_k) / n_k`` and ``delta = delta_factor * sum(lambda)``."""
        lambdas = tuple(math.log(d.n) / d.n for d in dataset)
        if delta is None:
            delta = delta_factor * sum(lambdas)
        return cls(lambdas, delta)


def _residual_sum(gram: np.ndarray, j: int, parents: Sequence[int]) -> float:
    if not parents:
        rss = float(gram[j, j])
    else:
        idx = list(parents)
        g_pp = gram[np.ix_(idx, idx)]
        if np.linalg.cond(g_pp) > 1e12:
            raise NumericalDegeneracyError(idx)
        g_pj = gram[idx, j]
        rss = float(gram[j, j] - g_pj @ np.linalg.solve(g_pp, g_pj))
    if not rss > 1e-12 * max(float(gram[j, j]), 1e-300):
        raise NumericalDegeneracyError([j, *parents], f"node {j} is fit exactly by {list(parents)}")
    return rss


def node_score(
    j: int,
    parents: Iterable[int],
    dataset: Sequence[RegimeData],
    family: InterventionFamily,
) -> float:
    """Pooled per-node Gaussian log-likelihood term.

    Regresses node ``j`` on ``parents`` by one least-squares fit over every
    regime that does not intervene on ``j`` (each regime centered on its own
    mean) and returns ``-1/2 * (n_minus / n) * log(RSS / n_minus)``.
    """
    parents = sorted({int(v) for v in parents})
    if len(dataset) != len(family):
        raise InvalidArgumentError(f"{len(dataset)} data regimes for {len(family)} targets")
    regimes = [k for k, t in enumerate(family) if j not in t]
    n_total = sum(d.n for d in dataset)
    n_minus = sum(dataset[k].n for k in regimes)
    if n_minus <= len(parents) + 1:
        raise InsufficientSamplesError(
            f"node {j}: {n_minus} pooled samples for {len(parents)} parents"
        )
    gram = sum(dataset[k].n * dataset[k].cov for k in regimes)
    rss = _residual_sum(gram, j, parents)
    return -0.5 * (n_minus / n_total) * math.log(rss / n_minus)


def interventional_bic(
    dag: Dag,
    dataset: Sequence[RegimeData],
    family: InterventionFamily,
    cfg: ScoreConfig,
) -> float:
    if len(dataset) != len(family) or len(cfg.lambdas) != len(family):
        raise InvalidArgumentError("dataset, family and penalties must align regime by regime")
    family.validate_for(dag.p)
    total = 0.0
    for k, target in enumerate(family):
        g_k = interventional_dag(dag, target)
        for j in dag.nodes:
            total += node_score(j, g_k.parents(j), [dataset[k]], OBSERVATIONAL)
        total -= 0.5 * cfg.lambdas[k] * len(g_k)
    return total


def score_diff_covered_reversal(
    dag: Dag,
    arrow: Arrow,
    dataset: Sequence[RegimeData],
    family: InterventionFamily,
    cfg: ScoreConfig,
) -> float:
    """Score change from reversing the covered arrow ``i -> j``.

    Only regimes that intervene on exactly one endpoint contribute, each
    through the regime's partial correlation of ``i`` and ``j`` given the
    parents of ``i``.
    """
    if not is_covered(dag, arrow):
        raise InvalidArgumentError(f"arrow {arrow[0]}->{arrow[1]} is not covered")
    i, j = arrow
    given = dag.parents(i)
    i_not_j, j_not_i = index_sets(family, i, j)

    def term(k):
        rho = partial_correlation(dataset[k], i, j, given)
        if rho * rho >= 1.0:
            raise NumericalDegeneracyError([i, j, *sorted(given)])
        return math.log1p(-rho * rho) + cfg.lambdas[k]

    diff = 0.0
    for k in sorted(j_not_i):
        diff -= 0.5 * term(k)
    for k in sorted(i_not_j):
        diff += 0.5 * term(k)
    return diff


class LocalScore:
    """Cached, node-decomposed form of :func:`interventional_bic` for search.

    ``total(dag)`` equals ``interventional_bic(dag, ...)``; the per-node pieces
    let the best DAG consistent with a permutation be found one node at a
    time.
    """

    def __init__(self, dataset: Sequence[RegimeData], family: InterventionFamily, cfg: ScoreConfig):
        if len(dataset) != len(family) or len(cfg.lambdas) != len(family):
            raise InvalidArgumentError("dataset, family and penalties must align regime by regime")
        self.dataset = list(dataset)
        self.family = family
        self.cfg = cfg
        p = self.dataset[0].p
        family.validate_for(p)
        self.p = p
        self._free = [tuple(k for k, t in enumerate(family) if j not in t) for j in range(p)]
        self._node_cache: dict[tuple[int, frozenset[int]], float] = {}
        self._best_cache: dict[tuple[int, tuple[int, ...]], frozenset[int]] = {}
        self._constant = [
            sum(self._regime_term(k, j, ()) for k, t in enumerate(family) if j in t)
            for j in range(p)
        ]

    def _regime_term(self, k: int, j: int, parents: Sequence[int]) -> float:
        return -0.5 * math.log(_residual_sum(self.dataset[k].cov, j, parents))

    def node(self, j: int, parents: frozenset[int]) -> float:
        key = (j, parents)
        try:
            return self._node_cache[key]
        except KeyError:
            pass
        pa = sorted(parents)
        value = sum(
            self._regime_term(k, j, pa) - 0.5 * self.cfg.lambdas[k] * len(pa) for k in self._free[j]
        )
        self._node_cache[key] = value
        return value

    def total(self, dag: Dag) -> float:
        return sum(self.node(j, dag.parents(j)) + self._constant[j] for j in dag.nodes)

    def best_parents(self, j: int, candidates: Iterable[int]) -> frozenset[int]:
        """Highest-scoring parent set drawn from ``candidates``.

        Exhaustive over subsets of size up to ``EXHAUSTIVE_PARENT_LIMIT``,
        then greedy forward additions from the best of those.
        """
        cands = tuple(sorted(candidates))
        key = (j, cands)
        if key in self._best_cache:
            return self._best_cache[key]
        best = frozenset()
        best_val = self.node(j, best)
        for size in range(1, min(EXHAUSTIVE_PARENT_LIMIT, len(cands)) + 1):
            for combo in itertools.combinations(cands, size):
                val = self.node(j, frozenset(combo))
                if val > best_val:
                    best, best_val = frozenset(combo), val
        while len(cands) > EXHAUSTIVE_PARENT_LIMIT:
            step, step_val = None, best_val
            for c in cands:
                if c in best:
                    continue
                val = self.node(j, best | {c})
                if val > step_val:
                    step, step_val = best | {c}, val
            if step is None:
                break
            best, best_val = step, step_val
        self._best_cache[key] = best
        return best

    def best_dag(self, perm: Sequence[int]) -> Dag:
        """Highest-scoring DAG whose arrows all point forward in ``perm``."""
        arrows = []
        for pos, j in enumerate(perm):
            arrows.extend((i, j) for i in self.best_parents(j, perm[:pos]))
        return Dag(self.p, frozenset(arrows))
