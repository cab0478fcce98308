"""Conditional-independence oracles.

Two oracles share one interface: :class:`DSepOracle` answers from
d-separation in a known DAG and :class:`DataOracle` answers with a Gaussian
partial-correlation test (Fisher's z) on per-regime samples. Both cache
answers under an order-normalized :class:`CiQuery` key.
"""

from __future__ import annotations

import math
import warnings
from abc import ABC, abstractmethod
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.stats import norm

from .errors import InsufficientSamplesError, InvalidArgumentError, NumericalDegeneracyError
from .graph import Dag, InterventionFamily, d_separated, interventional_dag

# relative tolerance below which a column counts as constant
_ZERO_VARIANCE_RTOL = 1e-12
# conditioning blocks worse than this are treated as singular
_MAX_CONDITION = 1e12


class CiQuery(NamedTuple):
    """Canonical form of "is i independent of j given s in regime k"."""

    i: int
    j: int
    s: tuple[int, ...]
    regime: int

    @classmethod
    def make(cls, i: int, j: int, s: Iterable[int] = (), regime: int = 0) -> "CiQuery":
        i, j = int(i), int(j)
        s = tuple(sorted({int(v) for v in s}))
        if i == j:
            raise InvalidArgumentError(f"query needs two distinct nodes, got {i} twice")
        if i in s or j in s:
            raise InvalidArgumentError(f"conditioning set {list(s)} contains a queried node")
        if i > j:
            i, j = j, i
        return cls(i, j, s, int(regime))


class RegimeData:
    """Samples from one regime plus cached sufficient statistics.

    Columns with (numerically) zero variance get correlation 0 with every
    other column and a warning is issued, so they behave as independent noise
    instead of producing NaNs.
    """

    def __init__(self, samples):
        x = np.array(samples, dtype=float)
        if x.ndim != 2:
            raise InvalidArgumentError(f"samples must be a 2-d array, got shape {x.shape}")
        if x.shape[0] < 1:
            raise InsufficientSamplesError("a regime needs at least one sample")
        x.setflags(write=False)
        self.samples = x

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def p(self) -> int:
        return self.samples.shape[1]

    def __repr__(self):
        return f"RegimeData(n={self.n}, p={self.p})"

    @cached_property
    def mean(self) -> np.ndarray:
        return self.samples.mean(axis=0)

    @cached_property
    def cov(self) -> np.ndarray:
        """Maximum-likelihood covariance (divides by n)."""
        centered = self.samples - self.mean
        c = centered.T @ centered / self.n
        return (c + c.T) / 2

    @cached_property
    def degenerate(self) -> tuple[int, ...]:
        """Columns treated as constant."""
        scale = np.maximum(1.0, np.abs(self.samples).max(axis=0))
        sd = np.sqrt(np.clip(np.diag(self.cov), 0.0, None))
        return tuple(int(v) for v in np.flatnonzero(sd <= _ZERO_VARIANCE_RTOL * scale))

    @cached_property
    def corr(self) -> np.ndarray:
        cov = self.cov
        sd = np.sqrt(np.clip(np.diag(cov), 0.0, None))
        bad = list(self.degenerate)
        sd[bad] = 1.0
        r = cov / np.outer(sd, sd)
        if bad:
            warnings.warn(
                f"zero-variance columns {bad}: correlations set to 0", RuntimeWarning, stacklevel=2
            )
            r[bad, :] = 0.0
            r[:, bad] = 0.0
        np.fill_diagonal(r, 1.0)
        r = np.clip(r, -1.0, 1.0)
        r.setflags(write=False)
        return r


def partial_correlation(data: RegimeData, i: int, j: int, s: Iterable[int] = ()) -> float:
    """Sample partial correlation of columns ``i`` and ``j`` given ``s``.

    Computed from the correlation submatrix on ``{i, j} | s``: the 2x2
    conditional block ``R_ab - R_as R_ss^{-1} R_sb`` is the inverse of the
    matching block of the precision matrix, so this equals
    ``-P_ij / sqrt(P_ii P_jj)`` while still returning +-1 when the residuals
    of ``i`` and ``j`` are collinear.

    Raises
    ------
    NumericalDegeneracyError
        If the conditioning block is singular, or ``i`` or ``j`` is an exact
        linear function of ``s``.
    """
    s = sorted({int(v) for v in s})
    if i == j or i in s or j in s:
        raise InvalidArgumentError("i, j must be distinct and outside the conditioning set")
    if len(s) > data.n - 2:
        raise InsufficientSamplesError(
            f"conditioning on {len(s)} variables needs at least {len(s) + 2} samples, have {data.n}"
        )
    r = data.corr
    if not s:
        return float(r[i, j])
    ab = [i, j]
    r_ss = r[np.ix_(s, s)]
    if np.linalg.cond(r_ss) > _MAX_CONDITION:
        raise NumericalDegeneracyError(s)
    r_as = r[np.ix_(ab, s)]
    cond = r[np.ix_(ab, ab)] - r_as @ np.linalg.solve(r_ss, r_as.T)
    if cond[0, 0] <= 1e-12 or cond[1, 1] <= 1e-12:
        raise NumericalDegeneracyError([i, j, *s])
    rho = cond[0, 1] / math.sqrt(cond[0, 0] * cond[1, 1])
    return float(min(1.0, max(-1.0, rho)))


def fisher_z_statistic(rho: float, n: int, cond_size: int) -> float:
    """``sqrt(n - |s| - 3) * |atanh(rho)|``; infinite when ``|rho| = 1``."""
    if abs(rho) >= 1.0:
        return math.inf
    return math.sqrt(n - cond_size - 3) * abs(math.atanh(rho))


def gaussian_ci_test(
    data: RegimeData, i: int, j: int, s: Iterable[int] = (), alpha: float = 0.01
) -> bool:
    """Fisher-z partial-correlation test. Returns ``True`` for independence."""
    if not 0.0 <= alpha <= 1.0:
        raise InvalidArgumentError(f"alpha must lie in [0, 1], got {alpha}")
    s = tuple(s)
    if data.n - len(s) - 3 < 1:
        raise InsufficientSamplesError(
            f"Fisher z with |s|={len(s)} needs n >= {len(s) + 4}, have {data.n}"
        )
    rho = partial_correlation(data, i, j, s)
    stat = fisher_z_statistic(rho, data.n, len(s))
    if math.isinf(stat):
        return False
    return not stat > norm.ppf(1.0 - alpha / 2.0)


class CiOracle(ABC):
    """Answers conditional-independence queries, one regime at a time.

    Answers are memoized by canonical query, so repeated and swapped queries
    are answered identically and evaluated once. ``n_tests`` counts the
    evaluations that actually ran.
    """

    def __init__(self, n_regimes: int):
        self.n_regimes = n_regimes
        self.n_tests = 0
        self._cache: dict[CiQuery, bool] = {}

    def is_independent(self, i: int, j: int, s: Iterable[int] = (), regime: int = 0) -> bool:
        q = CiQuery.make(i, j, s, regime)
        if not 0 <= q.regime < self.n_regimes:
            raise InvalidArgumentError(f"regime {q.regime} out of range 0..{self.n_regimes - 1}")
        try:
            return self._cache[q]
        except KeyError:
            pass
        verdict = bool(self._evaluate(q))
        self.n_tests += 1
        self._cache[q] = verdict
        return verdict

    @abstractmethod
    def _evaluate(self, q: CiQuery) -> bool: ...


class DSepOracle(CiOracle):
    """Exact oracle reading d-separation off each regime's intervention DAG."""

    def __init__(self, truth: Dag, family: InterventionFamily):
        family.validate_for(truth.p)
        super().__init__(len(family))
        self.truth = truth
        self.family = family
        self._graphs = [interventional_dag(truth, t) for t in family]

    def _evaluate(self, q):
        return d_separated(self._graphs[q.regime], q.i, q.j, q.s)


class DataOracle(CiOracle):
    """Gaussian CI testing on per-regime samples at significance ``alpha``."""

    def __init__(self, dataset: Sequence[RegimeData], alpha: float):
        if not dataset:
            raise InvalidArgumentError("a data oracle needs at least one regime")
        if not 0.0 <= alpha <= 1.0:
            raise InvalidArgumentError(f"alpha must lie in [0, 1], got {alpha}")
        super().__init__(len(dataset))
        self.dataset = list(dataset)
        self.alpha = alpha

    def _evaluate(self, q):
        return gaussian_ci_test(self.dataset[q.regime], q.i, q.j, q.s, self.alpha)


def dsep_oracle(truth: Dag, family: InterventionFamily) -> DSepOracle:
    return DSepOracle(truth, family)


def data_oracle(dataset: Sequence[RegimeData], alpha: float) -> DataOracle:
    return DataOracle(dataset, alpha)
