"""Linear Gaussian structural equation models with hard interventions.

Rows are samples: ``X = X A + eps``, with ``A[i, j]`` the weight of the
arrow ``i -> j``. An intervened node ignores its parents and is drawn from an
independent normal (standard normal by default).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .citest import RegimeData
from .errors import InvalidArgumentError
from .graph import Arrow, Dag


@dataclass(frozen=True)
class SemModel:
    dag: Dag
    weights: Mapping[Arrow, float]
    noise_sd: tuple[float, ...] = field(default=())

    def __post_init__(self):
        weights = {(int(i), int(j)): float(w) for (i, j), w in self.weights.items()}
        if set(weights) != set(self.dag.arrows):
            raise InvalidArgumentError("weights must be keyed exactly by the DAG's arrows")
        zero = [a for a, w in weights.items() if w == 0.0]
        if zero:
            raise InvalidArgumentError(f"zero weights on arrows {sorted(zero)}")
        noise = tuple(float(s) for s in self.noise_sd) or (1.0,) * self.dag.p
        if len(noise) != self.dag.p or any(not s > 0 for s in noise):
            raise InvalidArgumentError(f"need {self.dag.p} positive noise scales, got {noise}")
        object.__setattr__(self, "weights", dict(sorted(weights.items())))
        object.__setattr__(self, "noise_sd", noise)

    @property
    def p(self) -> int:
        return self.dag.p

    def weight_matrix(self) -> np.ndarray:
        a = np.zeros((self.p, self.p))
        for (i, j), w in self.weights.items():
            a[i, j] = w
        return a


def random_dag(p: int, density: float, rng: np.random.Generator) -> Dag:
    """Erdos-Renyi DAG in the identity order with expected neighbourhood size ``density``.

    Each arrow ``i -> j`` (``i < j``) is included independently with
    probability ``density / (p - 1)``, giving ``density * p / 2`` arrows on
    average.
    """
    if p < 1:
        raise InvalidArgumentError(f"need at least one node, got p={p}")
    if density < 0 or (p > 1 and density > p - 1):
        raise InvalidArgumentError(f"density must lie in [0, {p - 1}], got {density}")
    if p == 1:
        return Dag(1)
    prob = density / (p - 1)
    pairs = list(itertools.combinations(range(p), 2))
    keep = rng.random(len(pairs)) < prob
    return Dag(p, frozenset(pr for pr, k in zip(pairs, keep) if k))


def random_weights(dag: Dag, c: float, rng: np.random.Generator) -> SemModel:
    """Weights uniform on ``[-1, -c) U (c, 1]``, drawn in sorted arrow order."""
    if not 0.0 <= c < 1.0:
        raise InvalidArgumentError(f"lower weight bound c must lie in [0, 1), got {c}")
    weights = {}
    for arrow in sorted(dag.arrows):
        magnitude = 1.0 - rng.random() * (1.0 - c)
        sign = -1.0 if rng.random() < 0.5 else 1.0
        weights[arrow] = sign * magnitude
    return SemModel(dag, weights)


def random_targets(p: int, size: int, rng: np.random.Generator) -> frozenset[int]:
    """A target set of ``size`` nodes drawn uniformly without replacement."""
    if not 0 <= size <= p:
        raise InvalidArgumentError(f"target size must lie in [0, {p}], got {size}")
    return frozenset(int(v) for v in rng.choice(p, size=size, replace=False))


def sample(
    model: SemModel,
    n: int,
    target: Iterable[int],
    rng: np.random.Generator,
    intervention_mean: float = 0.0,
    intervention_sd: float = 1.0,
) -> RegimeData:
    """Draw ``n`` samples from the regime that intervenes on ``target``."""
    if n < 1:
        raise InvalidArgumentError(f"sample count must be positive, got {n}")
    target = frozenset(int(v) for v in target)
    if any(not 0 <= v < model.p for v in target):
        raise InvalidArgumentError(f"targets {sorted(target)} outside nodes 0..{model.p - 1}")
    z = rng.standard_normal((n, model.p))
    x = np.empty_like(z)
    for j in model.dag.topological_order():
        if j in target:
            x[:, j] = intervention_mean + intervention_sd * z[:, j]
            continue
        x[:, j] = model.noise_sd[j] * z[:, j]
        for i in sorted(model.dag.parents(j)):
            x[:, j] += model.weights[(i, j)] * x[:, i]
    return RegimeData(x)


def implied_covariance(
    model: SemModel, target: Iterable[int] = (), intervention_sd: float = 1.0
) -> np.ndarray:
    """Population covariance of the regime intervening on ``target``."""
    target = sorted(set(target))
    a = model.weight_matrix()
    a[:, target] = 0.0
    var = np.array(model.noise_sd) ** 2
    var[target] = intervention_sd**2
    m = np.linalg.inv(np.eye(model.p) - a)
    return m.T @ np.diag(var) @ m
