"""Permutations, minimal I-MAPs and covered-arrow moves."""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .citest import CiOracle
from .errors import InvalidArgumentError, InvalidMoveError
from .graph import Arrow, Dag, is_covered, reverse_arrow

Permutation = tuple[int, ...]


def as_permutation(order: Iterable[int], p: int | None = None) -> Permutation:
    perm = tuple(int(v) for v in order)
    n = len(perm) if p is None else p
    if sorted(perm) != list(range(n)):
        raise InvalidArgumentError(f"{list(perm)} is not a permutation of 0..{n - 1}")
    return perm


def random_permutation(p: int, rng: np.random.Generator) -> Permutation:
    return tuple(int(v) for v in rng.permutation(p))


def conditioning_set(perm: Sequence[int], i: int, j: int) -> frozenset[int]:
    """Nodes up to the later of ``i`` and ``j`` in ``perm``, minus the pair."""
    if i == j:
        raise InvalidArgumentError("conditioning set needs two distinct nodes")
    try:
        last = max(perm.index(i), perm.index(j))
    except ValueError:
        raise InvalidArgumentError(f"nodes {i}, {j} not both in permutation {list(perm)}") from None
    return frozenset(perm[: last + 1]) - {i, j}


def minimal_imap(perm: Sequence[int], oracle: CiOracle, regime: int = 0) -> Dag:
    """The DAG assigned to ``perm`` by the prefix-conditioning rule.

    ``perm[a] -> perm[b]`` (``a < b``) is kept exactly when the oracle reports
    dependence given everything up to position ``b`` except the pair.
    Queries are issued with ``a`` ascending, then ``b``.
    """
    perm = tuple(perm)
    p = len(perm)
    arrows = []
    for a in range(p):
        u = perm[a]
        for b in range(a + 1, p):
            v = perm[b]
            given = perm[:a] + perm[a + 1 : b]
            if not oracle.is_independent(u, v, given, regime):
                arrows.append((u, v))
    return Dag(p, frozenset(arrows))


def linear_extension(dag: Dag) -> Permutation:
    """Topological order of ``dag`` with ties broken towards the smallest node."""
    return dag.topological_order()


def reverse_covered(dag: Dag, arrow: Arrow) -> Dag:
    i, j = arrow
    if not dag.has_arrow(i, j):
        raise InvalidMoveError(f"arrow {i}->{j} is not in the graph")
    if not is_covered(dag, arrow):
        raise InvalidMoveError(f"arrow {i}->{j} is not covered")
    return reverse_arrow(dag, arrow)
