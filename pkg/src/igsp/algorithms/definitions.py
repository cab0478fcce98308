"""Regime index sets, I-covered arrows and I-contradicting arrows."""

from __future__ import annotations

from typing import Sequence

from ..citest import CiOracle
from ..errors import InvalidArgumentError
from ..graph import Arrow, Dag, InterventionFamily, covered_arrows, is_covered
from ..imap import conditioning_set


def index_sets(family: InterventionFamily, i: int, j: int) -> tuple[frozenset[int], frozenset[int]]:
    """Regimes intervening on ``i`` but not ``j``, and on ``j`` but not ``i``."""
    if i == j:
        raise InvalidArgumentError("index sets need two distinct nodes")
    i_not_j = frozenset(k for k, t in enumerate(family) if i in t and j not in t)
    j_not_i = frozenset(k for k, t in enumerate(family) if j in t and i not in t)
    return i_not_j, j_not_i


def is_i_covered(
    dag: Dag,
    arrow: Arrow,
    family: InterventionFamily,
    oracle: CiOracle,
    perm: Sequence[int],
) -> bool:
    """Whether a covered arrow of ``dag = G_perm`` is I-covered.

    The arrow qualifies when no regime intervenes on its tail alone, or when in
    every such regime the tail and head test independent given the
    prefix-conditioning set of ``perm``, i.e. the arrow is missing from that
    regime's minimal I-MAP at ``perm``.
    """
    if not is_covered(dag, arrow):
        raise InvalidArgumentError(f"arrow {arrow[0]}->{arrow[1]} is not a covered arrow")
    i, j = arrow
    i_not_j, _ = index_sets(family, i, j)
    if not i_not_j:
        return True
    given = conditioning_set(tuple(perm), i, j)
    return all(oracle.is_independent(i, j, given, k) for k in sorted(i_not_j))


def i_covered_arrows(
    dag: Dag, family: InterventionFamily, oracle: CiOracle, perm: Sequence[int]
) -> frozenset[Arrow]:
    return frozenset(a for a in covered_arrows(dag) if is_i_covered(dag, a, family, oracle, perm))


def is_i_contradicting(i: int, j: int, family: InterventionFamily, oracle: CiOracle) -> bool:
    i_not_j, j_not_i = index_sets(family, i, j)
    if not (i_not_j or j_not_i):
        return False
    if i_not_j and not all(oracle.is_independent(i, j, (), k) for k in sorted(i_not_j)):
        return False
    if j_not_i and all(oracle.is_independent(i, j, (), k) for k in sorted(j_not_i)):
        return False
    return True


def count_i_contradicting(dag: Dag, family: InterventionFamily, oracle: CiOracle) -> int:
    return sum(is_i_contradicting(i, j, family, oracle) for i, j in sorted(dag.arrows))
