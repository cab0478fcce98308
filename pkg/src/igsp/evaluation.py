"""Recovery metrics and seeded Monte-Carlo sweeps."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .algorithms import ScoreConfig, SearchConfig, algorithm1, igsp
from .citest import DataOracle, DSepOracle, RegimeData
from .errors import InsufficientSamplesError, InvalidArgumentError, NumericalDegeneracyError
from .graph import Dag, InterventionFamily, i_markov_equivalent, skeleton
from .imap import random_permutation
from .rng import derive_rng
from .sem import SemModel, random_dag, random_targets, random_weights, sample

ALGORITHMS = ("igsp", "alg1")
ORACLES = ("data", "dsep")

# per-trial failures that are tallied instead of aborting a sweep
TRIAL_ERRORS = (InsufficientSamplesError, NumericalDegeneracyError, np.linalg.LinAlgError)


@dataclass(frozen=True)
class StructuralCounts:
    directed_tp: int
    directed_fp: int
    skeleton_tp: int
    skeleton_fp: int
    truth_edge_count: int

    def as_dict(self) -> dict[str, int]:
        return {
            "directed_tp": self.directed_tp,
            "directed_fp": self.directed_fp,
            "skeleton_tp": self.skeleton_tp,
            "skeleton_fp": self.skeleton_fp,
            "truth_edge_count": self.truth_edge_count,
        }


def _same_p(estimate: Dag, truth: Dag):
    if estimate.p != truth.p:
        raise InvalidArgumentError(f"graphs differ in size: {estimate.p} vs {truth.p} nodes")


def structural_metrics(estimate: Dag, truth: Dag) -> StructuralCounts:
    _same_p(estimate, truth)
    directed_tp = len(estimate.arrows & truth.arrows)
    skel_est, skel_true = skeleton(estimate), skeleton(truth)
    skeleton_tp = len(skel_est & skel_true)
    return StructuralCounts(
        directed_tp=directed_tp,
        directed_fp=len(estimate) - directed_tp,
        skeleton_tp=skeleton_tp,
        skeleton_fp=len(skel_est) - skeleton_tp,
        truth_edge_count=len(truth),
    )


def roc_point(counts: StructuralCounts, p: int, directed: bool = True) -> tuple[float, float]:
    """``(false positive rate, true positive rate)`` of one estimate.

    Negatives are the ordered (``directed``) or unordered node pairs that are
    not edges of the truth.
    """
    pairs = p * (p - 1) if directed else p * (p - 1) // 2
    tp, fp = (
        (counts.directed_tp, counts.directed_fp)
        if directed
        else (counts.skeleton_tp, counts.skeleton_fp)
    )
    negatives = pairs - counts.truth_edge_count
    tpr = tp / counts.truth_edge_count if counts.truth_edge_count else math.nan
    fpr = fp / negatives if negatives else math.nan
    return fpr, tpr


def random_guess_counts(p: int, truth_edge_count: int, n_selected: int) -> dict[str, float]:
    """Expected counts of a uniformly random estimate with ``n_selected`` edges.

    The guess picks ``n_selected`` unordered pairs uniformly and orients each
    by a fair coin, so half of its skeleton hits are correctly oriented.
    """
    pairs = p * (p - 1) // 2
    if not 0 <= n_selected <= pairs or not 0 <= truth_edge_count <= pairs:
        raise InvalidArgumentError(f"edge counts must lie in [0, {pairs}]")
    skeleton_tp = n_selected * truth_edge_count / pairs if pairs else 0.0
    return {
        "directed_tp": skeleton_tp / 2,
        "directed_fp": n_selected - skeleton_tp / 2,
        "skeleton_tp": skeleton_tp,
        "skeleton_fp": n_selected - skeleton_tp,
    }


def imec_recovered(estimate: Dag, truth: Dag, family: InterventionFamily) -> bool:
    _same_p(estimate, truth)
    return i_markov_equivalent(estimate, truth, family)


@dataclass(frozen=True)
class ScenarioConfig:
    """Generator settings for one simulated study.

    ``k`` interventional regimes each target ``target_size`` nodes drawn
    without replacement; weights have magnitude in ``(c, 1]``; every regime
    gets ``n`` samples for each ``n`` in ``ns``. ``oracle="dsep"`` replaces
    the data with exact d-separation answers.
    """

    p: int
    density: float = 1.5
    k: int = 1
    target_size: int = 1
    c: float = 0.0
    ns: tuple[int, ...] = (1000,)
    oracle: str = "data"

    def __post_init__(self):
        if self.oracle not in ORACLES:
            raise InvalidArgumentError(f"oracle must be one of {ORACLES}, got {self.oracle!r}")
        if self.k < 0:
            raise InvalidArgumentError(f"k must be nonnegative, got {self.k}")
        if not self.ns or any(n < 1 for n in self.ns):
            raise InvalidArgumentError(f"sample sizes must be positive, got {self.ns}")
        object.__setattr__(self, "ns", tuple(int(n) for n in self.ns))


@dataclass(frozen=True)
class Instance:
    model: SemModel
    family: InterventionFamily
    pi0: tuple[int, ...]


def make_instance(scenario: ScenarioConfig, seed: int, trial: int) -> Instance:
    """The model, targets and start permutation of one trial."""
    rng = derive_rng(seed, trial, 0)
    dag = random_dag(scenario.p, scenario.density, rng)
    model = random_weights(dag, scenario.c, rng)
    targets = [random_targets(scenario.p, scenario.target_size, rng) for _ in range(scenario.k)]
    pi0 = random_permutation(scenario.p, derive_rng(seed, trial, 2))
    return Instance(model, InterventionFamily((frozenset(), *targets)), pi0)


def simulate_dataset(
    model: SemModel, family: InterventionFamily, n: int, seed: int, *keys: int
) -> list[RegimeData]:
    """One independent stream per regime, keyed by ``(seed, *keys, regime)``."""
    return [sample(model, n, t, derive_rng(seed, *keys, k)) for k, t in enumerate(family)]


@dataclass(frozen=True)
class SweepRow:
    alpha: float
    n: int
    proportion: float
    successes: int
    trials: int
    errors: int


def _estimate(algorithm, scenario, inst, data, alpha, search):
    if algorithm == "alg1":
        return algorithm1(data, inst.family, inst.pi0, ScoreConfig.default(data), search).dag
    if scenario.oracle == "dsep":
        oracle = DSepOracle(inst.model.dag, inst.family)
    else:
        oracle = DataOracle(data, alpha)
    return igsp(oracle, inst.family, inst.pi0, search).dag


def _run_trial(args) -> dict[tuple[float, int], bool | None]:
    """Outcome per ``(alpha, n)``: recovered, or None when the pipeline failed."""
    scenario, algorithm, alphas, seed, trial, search = args
    inst = make_instance(scenario, seed, trial)
    # alpha is unused without a data-driven CI test, and n without data
    alpha_free = algorithm == "alg1" or scenario.oracle == "dsep"
    n_free = scenario.oracle == "dsep"
    out = {}
    memo: dict[tuple, bool | None] = {}
    for n_idx, n in enumerate(scenario.ns):
        data = None
        for alpha in alphas:
            key = (None if alpha_free else alpha, None if n_free else n)
            if key not in memo:
                try:
                    if data is None and scenario.oracle == "data":
                        data = simulate_dataset(inst.model, inst.family, n, seed, trial, 1, n_idx)
                    est = _estimate(algorithm, scenario, inst, data, alpha, search)
                    memo[key] = imec_recovered(est, inst.model.dag, inst.family)
                except TRIAL_ERRORS:
                    memo[key] = None
            out[(alpha, n)] = memo[key]
    return out


def consistency_sweep(
    scenario: ScenarioConfig,
    algorithm: str,
    alphas: Sequence[float],
    trials: int,
    seed: int,
    search: SearchConfig = SearchConfig(),
    workers: int = 1,
) -> list[SweepRow]:
    """Proportion of trials whose estimate is I-Markov equivalent to the truth.

    Trial ``t`` draws its model, targets, start permutation and data from
    streams keyed by ``(seed, t)``, so the same model is reused across every
    ``(alpha, n)`` cell. Failed trials are excluded from the proportion and
    counted in ``errors``. Rows come ordered by ``n``, then ``alpha``.
    """
    if algorithm not in ALGORITHMS:
        raise InvalidArgumentError(f"algorithm must be one of {ALGORITHMS}, got {algorithm!r}")
    if algorithm == "alg1" and scenario.oracle == "dsep":
        raise InvalidArgumentError("the scored search needs data, not a d-separation oracle")
    alphas = [float(a) for a in alphas]
    if not alphas:
        raise InvalidArgumentError("need at least one alpha")
    if any(not 0.0 <= a <= 1.0 for a in alphas):
        raise InvalidArgumentError(f"alphas must lie in [0, 1], got {alphas}")
    if trials < 1:
        raise InvalidArgumentError(f"need at least one trial, got {trials}")
    jobs = [(scenario, algorithm, alphas, seed, t, search) for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_trial, jobs))
    else:
        outcomes = [_run_trial(job) for job in jobs]

    rows = []
    for n in scenario.ns:
        for alpha in alphas:
            results = [o[(alpha, n)] for o in outcomes]
            ok = [r for r in results if r is not None]
            successes = sum(ok)
            rows.append(
                SweepRow(
                    alpha=alpha,
                    n=n,
                    proportion=successes / len(ok) if ok else math.nan,
                    successes=successes,
                    trials=len(ok),
                    errors=len(results) - len(ok),
                )
            )
    return rows


def best_alpha_proportion(rows: Sequence[SweepRow], n: int) -> float:
    """Highest recovery proportion over alphas at sample size ``n``."""
    vals = [r.proportion for r in rows if r.n == n and not math.isnan(r.proportion)]
    if not vals:
        raise InvalidArgumentError(f"no completed trials at n={n}")
    return max(vals)
