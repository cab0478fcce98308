import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from igsp.algorithms import (
    LocalScore,
    ScoreConfig,
    SearchConfig,
    algorithm1,
    count_i_contradicting,
    i_covered_arrows,
    igsp,
    index_sets,
    is_i_contradicting,
    is_i_covered,
)
from igsp.citest import RegimeData, dsep_oracle
from igsp.errors import InvalidArgumentError, NumericalDegeneracyError
from igsp.graph import (
    Dag,
    InterventionFamily,
    covered_arrows,
    enumerate_dags,
    i_markov_equivalent,
    markov_equivalent,
)
from igsp.imap import minimal_imap, random_permutation
from igsp.rng import derive_rng
from igsp.sem import random_dag, random_targets, random_weights, sample

CHAIN = Dag(3, {(0, 1), (1, 2)})
EDGE = Dag(2, {(0, 1)})
OBS = InterventionFamily()
UNBOUNDED = SearchConfig(max_depth=None)


class TestIndexSets:
    def test_examples(self):
        # targets {4} and {5} of the worked example are nodes 3 and 4 here
        assert index_sets(InterventionFamily.of((), {3}, {4}), 3, 4) == ({1}, {2})
        assert index_sets(OBS, 0, 1) == (set(), set())
        assert index_sets(InterventionFamily.of((), {3, 4}), 3, 4) == (set(), set())

    def test_same_node(self):
        with pytest.raises(InvalidArgumentError):
            index_sets(OBS, 2, 2)


class TestICovered:
    def test_observational_family_covers_everything(self):
        orc = dsep_oracle(CHAIN, OBS)
        g = minimal_imap((0, 1, 2), orc)
        assert i_covered_arrows(g, OBS, orc, (0, 1, 2)) == covered_arrows(g)

    def test_examples(self):
        fam = InterventionFamily.of((), {1})
        orc = dsep_oracle(EDGE, fam)
        rev = minimal_imap((1, 0), orc)
        assert rev == Dag(2, {(1, 0)})
        assert is_i_covered(rev, (1, 0), fam, orc, (1, 0))

        fam = InterventionFamily.of((), {0})
        orc = dsep_oracle(EDGE, fam)
        assert not is_i_covered(EDGE, (0, 1), fam, orc, (0, 1))

    def test_uncovered_arrow_rejected(self):
        orc = dsep_oracle(CHAIN, OBS)
        with pytest.raises(InvalidArgumentError):
            is_i_covered(CHAIN, (1, 2), OBS, orc, (0, 1, 2))


class TestIContradicting:
    def test_examples(self):
        orc = dsep_oracle(EDGE, OBS)
        assert not is_i_contradicting(1, 0, OBS, orc)
        fam = InterventionFamily.of((), {1})
        orc = dsep_oracle(EDGE, fam)
        assert is_i_contradicting(1, 0, fam, orc)
        assert not is_i_contradicting(0, 1, fam, orc)
        assert count_i_contradicting(Dag(2, {(1, 0)}), fam, orc) == 1
        assert count_i_contradicting(EDGE, fam, orc) == 0

    def test_same_node(self):
        with pytest.raises(InvalidArgumentError):
            is_i_contradicting(0, 0, OBS, dsep_oracle(EDGE, OBS))


class TestIgsp:
    def test_chain_observational(self):
        r = igsp(dsep_oracle(CHAIN, OBS), OBS, (2, 1, 0))
        assert len(r.dag) == 2 and markov_equivalent(r.dag, CHAIN)

    @pytest.mark.parametrize("pi0", list(itertools.permutations(range(3))))
    def test_chain_with_middle_intervention_is_exact(self, pi0):
        fam = InterventionFamily.of((), {1})
        assert igsp(dsep_oracle(CHAIN, fam), fam, pi0).dag == CHAIN

    def test_chain_i_mec_is_singleton_by_enumeration(self):
        fam = InterventionFamily.of((), {1})
        assert [g for g in enumerate_dags(3) if i_markov_equivalent(g, CHAIN, fam)] == [CHAIN]

    @pytest.mark.parametrize("pi0", [(0, 1, 2, 3), (3, 1, 0, 2)])
    def test_empty_truth(self, pi0):
        fam = InterventionFamily.of((), {1}, {0, 3})
        r = igsp(dsep_oracle(Dag(4), fam), fam, pi0)
        assert r.dag == Dag(4)

    def test_rejects_small_oracle(self):
        fam = InterventionFamily.of((), {1})
        with pytest.raises(InvalidArgumentError):
            igsp(dsep_oracle(CHAIN, OBS), fam, (0, 1, 2))

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000))
    def test_consistent_with_exact_oracle(self, seed):
        rng = derive_rng(seed)
        p = int(rng.integers(2, 7))
        truth = random_dag(p, min(1.5, p - 1), rng)
        fam = InterventionFamily.of((), random_targets(p, 1, rng))
        orc = dsep_oracle(truth, fam)
        for _ in range(5):
            pi0 = random_permutation(p, rng)
            r = igsp(orc, fam, pi0, UNBOUNDED)
            assert i_markov_equivalent(r.dag, truth, fam), (truth, fam, pi0, r.dag)
            assert r.dag == minimal_imap(r.perm, orc, 0)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 100_000))
    def test_trace_is_monotone(self, seed):
        rng = derive_rng(seed)
        truth = random_dag(6, 2.0, rng)
        fam = InterventionFamily.of((), random_targets(6, 2, rng))
        r = igsp(dsep_oracle(truth, fam), fam, random_permutation(6, rng))
        sizes = [s.n_edges for s in r.trace if s.kind in ("start", "sparser", "plateau-best")]
        assert sizes == sorted(sizes, reverse=True)
        moves = [s for s in r.trace if s.kind in ("start", "sparser")]
        final = next(s for s in r.trace if s.kind == "plateau-best")
        assert final.n_contradicting <= moves[-1].n_contradicting
        assert r.score == (len(r.dag), final.n_contradicting)

    def test_depth_limit_is_flagged(self):
        complete = Dag(4, {(i, j) for i, j in itertools.combinations(range(4), 2)})
        fam = InterventionFamily.of((), {2})
        orc = dsep_oracle(complete, fam)
        shallow = igsp(orc, fam, (3, 2, 1, 0), SearchConfig(max_depth=1))
        assert shallow.depth_limited
        assert shallow.trace[-1].kind == "depth-limit"
        deep = igsp(orc, fam, (3, 2, 1, 0), UNBOUNDED)
        assert not deep.depth_limited
        assert i_markov_equivalent(deep.dag, complete, fam)

    def test_restarts_are_seeded_and_never_worse(self):
        rng = derive_rng(21)
        truth = random_dag(6, 2.0, rng)
        fam = InterventionFamily.of((), {2})
        orc = dsep_oracle(truth, fam)
        pi0 = random_permutation(6, rng)
        one = igsp(orc, fam, pi0, SearchConfig(max_depth=1))
        many = igsp(orc, fam, pi0, SearchConfig(max_depth=1, max_restarts=4, rng_seed=3))
        again = igsp(orc, fam, pi0, SearchConfig(max_depth=1, max_restarts=4, rng_seed=3))
        assert many.score <= one.score
        assert many == again
        assert {s.run for s in many.trace} == set(range(5))

    def test_search_config_validation(self):
        with pytest.raises(InvalidArgumentError):
            SearchConfig(max_depth=0)
        with pytest.raises(InvalidArgumentError):
            SearchConfig(max_restarts=-1)


def _standardized(x):
    return RegimeData((x - x.mean(axis=0)) / x.std(axis=0))


class TestAlgorithm1:
    def test_chain_with_middle_intervention(self):
        fam = InterventionFamily.of((), {1})
        hits = 0
        for seed in range(100):
            rng = derive_rng(seed)
            model = random_weights(CHAIN, 0.5, rng)
            data = [sample(model, 100_000, t, derive_rng(seed, k)) for k, t in enumerate(fam)]
            r = algorithm1(data, fam, (2, 1, 0))
            hits += i_markov_equivalent(r.dag, CHAIN, fam)
        assert hits >= 95

    def test_empty_truth_gives_empty_graph(self):
        hits = 0
        for seed in range(100):
            rng = derive_rng(seed)
            data = [_standardized(rng.standard_normal((100_000, 4)))]
            r = algorithm1(data, OBS, random_permutation(4, rng))
            hits += r.dag == Dag(4)
        assert hits >= 95

    def test_observational_agrees_with_exact_igsp(self):
        # at finite n a few truths are near-unfaithful or leave the score
        # search in a local optimum, so agreement is high but not total
        agree = total = 0
        for idx, g in enumerate(enumerate_dags(4)):
            rng = derive_rng(99, idx)
            model = random_weights(g, 0.5, rng)
            data = [sample(model, 100_000, (), rng)]
            pi0 = random_permutation(4, rng)
            est = algorithm1(data, OBS, pi0).dag
            ref = igsp(dsep_oracle(g, OBS), OBS, pi0, UNBOUNDED).dag
            total += 1
            agree += markov_equivalent(est, ref)
        assert total == 543
        assert agree / total >= 0.95, agree

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 100_000))
    def test_commits_strictly_increase_and_result_is_best_dag(self, seed):
        rng = derive_rng(seed)
        model = random_weights(random_dag(5, 2.0, rng), 0.3, rng)
        fam = InterventionFamily.of((), random_targets(5, 1, rng))
        data = [sample(model, 300, t, derive_rng(seed, k)) for k, t in enumerate(fam)]
        cfg = ScoreConfig.default(data)
        r = algorithm1(data, fam, random_permutation(5, rng), cfg)
        scores = [s.score for s in r.trace if s.kind in ("start", "improve")]
        assert all(b > a for a, b in zip(scores, scores[1:]))
        ls = LocalScore(data, fam, cfg)
        assert r.dag == ls.best_dag(r.perm)
        assert r.score == pytest.approx(ls.total(r.dag))

    def test_restarts_pick_the_best_score(self):
        rng = derive_rng(31)
        model = random_weights(random_dag(5, 2.0, rng), 0.3, rng)
        fam = InterventionFamily.of((), {0})
        data = [sample(model, 500, t, derive_rng(31, k)) for k, t in enumerate(fam)]
        single = algorithm1(data, fam, (4, 3, 2, 1, 0), search=SearchConfig(max_depth=1))
        multi = algorithm1(
            data, fam, (4, 3, 2, 1, 0), search=SearchConfig(max_depth=1, max_restarts=3)
        )
        assert multi.score >= single.score
        finals = {}
        for s in multi.trace:
            finals[s.run] = s.score
        assert multi.score == max(finals.values())

    def test_constant_data_is_degenerate(self):
        data = [RegimeData(np.zeros((5, 2)))]
        with pytest.raises(NumericalDegeneracyError):
            algorithm1(data, OBS, (0, 1), ScoreConfig((0.1,), 0.3), SearchConfig())
