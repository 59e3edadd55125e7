import math
from fractions import Fraction as F

import numpy as np
import pytest

from htjack.rtransform import EnsembleSpec, Family
from htjack.sampler import (
    ChainConfig,
    PartitionChain,
    acceptance_probability,
    histogram,
    log_weight,
    mcmc_run,
    partition_moves,
    planch_box_product_exact,
)

PLANCH1 = EnsembleSpec(Family.PLANCH, 1, eta=1)


class TestLogWeight:
    def test_empty_partition(self):
        # the Plancherel prefactor alone
        for N, eta in [(1, 1), (5, F(1, 2))]:
            spec = EnsembleSpec(Family.PLANCH, 1, eta=eta)
            assert log_weight([], spec, N, 0.1) == pytest.approx(-N * float(eta))

    def test_single_box(self):
        # one box: log(e^{-N eta} * eta * N) for any theta
        N, theta = 7, 0.23
        assert log_weight([1], PLANCH1, N, theta) == pytest.approx(-N + math.log(N))

    def test_poisson_degeneration_exact(self):
        # N = 1: the rational box product telescopes to 1/k!
        for k in range(7):
            prod = planch_box_product_exact([k] if k else [], 1, F(1, 3))
            assert prod == F(1, math.factorial(k))

    def test_poisson_degeneration_float(self):
        theta = 0.37
        for k in range(1, 7):
            expect = -1.0 + k * 0.0 + math.log(1.0**k / math.factorial(k))
            assert log_weight([k], PLANCH1, 1, theta) == pytest.approx(expect)

    def test_alpha_row_cap(self):
        spec = EnsembleSpec(Family.ALPHA, 1, eta=F(1, 2), c=F(1, 3))
        theta = 0.1  # eta/theta = 5 rows allowed
        assert log_weight([1] * 5, spec, 20, theta) > -math.inf
        assert log_weight([1] * 6, spec, 20, theta) == -math.inf

    def test_invalid_partition_rejected(self):
        with pytest.raises(ValueError):
            log_weight([1, 2], PLANCH1, 3, 0.1)


class TestMoves:
    def test_empty_has_one_addable(self):
        assert partition_moves((), 5) == [(1,)]

    def test_corner_counts_2_1(self):
        moves = partition_moves((2, 1), 5)
        adds = [m for m in moves if sum(m) == 4]
        removes = [m for m in moves if sum(m) == 2]
        assert sorted(adds) == [(2, 1, 1), (2, 2), (3, 1)]
        assert sorted(removes) == [(1, 1), (2,)]

    def test_reversibility_structural(self):
        for lam in [(), (1,), (3, 1), (2, 2, 1), (5, 3, 3, 1)]:
            for mu in partition_moves(lam, 6):
                assert lam in partition_moves(mu, 6)

    def test_max_rows_respected(self):
        assert (1, 1) not in partition_moves((1,), 1)

    def test_chain_moves_match_pure_helper(self):
        rng = np.random.default_rng(5)
        chain = PartitionChain(PLANCH1, 6, 0.2, rng)
        for _ in range(3000):
            chain.step(rng.random(), rng.random())
        lam = chain.partition()
        n = chain.n_moves()
        reachable = set()
        for u in range(n):
            is_add, row, col, _ = chain._move_of_index(u)
            new = list(lam) + [0, 0]
            new[row - 1] += 1 if is_add else -1
            reachable.add(tuple(p for p in new if p > 0))
        assert reachable == set(partition_moves(lam, chain.max_rows))
        assert len(reachable) == n


def stationary_from_transition_matrix(states, weights, max_rows):
    """Brute-force stationary law of the Metropolis chain on a finite box."""
    index = {s: i for i, s in enumerate(states)}
    n = len(states)
    T = np.zeros((n, n))
    for s in states:
        i = index[s]
        moves = partition_moves(s, max_rows)
        k = len(moves)
        for mu in moves:
            w_to = weights.get(mu, 0.0)
            if w_to == 0.0:
                T[i, i] += 1 / k  # rejected proposal out of the box
                continue
            a = acceptance_probability(
                math.log(weights[s]), math.log(w_to), k, len(partition_moves(mu, max_rows))
            )
            T[i, index[mu]] += a / k
            T[i, i] += (1 - a) / k
    evals, evecs = np.linalg.eig(T.T)
    j = int(np.argmin(np.abs(evals - 1)))
    pi = np.real(evecs[:, j])
    pi /= pi.sum()
    return pi


class TestDetailedBalance:
    def test_truncated_two_row_chain(self):
        # N = 2, parts <= 4: stationary law == normalized weights to 1e-10
        spec = EnsembleSpec(Family.PLANCH, 1, eta=F(3, 2))
        N, theta, cap = 2, 0.4, 4
        states = [()] + [
            (a, b) if b else (a,) for a in range(1, cap + 1) for b in range(0, a + 1)
        ]
        weights = {s: math.exp(log_weight(s, spec, N, theta)) for s in states}
        pi = stationary_from_transition_matrix(states, weights, max_rows=N)
        z = sum(weights.values())
        for s, p in zip(states, pi):
            assert p == pytest.approx(weights[s] / z, abs=1e-10)

    def test_truncated_alpha_chain(self):
        spec = EnsembleSpec(Family.ALPHA, 1, eta=1, c=F(2, 5))
        N, theta, cap = 2, 0.3, 3
        states = [()] + [
            (a, b) if b else (a,) for a in range(1, cap + 1) for b in range(0, a + 1)
        ]
        weights = {s: math.exp(log_weight(s, spec, N, theta)) for s in states}
        pi = stationary_from_transition_matrix(states, weights, max_rows=N)
        z = sum(weights.values())
        for s, p in zip(states, pi):
            assert p == pytest.approx(weights[s] / z, abs=1e-10)


class TestChain:
    def test_incremental_weight_matches_full(self):
        rng = np.random.default_rng(11)
        spec = EnsembleSpec(Family.PLANCH, 2, eta=1)
        chain = PartitionChain(spec, 30, 2 / 30, rng)
        for _ in range(4000):
            chain.step(rng.random(), rng.random())
        full = log_weight(chain.partition(), spec, 30, 2 / 30)
        assert chain.logw == pytest.approx(full, abs=1e-9)
        assert chain.diag.max_drift < 1e-9

    def test_views_stay_consistent(self):
        rng = np.random.default_rng(13)
        chain = PartitionChain(PLANCH1, 12, 0.15, rng)
        for _ in range(5000):
            chain.step(rng.random(), rng.random())
        lam = chain.partition()
        assert list(lam) == sorted(lam, reverse=True)
        assert sum(lam) == chain.size
        from htjack.sampler import _conjugate

        conj = _conjugate(lam)
        assert list(chain.conj[: len(conj)]) == conj
        blocks_flat = []
        for v, m in chain.blocks:
            blocks_flat.extend([v] * m)
        assert tuple(blocks_flat) == lam

    def test_n1_chain_approaches_poisson(self):
        # stationary law at N = 1 is Poisson(eta); TV < 0.01 over 1e6 steps
        rng = np.random.default_rng(42)
        chain = PartitionChain(PLANCH1, 1, 0.5, rng)
        counts = np.zeros(64, dtype=np.int64)
        steps = 1_000_000
        BATCH = 8192
        done = 0
        while done < steps:
            m = min(BATCH, steps - done)
            um, ua = rng.random(m), rng.random(m)
            for i in range(m):
                chain.step(um[i], ua[i])
                counts[chain.size] += 1
            done += steps and m
        emp = counts / steps
        pois = np.array([math.exp(-1) / math.factorial(k) for k in range(21)])
        tv = 0.5 * (np.abs(emp[:21] - pois).sum() + emp[21:].sum() + (1 - pois.sum()))
        assert tv < 0.01, tv

    def test_reproducible_for_fixed_seed(self):
        spec = EnsembleSpec(Family.PLANCH, 2, eta=1)
        cfg = ChainConfig(spec, N=20, sweeps=2000, thin=50, seed=7, chains=2)
        a = mcmc_run(cfg)
        b = mcmc_run(cfg)
        assert np.array_equal(a.positions, b.positions)
        assert [d.accepted for d in a.diagnostics] == [d.accepted for d in b.diagnostics]

    def test_diagnostics_populated(self):
        spec = EnsembleSpec(Family.PLANCH, 2, eta=1)
        cfg = ChainConfig(spec, N=10, sweeps=1500, thin=100, seed=3, chains=2)
        out = mcmc_run(cfg)
        assert len(out.diagnostics) == 2
        for d in out.diagnostics:
            assert 0 < d.acceptance_rate < 1
            assert d.logw_trace
        n_snap = len(out.records)
        assert out.positions.size == n_snap * 10


class TestHistogram:
    def test_empty(self):
        lefts, counts = histogram([], 0.5)
        assert lefts.size == 0 and counts.size == 0

    def test_all_equal(self):
        lefts, counts = histogram([1.2] * 9, 0.5)
        assert counts.sum() == 9 and counts.max() == 9

    def test_counts_sum(self):
        rng = np.random.default_rng(1)
        xs = rng.normal(size=500)
        lefts, counts = histogram(xs, 0.3)
        assert counts.sum() == 500
        # anchored at zero: every edge is an integer multiple of the width
        assert np.allclose(lefts / 0.3, np.round(lefts / 0.3))
