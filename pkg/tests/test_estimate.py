import math

import numpy as np
import pytest

from ampcoh.core import PureState, RngStream, basis_state, random_pure_state, state_with_coherence
from ampcoh.estimate import (
    EnvelopeExceededError,
    QpeConfig,
    calls_for_accuracy,
    default_repetitions,
    estimate_coherence,
    qpe_estimate_theta,
    qpe_outcome_distribution,
)
from ampcoh.measures import geometric_coherence
from ampcoh.oracle import synthesize


def error_bound(c, M):
    return 2 * math.pi * math.sqrt(c * (1 - c)) / M + math.pi ** 2 / M ** 2


def kernel_distribution(theta, M):
    """Test-side oracle: the analytic phase-estimation outcome kernel.

    The prepared state splits evenly over the two rotation eigenvectors
    with phases +-theta/pi, and each contributes the squared Dirichlet
    (Fejer-type) kernel around its phase.
    """

    def mass(phi, y):
        x = (phi - y / M) % 1.0
        if min(x, 1.0 - x) < 1e-15:
            return 1.0
        return (math.sin(math.pi * M * x) / (M * math.sin(math.pi * x))) ** 2

    probs = np.zeros(M)
    for y in range(M):
        probs[y] = 0.5 * mass(theta / math.pi, y) + 0.5 * mass(-theta / math.pi, y)
    return probs


def state_with_angle(d, k, theta, rng):
    # <k|psi> = cos(theta), remainder spread with random phases.
    p = np.full(d, math.sin(theta) ** 2 / (d - 1))
    p[k] = math.cos(theta) ** 2
    phases = np.exp(2j * np.pi * rng.gen.random(d))
    return PureState(np.sqrt(p) * phases)


class TestCallsForAccuracy:
    def test_frozen_values(self):
        assert calls_for_accuracy(0.5) == 16
        assert calls_for_accuracy(0.05) == 128

    def test_minimality(self):
        for eps in (0.5, 0.3, 0.1, 0.02):
            m = calls_for_accuracy(eps)
            assert math.pi / m + math.pi ** 2 / m ** 2 <= eps
            half = m // 2
            if half >= 2:
                assert math.pi / half + math.pi ** 2 / half ** 2 > eps

    def test_inverse_epsilon_slope(self):
        eps = [2.0 ** -i for i in range(2, 9)]
        lx = np.log(eps)
        ly = np.log([calls_for_accuracy(e) for e in eps])
        slope = np.polyfit(lx, ly, 1)[0]
        assert abs(slope - (-1.0)) < 0.1

    def test_range(self):
        with pytest.raises(ValueError):
            calls_for_accuracy(0.0)
        with pytest.raises(ValueError):
            calls_for_accuracy(1.0)


class TestQpeDistribution:
    def test_on_grid_half_coherence(self):
        # theta = pi/4 sits exactly on the M = 16 grid at y = 4 and 12.
        s = PureState([math.sqrt(0.5), math.sqrt(0.5)])
        o = synthesize(s)
        dist = qpe_outcome_distribution(o, 0, QpeConfig(t=4))
        assert dist[4] == pytest.approx(0.5, abs=1e-12)
        assert dist[12] == pytest.approx(0.5, abs=1e-12)
        assert dist.sum() == pytest.approx(1.0, abs=1e-12)

    def test_on_grid_sampling(self):
        s = PureState([math.sqrt(0.5), math.sqrt(0.5)])
        o = synthesize(s)
        rng = RngStream(81)
        cfg = QpeConfig(t=4)
        ys = {qpe_estimate_theta(o, 0, cfg, rng)[0] for _ in range(200)}
        assert ys <= {4, 12}

    def test_matches_analytic_kernel(self):
        # Total-variation agreement with the closed-form kernel, on- and
        # off-grid, across dimensions and grid sizes.
        rng = RngStream(82)
        for d in (2, 4, 8):
            for t in (3, 4, 6):
                M = 1 << t
                for theta in (math.pi / 4, 0.3, 1.1, math.pi * 3 / M):
                    s = state_with_angle(d, 1, theta, rng)
                    o = synthesize(s)
                    sim = qpe_outcome_distribution(o, 1, QpeConfig(t=t))
                    ana = kernel_distribution(theta, M)
                    assert 0.5 * np.abs(sim - ana).sum() < 1e-6

    def test_controlled_call_accounting(self):
        s = state_with_angle(2, 0, 0.7, RngStream(83))
        o = synthesize(s)
        qpe_estimate_theta(o, 0, QpeConfig(t=4), RngStream(83, 1))
        # one forward preparation plus 2(M-1) controlled constituent calls
        assert o.tally() == (1, 0, 30)

    def test_envelope_guard(self):
        o = synthesize(random_pure_state(4, RngStream(84)))
        with pytest.raises(EnvelopeExceededError):
            qpe_outcome_distribution(o, 0, QpeConfig(t=13))


class TestEstimateCoherence:
    def test_incoherent_estimates_zero(self):
        o = synthesize(basis_state(3, 2))
        res = estimate_coherence(o, QpeConfig(t=4, repetitions=3), RngStream(85))
        assert res.c_hat == 0.0
        assert res.k == 2
        assert res.raw_phases == [0, 0, 0]

    def test_accounting(self):
        s = state_with_angle(2, 0, 0.5, RngStream(86))
        o = synthesize(s)
        res = estimate_coherence(o, QpeConfig(t=4, repetitions=3, C=5), RngStream(86, 1))
        assert res.calls.forward == 5 + 3
        assert res.calls.inverse == 0
        assert res.calls.controlled == 3 * 30
        assert res.M == 16

    def test_median_invariant(self):
        s = state_with_angle(2, 0, 0.6, RngStream(87))
        o = synthesize(s)
        res = estimate_coherence(o, QpeConfig(t=5, repetitions=11), RngStream(87, 1))
        assert 0.0 <= res.c_hat <= 1.0
        mid = sorted(math.sin(math.pi * y / res.M) ** 2 for y in res.raw_phases)[5]
        assert res.c_hat == pytest.approx(mid, abs=0)

    def test_single_run_success_frequency(self):
        # Off-grid c = 0.3 at M = 64: the within-bound frequency clears the
        # 8/pi^2 floor with a wide margin.
        c = 0.3
        theta = math.asin(math.sqrt(c))  # cos^2 theta = 0.7, so c_0 = 0.3
        s = state_with_angle(2, 0, theta, RngStream(88))
        o = synthesize(s)
        cfg = QpeConfig(t=6)
        rng = RngStream(88, 1)
        hits = 0
        n = 2000
        for _ in range(n):
            y, _ = qpe_estimate_theta(o, 0, cfg, rng)
            hits += abs(math.sin(math.pi * y / 64) ** 2 - c) <= error_bound(c, 64)
        assert hits / n >= 8 / math.pi ** 2

    def test_median_boost_beats_hoeffding_bound(self):
        rng = RngStream(89)
        c = 0.3
        for ell in (5, 11, 21):
            bound = math.exp(-2 * ell * (8 / math.pi ** 2 - 0.5) ** 2)
            fails = 0
            n = 300
            for tr in rng.spawn(n):
                s = state_with_coherence(2, c, tr)
                o = synthesize(s)
                res = estimate_coherence(o, QpeConfig(t=4, repetitions=ell), tr)
                c_k = 1.0 - geometric_coherence(s).probs[res.k]
                fails += abs(res.c_hat - c_k) > error_bound(c_k, 16)
            assert fails / n <= bound

    def test_upper_bound_property_on_haar_states(self):
        # c_k >= c for every k, so a good estimate cannot undershoot the
        # geometric coherence by more than the error bound.
        rng = RngStream(90)
        kmax_runs = 0
        typical_hits = 0
        for tr in rng.spawn(100):
            s = random_pure_state(8, tr)
            prof = geometric_coherence(s)
            o = synthesize(s)
            res = estimate_coherence(o, QpeConfig(t=6, repetitions=5), tr)
            c_k = 1.0 - prof.probs[res.k]
            assert res.c_hat >= prof.c - error_bound(c_k, 64) - 1e-12
            if res.k == prof.k_max:
                kmax_runs += 1
                # typical run: the estimate targets the geometric coherence
                typical_hits += abs(res.c_hat - prof.c) <= error_bound(prof.c, 64) + 1e-12
        assert kmax_runs > 50  # picking k_max is the typical case
        assert typical_hits / kmax_runs >= 0.9  # median of 5 rarely misses

    def test_error_bound_field(self):
        s = state_with_angle(2, 0, 0.4, RngStream(91))
        o = synthesize(s)
        res = estimate_coherence(o, QpeConfig(t=4, repetitions=3), RngStream(91, 1))
        assert res.error_bound == pytest.approx(error_bound(res.c_hat, 16), abs=1e-15)


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            QpeConfig(t=0)
        with pytest.raises(ValueError):
            QpeConfig(t=4, repetitions=4)
        with pytest.raises(ValueError):
            QpeConfig(t=4, C=0)

    def test_for_accuracy(self):
        cfg = QpeConfig.for_accuracy(0.5, delta=0.05)
        assert cfg.M == 16
        assert cfg.repetitions == default_repetitions(0.05)
        assert cfg.repetitions % 2 == 1

    def test_default_repetitions_odd_and_monotone(self):
        reps = [default_repetitions(d) for d in (0.2, 0.05, 0.01)]
        assert all(r % 2 == 1 for r in reps)
        assert reps == sorted(reps)
