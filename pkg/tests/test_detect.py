import math

import numpy as np
import pytest

from ampcoh.core import PureState, RngStream, basis_state, state_with_coherence
from ampcoh.detect import DetectConfig, baseline_detect, detect_amplified, detect_boosted
from ampcoh.measures import baseline_copy_budget, geometric_coherence
from ampcoh.oracle import synthesize


class TestBaseline:
    def test_basis_state_always_undecided(self):
        rng = RngStream(61)
        for m in (2, 10, 50):
            out = baseline_detect(basis_state(3, 1), m, rng)
            assert out.verdict == "undecided"
            assert out.calls_forward == m

    def test_plus_state_thirty_copies_never_fails(self):
        # failure probability (1/2)^30 ~ 1e-9: zero failures expected.
        rng = RngStream(62)
        plus = PureState([math.sqrt(0.5), math.sqrt(0.5)])
        fails = sum(
            baseline_detect(plus, 30, tr).verdict != "coherent" for tr in rng.spawn(10_000)
        )
        assert fails == 0

    def test_budgeted_failure_rate(self):
        # c = 0.1 with its delta = 0.05 budget of 30 copies.
        rng = RngStream(63)
        m = baseline_copy_budget(0.1, 0.05)
        assert m == 30
        fails = 0
        for tr in rng.spawn(10_000):
            s = state_with_coherence(4, 0.1, tr)
            if baseline_detect(s, m, tr).verdict != "coherent":
                fails += 1
        assert fails / 10_000 <= 0.05

    def test_requires_two_copies(self):
        with pytest.raises(ValueError):
            baseline_detect(basis_state(2, 0), 1, RngStream(0))


class TestAmplified:
    def test_incoherent_hits_budget_undecided(self):
        o = synthesize(basis_state(2, 0))
        cfg = DetectConfig(max_total_calls=500)
        out = detect_amplified(o, cfg, RngStream(64))
        assert out.verdict == "undecided"
        assert out.total_calls == 500 == o.total_calls

    def test_success_rate_on_half_coherent(self):
        rng = RngStream(65)
        cfg = DetectConfig()
        hits = 0
        for tr in rng.spawn(10_000):
            s = state_with_coherence(2, 0.5, tr)
            o = synthesize(s)
            out = detect_amplified(o, cfg, tr)
            hits += out.verdict == "coherent"
            assert (out.calls_forward, out.calls_inverse) == (o.calls_forward, o.calls_inverse)
        assert hits / 10_000 >= 0.25  # far above in practice: budget is ample

    def test_step_two_promise_holds(self):
        # Whenever the search stage runs, the observed k has p_k > 0.
        rng = RngStream(66)
        for tr in rng.spawn(200):
            s = state_with_coherence(4, 0.3, tr)
            o = synthesize(s)
            out = detect_amplified(o, DetectConfig(), tr)
            if out.stage == "step2":
                assert geometric_coherence(s).probs[out.k_observed] > 0

    def test_multi_copy_step_one_can_decide(self):
        rng = RngStream(67)
        cfg = DetectConfig(C=3)
        stages = set()
        for tr in rng.spawn(500):
            s = state_with_coherence(4, 0.75, tr)
            o = synthesize(s)
            out = detect_amplified(o, cfg, tr)
            assert out.verdict == "coherent"
            stages.add(out.stage)
        assert "step1" in stages  # three copies of a spread state disagree often

    def test_tiny_budget_stops_in_step_one(self):
        o = synthesize(basis_state(4, 2))
        out = detect_amplified(o, DetectConfig(C=3, max_total_calls=2), RngStream(68))
        assert out.verdict == "undecided"
        assert out.stage == "step1"
        assert out.total_calls == 2

    def test_config_validation(self):
        with pytest.raises(ValueError):
            DetectConfig(C=0)
        with pytest.raises(ValueError):
            DetectConfig(delta=0.5)
        with pytest.raises(ValueError):
            DetectConfig(r=0)


class TestBoosted:
    def test_replica_count_from_delta(self):
        assert DetectConfig(delta=0.05).replicas == 5  # ceil(log2 20)
        assert DetectConfig(delta=0.4).replicas == 2
        assert DetectConfig(delta=0.4, r=7).replicas == 7

    def test_single_replica_matches_amplified_statistics(self):
        rng_a = RngStream(69, 1)
        rng_b = RngStream(69, 2)
        cfg = DetectConfig(r=1)
        calls_a, calls_b = [], []
        for tr in rng_a.spawn(2000):
            s = state_with_coherence(2, 0.25, tr)
            o = synthesize(s)
            out = detect_amplified(o, cfg, tr)
            assert out.verdict == "coherent"
            calls_a.append(out.total_calls)
        for tr in rng_b.spawn(2000):
            s = state_with_coherence(2, 0.25, tr)
            o = synthesize(s)
            out = detect_boosted(o, cfg, tr)
            assert out.verdict == "coherent"
            calls_b.append(out.total_calls)
        ma, mb = np.mean(calls_a), np.mean(calls_b)
        assert abs(ma - mb) / ma < 0.25

    def test_boosted_failure_rate(self):
        rng = RngStream(70)
        cfg = DetectConfig(delta=0.05)  # r = 5 replicas
        fails = 0
        for tr in rng.spawn(10_000):
            s = state_with_coherence(4, 0.25, tr)
            o = synthesize(s)
            out = detect_boosted(o, cfg, tr)
            fails += out.verdict != "coherent"
            assert out.verdict != "coherent" or out.stage.startswith("replica-")
        assert fails / 10_000 <= 0.05

    def test_incoherent_always_undecided(self):
        rng = RngStream(71)
        cfg = DetectConfig(r=4, max_total_calls=200)
        for tr in rng.spawn(300):
            o = synthesize(basis_state(2, 1))
            out = detect_boosted(o, cfg, tr)
            assert out.verdict == "undecided"
            assert out.total_calls == 200

    def test_pooled_accounting_matches_tallies(self):
        rng = RngStream(72)
        s = state_with_coherence(4, 0.1, rng)
        o = synthesize(s)
        out = detect_boosted(o, DetectConfig(r=3), rng)
        assert out.calls_forward == o.calls_forward
        assert out.calls_inverse == o.calls_inverse
