import math

import numpy as np
import pytest

from ampcoh.amplify import (
    GroverOp,
    averaged_success,
    coh_search,
    detection_probability,
    grover_state,
)
from ampcoh.core import PureState, RngStream, basis_state, random_pure_state, state_with_coherence
from ampcoh.measures import geometric_coherence
from ampcoh.oracle import synthesize


def brute_average(theta, M):
    # Test-side oracle: the definition itself.
    return sum(math.sin((2 * j + 1) * theta) ** 2 for j in range(M)) / M


class TestGroverRotation:
    def test_zero_applications_returns_target(self):
        t = random_pure_state(4, RngStream(51))
        o = synthesize(t)
        s = grover_state(o, 1, 0)
        assert np.max(np.abs(s.amps - t.amps)) < 1e-14
        assert o.tally() == (1, 0, 0)

    def test_quarter_turn_detects_with_certainty(self):
        # p_k = 3/4 so theta = pi/6; one application rotates to (2m+1)theta = pi/2.
        s = PureState([math.sqrt(0.75), math.sqrt(0.25)])
        o = synthesize(s)
        out = grover_state(o, 0, 1)
        assert abs(out.amps[0]) ** 2 < 1e-12
        assert abs(detection_probability(math.pi / 6, 1) - 1.0) < 1e-12

    def test_half_probability_case(self):
        s = PureState([math.sqrt(0.5), math.sqrt(0.5)])
        o = synthesize(s)
        out = grover_state(o, 0, 1)
        assert abs(abs(out.amps[0]) ** 2 - 0.5) < 1e-12
        assert abs(detection_probability(math.pi / 4, 1) - 0.5) < 1e-12

    def test_call_accounting(self):
        t = random_pure_state(4, RngStream(52))
        o = synthesize(t)
        grover_state(o, 2, 7)
        assert o.tally() == (8, 7, 0)  # m+1 forward, m inverse

    def test_closed_form_and_span_on_random_states(self):
        # |<k|Q^m psi>|^2 = cos^2((2m+1) theta_k), and nothing leaks out of
        # the span of |k> and the in-state complement.
        rng = RngStream(53)
        for _ in range(100):
            d = int(rng.gen.choice([2, 4, 8]))
            t = random_pure_state(d, rng)
            k = int(rng.gen.integers(d))
            m = int(rng.gen.integers(0, 51))
            o = synthesize(t)
            prof = geometric_coherence(t)
            out = grover_state(o, k, m)
            expected = math.cos((2 * m + 1) * prof.theta[k]) ** 2
            assert abs(abs(out.amps[k]) ** 2 - expected) < 1e-10

            e_k = basis_state(d, k).amps
            res = t.amps - t.amps[k] * e_k
            nrm = np.linalg.norm(res)
            span = [e_k] if nrm < 1e-12 else [e_k, res / nrm]
            v = out.amps.copy()
            for b in span:
                v = v - b * np.vdot(b, v)
            assert np.linalg.norm(v) < 1e-10

    def test_zero_overlap_rejected(self):
        o = synthesize(basis_state(2, 1))
        with pytest.raises(ValueError):
            grover_state(o, 0, 1)
        with pytest.raises(ValueError):
            GroverOp(o, 0)

    def test_detection_probability_range_check(self):
        with pytest.raises(ValueError):
            detection_probability(-0.1, 1)
        assert detection_probability(0.0, 10) == 0.0


class TestAveragedSuccess:
    def test_single_term_collapses_to_sin_squared(self):
        for theta in np.linspace(0.05, 1.5, 20):
            assert abs(averaged_success(float(theta), 1) - math.sin(theta) ** 2) < 1e-12

    def test_matches_brute_force_sum(self):
        assert abs(averaged_success(math.pi / 8, 4) - brute_average(math.pi / 8, 4)) < 1e-12
        for theta in np.linspace(0.02, math.pi / 2 - 0.02, 25):
            for M in (1, 2, 3, 7, 20, 50):
                assert abs(averaged_success(float(theta), M) - brute_average(float(theta), M)) < 1e-12

    def test_quarter_floor(self):
        for theta in np.linspace(0.05, math.pi / 2 - 0.05, 40):
            M = math.ceil(1.0 / math.sin(2 * theta))
            assert averaged_success(float(theta), M) >= 0.25 - 1e-12

    def test_degenerate_angles(self):
        assert averaged_success(0.0, 10) == 0.0
        assert averaged_success(math.pi / 2, 10) == pytest.approx(1.0, abs=1e-15)

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            averaged_success(0.3, 0)
        with pytest.raises(ValueError):
            averaged_success(2.0, 3)


class TestCohSearch:
    def test_incoherent_exhausts_budget(self):
        o = synthesize(basis_state(2, 1))
        trace = coh_search(o, 1, RngStream(54), max_total_calls=777)
        assert trace.verdict == "budget_exhausted"
        assert trace.total_calls == 777 == o.total_calls

    def test_schedule_follows_three_halves(self):
        o = synthesize(basis_state(2, 0))
        trace = coh_search(o, 0, RngStream(55), max_total_calls=2000)
        for rec in trace.rounds:
            assert rec.M == math.ceil(1.5 ** rec.ell)
        assert [r.ell for r in trace.rounds] == list(range(1, len(trace.rounds) + 1))

    def test_coherent_terminates_with_bounded_mean(self):
        rng = RngStream(56)
        calls = []
        for tr in rng.spawn(2000):
            s = state_with_coherence(2, 0.5, tr)
            o = synthesize(s)
            k = geometric_coherence(s).k_max
            trace = coh_search(o, k, tr, max_total_calls=100_000)
            assert trace.verdict == "coherent"
            assert trace.total_calls == o.total_calls
            calls.append(trace.total_calls)
        # Expected cost is O(1/sqrt(1 - p_k)) = O(sqrt(2)) here.
        assert np.mean(calls) < 20

    def test_terminating_round_saw_off_k_outcome(self):
        rng = RngStream(57)
        s = state_with_coherence(4, 0.3, rng)
        k = geometric_coherence(s).k_max
        o = synthesize(s)
        trace = coh_search(o, k, rng, max_total_calls=100_000)
        last = trace.rounds[-1]
        assert (last.first_outcome is not None and last.first_outcome != k) or (
            last.second_outcome is not None and last.second_outcome != k
        )

    def test_scaling_exponent(self):
        # Mean calls across p_k = 1 - 2^-1 .. 1 - 2^-12 follow c^-1/2.
        rng = RngStream(58)
        pts = []
        for i in range(1, 13):
            c = 2.0 ** -i
            total = 0
            streams = rng.spawn(300)
            for tr in streams:
                s = state_with_coherence(2, c, tr)
                o = synthesize(s)
                trace = coh_search(o, geometric_coherence(s).k_max, tr, 100_000)
                assert trace.verdict == "coherent"
                total += trace.total_calls
            pts.append((c, total / 300))
        lx = np.log([p[0] for p in pts])
        ly = np.log([p[1] for p in pts])
        slope = np.polyfit(lx, ly, 1)[0]
        assert abs(slope - (-0.5)) < 0.1
