"""Grover operator, rotation closed forms, and the exponential-schedule search.

The Grover operator for basis index k is Q_k = V_psi V_k, the product of
the reflection about |k> (free: a sign flip) and the reflection about the
prepared state, V_psi = U (I - 2|0><0|) U^dag, which costs exactly one
inverse plus one forward oracle call per application.  Writing
p_k = cos^2(theta_k), m applications rotate the prepared state to

    cos((2m+1) theta_k) |k>  +  sin((2m+1) theta_k) |k_perp>,

so a basis measurement lands off k with probability sin^2((2m+1) theta_k).
coh_search runs the schedule M = ceil((3/2)^l), l = 1, 2, ..., drawing the
Grover power j uniformly from {1, ..., M} each round, which detects an
off-k outcome after O(1/sqrt(1 - p_k)) expected calls without knowing
theta_k, and cannot terminate on an incoherent input (realized finitely
through a call budget).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .core import PureState, RngStream, measure_basis
from .oracle import CountedOracle

DEFAULT_BUDGET = 100_000

SCHEDULE_BASE = 1.5  # the 3/2 growth factor of the round schedule


class GroverOp:
    """Q_k = V_psi V_k for one oracle and one basis index.

    Requires p_k > 0 for the oracle's target (otherwise the rotation
    angle is undefined).  Applications are routed through counted oracle
    calls; the |k> and |0> reflections are free.
    """

    def __init__(self, oracle: CountedOracle, k: int, require_overlap: bool = True):
        if not 0 <= k < oracle.d:
            raise ValueError(f"basis index {k} out of range for dim {oracle.d}")
        amp = oracle.u.entries[k, 0]  # <k|U|0>, a bookkeeping peek
        p_k = float(amp.real ** 2 + amp.imag ** 2)
        if require_overlap and p_k <= 0.0:
            # At p_k = 0 the operator is still fine (Q_k = -I on the span of
            # |k> and the state) but the rotation analysis is degenerate;
            # noiseless callers treat it as a broken promise.
            raise ValueError(f"p_k = 0 for k = {k}: Grover rotation angle undefined")
        self.oracle = oracle
        self.k = k
        self.p_k = p_k
        self.theta_k = math.acos(math.sqrt(min(p_k, 1.0)))

    def iter_q(self, state: PureState) -> Iterator[None]:
        """Apply Q_k once, yielding before each of its two oracle calls.

        Generator protocol: the driver resumes once per granted call; the
        new state is the generator's return value.
        """
        a = state.amps.copy()
        a[self.k] = -a[self.k]
        yield
        state = self.oracle.call(PureState._wrap(a), "inverse")
        a = state.amps.copy()
        a[0] = -a[0]
        yield
        return self.oracle.call(PureState._wrap(a), "forward")

    def apply_q(self, state: PureState) -> PureState:
        return _drain(self.iter_q(state))

    def iter_controlled_q(self, joint: PureState, control) -> Iterator[None]:
        """Controlled-Q_k on a joint (ancilla x system) state, two
        controlled oracle calls plus free controlled reflections."""
        d = self.oracle.d
        a = joint.amps.reshape(-1, d).copy()
        a[control, self.k] = -a[control, self.k]
        yield
        joint = self.oracle.call(PureState._wrap(a.reshape(-1)), "controlled-inverse", control)
        a = joint.amps.reshape(-1, d).copy()
        a[control, 0] = -a[control, 0]
        yield
        return self.oracle.call(PureState._wrap(a.reshape(-1)), "controlled-forward", control)

    def apply_controlled_q(self, joint: PureState, control) -> PureState:
        return _drain(self.iter_controlled_q(joint, control))


def _drain(gen) -> PureState:
    # Run a call-stepped generator to completion without pausing.
    while True:
        try:
            next(gen)
        except StopIteration as stop:
            return stop.value


def grover_state(oracle: CountedOracle, k: int, m: int) -> PureState:
    """Q_k^m U|0> by repeated application through counted calls.

    Charges m+1 forward and m inverse calls (the m reflections about |k>
    are free).
    """
    if m < 0:
        raise ValueError(f"m must be nonnegative, got {m}")
    gop = GroverOp(oracle, k)
    s = oracle.prepare()
    for _ in range(m):
        s = gop.apply_q(s)
    return s


def detection_probability(theta_k: float, m: int) -> float:
    """sin^2((2m+1) theta_k): chance a measurement lands off k after m
    Grover applications."""
    if not 0.0 <= theta_k <= math.pi / 2:
        raise ValueError(f"theta_k must lie in [0, pi/2], got {theta_k}")
    return math.sin((2 * m + 1) * theta_k) ** 2


def averaged_success(theta_k: float, M: int) -> float:
    """Mean of sin^2((2j+1) theta) over j = 0..M-1.

    Closed form 1/2 - sin(4 M theta) / (4 M sin(2 theta)); at the
    degenerate angles theta in {0, pi/2} the denominator vanishes and the
    direct sum is used instead (0 resp. 1).
    """
    if M < 1:
        raise ValueError(f"M must be a positive integer, got {M}")
    if not 0.0 <= theta_k <= math.pi / 2:
        raise ValueError(f"theta_k must lie in [0, pi/2], got {theta_k}")
    s2 = math.sin(2.0 * theta_k)
    if s2 < 1e-15:
        return math.fsum(math.sin((2 * j + 1) * theta_k) ** 2 for j in range(M)) / M
    return 0.5 - math.sin(4.0 * M * theta_k) / (4.0 * M * s2)


@dataclass
class CohSearchRound:
    """One round of the schedule: what was sampled and measured."""

    ell: int
    M: int
    j_sampled: Optional[int] = None
    first_outcome: Optional[int] = None
    second_outcome: Optional[int] = None


@dataclass
class CohSearchTrace:
    rounds: list[CohSearchRound] = field(default_factory=list)
    verdict: str = "budget_exhausted"  # "coherent" | "budget_exhausted"
    total_calls: int = 0


def _coh_search_steps(gop: GroverOp, rng: RngStream, rounds: list[CohSearchRound]):
    """Search loop as a call-stepped generator (one yield per oracle call).

    Returns "coherent" as soon as a measurement lands off k; never returns
    otherwise, so the driver's budget is the only way out for incoherent
    targets.
    """
    oracle, k = gop.oracle, gop.k
    ell = 0
    while True:
        ell += 1
        rec = CohSearchRound(ell=ell, M=math.ceil(SCHEDULE_BASE ** ell))
        rounds.append(rec)
        yield
        s = oracle.prepare()
        rec.first_outcome = measure_basis(s, rng)
        if rec.first_outcome != k:
            return "coherent"
        rec.j_sampled = int(rng.gen.integers(1, rec.M + 1))
        yield
        s = oracle.prepare()
        for _ in range(rec.j_sampled):
            s = yield from gop.iter_q(s)
        rec.second_outcome = measure_basis(s, rng)
        if rec.second_outcome != k:
            return "coherent"


def _drive_calls(gen, max_calls: int):
    """Resume a call-stepped generator once per granted oracle call.

    Returns (result, calls): result is the generator's return value, or
    None if the budget ran out first.
    """
    calls = 0
    try:
        next(gen)  # run to the first yield; no call made yet
        while calls < max_calls:
            calls += 1
            next(gen)
    except StopIteration as stop:
        return stop.value, calls
    gen.close()
    return None, calls


def coh_search(
    oracle: CountedOracle,
    k: int,
    rng: RngStream,
    max_total_calls: int = DEFAULT_BUDGET,
) -> CohSearchTrace:
    """Run the exponential-schedule search for an off-k outcome.

    Requires p_k > 0 (guaranteed when k was itself a measurement outcome).
    Budget exhaustion is a verdict, not an error: the trace comes back
    with verdict "budget_exhausted" and exactly max_total_calls spent.
    """
    if max_total_calls < 1:
        raise ValueError(f"max_total_calls must be positive, got {max_total_calls}")
    gop = GroverOp(oracle, k)
    rounds: list[CohSearchRound] = []
    result, calls = _drive_calls(_coh_search_steps(gop, rng, rounds), max_total_calls)
    verdict = "coherent" if result == "coherent" else "budget_exhausted"
    return CohSearchTrace(rounds=rounds, verdict=verdict, total_calls=calls)
