"""Coherence estimation via phase estimation on the Grover operator.

Q_k rotates by 2 theta_k in the plane spanned by |k> and its in-state
complement, so its eigenvalues there are e^{+-2i theta_k} and the prepared
state splits into the two eigenvectors with equal weight.  Textbook phase
estimation with a t-qubit ancilla (grid size M = 2^t) therefore measures a
grid value y concentrated near M theta_k / pi or M (1 - theta_k / pi); both
branches fold onto the same estimate c_hat = sin^2(pi y / M) of
c_k = 1 - p_k.  A single run lands within

    2 pi sqrt(c_k (1 - c_k)) / M  +  pi^2 / M^2

of c_k with probability at least 8/pi^2; repeating an odd number of times
and taking the median boosts the confidence exponentially.  Estimates are
upper bounds on the geometric coherence up to the same error, because
c_k >= c for every k.

The ancilla register is simulated exactly as a flat (M x d) joint
statevector; every constituent application of the controlled unitary and
its inverse is charged to the oracle's controlled-call tally.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .amplify import GroverOp
from .core import PureState, RngStream, measure_basis
from .oracle import CallTally, CountedOracle

MAX_JOINT_DIM = 1 << 14  # ancilla grid times system dimension

_MEDIAN_GAP = 8.0 / math.pi ** 2 - 0.5  # per-run margin over a fair coin


class EnvelopeExceededError(ValueError):
    """Requested joint register exceeds the simulation envelope."""


def calls_for_accuracy(epsilon: float) -> int:
    """Smallest power-of-two grid M with pi/M + pi^2/M^2 <= epsilon.

    Uses the worst case sqrt(c (1 - c)) <= 1/2 in the single-run error
    bound, so one estimation pass at this M meets the target additive
    error for any state.  Scales as O(1/epsilon).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    m = 2
    while math.pi / m + math.pi ** 2 / m ** 2 > epsilon:
        m <<= 1
    return m


def default_repetitions(delta: float) -> int:
    """Odd repetition count for median boosting to confidence 1 - delta,
    from the Hoeffding bound with per-run success >= 8/pi^2."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return 2 * math.ceil(math.log(1.0 / delta) / (2.0 * _MEDIAN_GAP ** 2)) + 1


@dataclass(frozen=True)
class QpeConfig:
    """Phase-estimation settings: t ancilla qubits (grid M = 2^t), an odd
    number of repetitions for the median, and C step-1 copies used to pick
    the basis index."""

    t: int
    repetitions: int = 11
    epsilon: Optional[float] = None
    C: int = 5

    def __post_init__(self):
        if self.t < 1:
            raise ValueError(f"t must be >= 1, got {self.t}")
        if self.repetitions < 1 or self.repetitions % 2 == 0:
            raise ValueError(f"repetitions must be odd and positive, got {self.repetitions}")
        if self.C < 1:
            raise ValueError(f"C must be >= 1, got {self.C}")

    @property
    def M(self) -> int:
        return 1 << self.t

    @classmethod
    def for_accuracy(cls, epsilon: float, delta: float = 0.05, C: int = 5) -> "QpeConfig":
        m = calls_for_accuracy(epsilon)
        return cls(t=m.bit_length() - 1, repetitions=default_repetitions(delta), epsilon=epsilon, C=C)


@dataclass(frozen=True)
class EstimationResult:
    """Median estimate c_hat of c_k with its raw per-repetition grid values,
    the oracle-call tallies consumed, and the single-run error bound
    2 pi sqrt(c_hat (1 - c_hat))/M + pi^2/M^2 evaluated at the estimate."""

    c_hat: float
    k: int
    M: int
    raw_phases: list[int] = field(default_factory=list)
    calls: CallTally = CallTally(0, 0, 0)
    error_bound: float = 0.0


def _qpe_joint_probs(oracle: CountedOracle, gop: GroverOp, M: int) -> np.ndarray:
    """Exact ancilla outcome distribution of one phase-estimation pass.

    Simulates: ancilla in uniform superposition, controlled Q^(2^j) powers
    (each constituent Q charged as one controlled-inverse plus one
    controlled-forward call), inverse Fourier transform on the ancilla.
    """
    d = oracle.d
    if M * d > MAX_JOINT_DIM:
        raise EnvelopeExceededError(f"joint register dim {M * d} exceeds {MAX_JOINT_DIM}")
    sys0 = oracle.prepare()  # one forward call
    joint = PureState._wrap((np.ones(M, dtype=np.complex128)[:, None] * sys0.amps / math.sqrt(M)).reshape(-1))
    t = M.bit_length() - 1
    ancilla_index = np.arange(M)
    for j in range(t):
        control = (ancilla_index >> j) & 1 == 1
        for _ in range(1 << j):
            joint = gop.apply_controlled_q(joint, control)
    s = joint.amps.reshape(M, d)
    s = np.fft.fft(s, axis=0) / math.sqrt(M)  # inverse QFT on the ancilla index
    return (s.real ** 2 + s.imag ** 2).sum(axis=1)


def qpe_estimate_theta(oracle: CountedOracle, k: int, cfg: QpeConfig, rng: RngStream):
    """One phase-estimation pass on Q_k: returns (y, theta_hat = pi y / M)."""
    gop = GroverOp(oracle, k)
    probs = _qpe_joint_probs(oracle, gop, cfg.M)
    cdf = np.cumsum(probs)
    u = rng.gen.random() * cdf[-1]
    y = min(int(np.searchsorted(cdf, u, side="right")), cfg.M - 1)
    return y, math.pi * y / cfg.M


def qpe_outcome_distribution(oracle: CountedOracle, k: int, cfg: QpeConfig) -> np.ndarray:
    """Full length-M outcome distribution of one pass (no sampling)."""
    return _qpe_joint_probs(oracle, GroverOp(oracle, k), cfg.M)


def estimate_coherence(oracle: CountedOracle, cfg: QpeConfig, rng: RngStream) -> EstimationResult:
    """Measure C copies, pick the modal index k (ties toward the lowest),
    run phase estimation ``repetitions`` times, return the median estimate."""
    before = oracle.tally()
    outcomes = [measure_basis(oracle.prepare(), rng) for _ in range(cfg.C)]
    k = int(np.bincount(outcomes).argmax())  # argmax takes the lowest on ties

    M = cfg.M
    ys = []
    for _ in range(cfg.repetitions):
        y, _theta = qpe_estimate_theta(oracle, k, cfg, rng)
        ys.append(y)
    c_hats = np.sin(np.pi * np.asarray(ys, dtype=float) / M) ** 2
    mid = int(np.argsort(c_hats, kind="stable")[cfg.repetitions // 2])
    c_hat = float(c_hats[mid])
    after = oracle.tally()
    calls = CallTally(
        after.forward - before.forward,
        after.inverse - before.inverse,
        after.controlled - before.controlled,
    )
    bound = 2.0 * math.pi * math.sqrt(max(0.0, c_hat * (1.0 - c_hat))) / M + math.pi ** 2 / M ** 2
    return EstimationResult(
        c_hat=c_hat, k=k, M=M, raw_phases=ys, calls=calls, error_bound=bound
    )
