"""Coherence detectors: repeated sampling, amplified search, parallel boost.

baseline_detect measures independent copies in the incoherent basis and
declares coherence iff two distinct outcomes show up, so it can never
produce a false positive.  detect_amplified measures C copies (default
C = 1), then hands the observed index to the amplitude-amplified search.
detect_boosted runs r logically-parallel replicas of the amplified
detector, interleaved round-robin one oracle call at a time so the pooled
tally reflects the true parallel cost, and returns on the first coherent
verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .amplify import DEFAULT_BUDGET, CohSearchRound, GroverOp, _coh_search_steps, _drive_calls
from .core import PureState, RngStream, measure_basis, measure_many
from .oracle import CountedOracle


@dataclass(frozen=True)
class DetectConfig:
    """Knobs for the amplified/boosted detectors.

    r defaults to ceil(log2(1/delta)), minimum 1.  With the default C = 1
    step 1 can never fire (a single outcome has nothing to differ from),
    so detection rests entirely on the search stage.
    """

    C: int = 1
    delta: float = 0.05
    r: Optional[int] = None
    max_total_calls: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.C < 1:
            raise ValueError(f"C must be >= 1, got {self.C}")
        if not 0.0 < self.delta < 0.5:
            raise ValueError(f"delta must lie in (0, 1/2), got {self.delta}")
        if self.r is not None and self.r < 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if self.max_total_calls < 1:
            raise ValueError("max_total_calls must be positive")

    @property
    def replicas(self) -> int:
        if self.r is not None:
            return self.r
        return max(1, math.ceil(math.log2(1.0 / self.delta)))


@dataclass(frozen=True)
class DetectionOutcome:
    """Verdict plus the oracle-call accounting for one detection run.

    verdict is "coherent" or "undecided" (budget ran out first; the only
    failure mode, since a coherent verdict requires an actually observed
    second outcome).  stage records where the run decided: "step1",
    "step2", or "replica-<i>" for the boosted detector.  k_observed is the
    index handed to the search stage (None if step 1 already decided).
    """

    verdict: str
    stage: str
    calls_forward: int
    calls_inverse: int
    k_observed: Optional[int] = None

    @property
    def total_calls(self) -> int:
        return self.calls_forward + self.calls_inverse


def baseline_detect(state: PureState, m_copies: int, rng: RngStream) -> DetectionOutcome:
    """Measure m_copies independent copies; coherent iff outcomes differ.

    Consumes m_copies state copies, tracked as forward calls for
    comparability with the oracle protocols.
    """
    if m_copies < 2:
        raise ValueError(f"m_copies must be >= 2, got {m_copies}")
    ks = measure_many(state, rng, m_copies)
    coherent = bool(np.any(ks != ks[0]))
    return DetectionOutcome(
        verdict="coherent" if coherent else "undecided",
        stage="step1",
        calls_forward=m_copies,
        calls_inverse=0,
    )


class _Decision(NamedTuple):
    verdict: str
    stage: str
    k: Optional[int]


def _amplified_steps(oracle: CountedOracle, cfg: DetectConfig, rng: RngStream, progress: dict):
    """Amplified detection as a call-stepped generator (one yield per call)."""
    outcomes = []
    for _ in range(cfg.C):
        yield
        s = oracle.prepare()
        outcomes.append(measure_basis(s, rng))
    if len(set(outcomes)) > 1:
        return _Decision("coherent", "step1", None)
    k = outcomes[0]
    progress["stage"] = "step2"
    progress["k"] = k
    # On a clean trajectory the promise p_k > 0 holds by construction (k was
    # just observed).  A noise event can break it; the search must still run
    # physically, and then fires on the next fresh preparation.
    gop = GroverOp(oracle, k, require_overlap=False)
    rounds: list[CohSearchRound] = progress.setdefault("rounds", [])
    verdict = yield from _coh_search_steps(gop, rng, rounds)
    return _Decision(verdict, "step2", k)


def detect_amplified(oracle: CountedOracle, cfg: DetectConfig, rng: RngStream) -> DetectionOutcome:
    """Single execution of the amplified detector (measure, then search)."""
    before = oracle.tally()
    progress: dict = {"stage": "step1", "k": None}
    decision, _calls = _drive_calls(_amplified_steps(oracle, cfg, rng, progress), cfg.max_total_calls)
    after = oracle.tally()
    if decision is None:
        decision = _Decision("undecided", progress["stage"], progress["k"])
    verdict = "coherent" if decision.verdict == "coherent" else "undecided"
    return DetectionOutcome(
        verdict=verdict,
        stage=decision.stage,
        calls_forward=after.forward - before.forward,
        calls_inverse=after.inverse - before.inverse,
        k_observed=decision.k,
    )


def detect_boosted(oracle: CountedOracle, cfg: DetectConfig, rng: RngStream) -> DetectionOutcome:
    """r logically-parallel replicas, first coherent verdict wins.

    Replicas share the oracle (so tallies pool into the true parallel
    cost) but own independent child RNG streams.  Scheduling is
    round-robin, one oracle call per replica per round, which makes the
    accounting deterministic given the seed.
    """
    r = cfg.replicas
    before = oracle.tally()
    streams = rng.spawn(r)
    progresses = [{"stage": "step1", "k": None} for _ in range(r)]
    gens = [_amplified_steps(oracle, cfg, streams[i], progresses[i]) for i in range(r)]
    for g in gens:
        next(g)  # run each replica to its first pending call

    calls = 0
    decision = None
    winner = None
    while decision is None and calls < cfg.max_total_calls:
        for i, g in enumerate(gens):
            if calls >= cfg.max_total_calls:
                break
            calls += 1
            try:
                next(g)
            except StopIteration as stop:
                decision = stop.value
                winner = i
                break
    for g in gens:
        g.close()
    after = oracle.tally()

    if decision is not None and decision.verdict == "coherent":
        return DetectionOutcome(
            verdict="coherent",
            stage=f"replica-{winner}",
            calls_forward=after.forward - before.forward,
            calls_inverse=after.inverse - before.inverse,
            k_observed=decision.k,
        )
    return DetectionOutcome(
        verdict="undecided",
        stage="step2",
        calls_forward=after.forward - before.forward,
        calls_inverse=after.inverse - before.inverse,
        k_observed=None,
    )
