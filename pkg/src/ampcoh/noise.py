"""Per-oracle-call trajectory noise and the detection robustness sweep.

Noise is modeled as a stochastic mixture applied after every oracle call:
with probability 1 - p_err nothing happens, otherwise one sampled
realization of the chosen channel hits the state.  Simulation is by
quantum jumps on pure states, so ensemble averages over trajectories
recover the mixed-state channel; no density matrices are ever formed.

Channels:
  depolarizing  replace the state with a Haar-random pure state (the most
                destructive choice, hence the default),
  dephasing     multiply every amplitude by an independent uniform phase,
  basis-reset   collapse to a basis state drawn by the Born rule.

A detection run is only trusted if its trajectory stayed clean: a noise
event can itself flip a measurement outcome and trigger a spurious
"coherent" verdict (it does so on incoherent inputs too, certifying
nothing), so the sweep separates clean detections from noise-tainted
ones.  The clean-success rate realizes the (1 - p_err)^m suppression of
the noiseless success probability and collapses once p_err approaches
sqrt(c).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import PureState, RngStream, basis_state, measure_basis, random_pure_state, state_with_coherence
from .detect import DetectConfig, detect_amplified
from .oracle import CountedOracle, synthesize

CHANNELS = ("depolarizing", "dephasing", "basis-reset")


@dataclass(frozen=True)
class NoiseConfig:
    """Mixture weight and channel choice; fires after every oracle call."""

    p_err: float
    channel: str = "depolarizing"
    applies_after: str = "every-oracle-call"

    def __post_init__(self):
        if not 0.0 <= self.p_err <= 1.0:
            raise ValueError(f"p_err must lie in [0, 1], got {self.p_err}")
        if self.channel not in CHANNELS:
            raise ValueError(f"channel must be one of {CHANNELS}, got {self.channel!r}")
        if self.applies_after != "every-oracle-call":
            raise ValueError("only the every-oracle-call placement is supported")


def sample_channel(state: PureState, channel: str, rng: RngStream) -> PureState:
    """One realization of the channel (always fires)."""
    if channel == "depolarizing":
        return random_pure_state(state.dim, rng)
    if channel == "dephasing":
        phases = np.exp(2j * np.pi * rng.gen.random(state.dim))
        return PureState._wrap(state.amps * phases)
    if channel == "basis-reset":
        return basis_state(state.dim, measure_basis(state, rng))
    raise ValueError(f"unknown channel {channel!r}")


def apply_noise_trajectory(state: PureState, cfg: NoiseConfig, rng: RngStream) -> PureState:
    """With probability 1 - p_err return the state unchanged, otherwise
    apply one sampled channel realization."""
    if cfg.p_err > 0.0 and rng.gen.random() < cfg.p_err:
        return sample_channel(state, cfg.channel, rng)
    return state


class NoiseInjector:
    """Oracle post-call hook that injects noise and counts events."""

    def __init__(self, cfg: NoiseConfig, rng: RngStream):
        self.cfg = cfg
        self.rng = rng
        self.events = 0

    def __call__(self, state: PureState) -> PureState:
        if self.cfg.p_err > 0.0 and self.rng.gen.random() < self.cfg.p_err:
            self.events += 1
            return sample_channel(state, self.cfg.channel, self.rng)
        return state

    def reset(self):
        self.events = 0


def attach_noise(oracle: CountedOracle, cfg: NoiseConfig, rng: RngStream) -> NoiseInjector:
    """Install a counting noise hook on the oracle; returns the injector."""
    injector = NoiseInjector(cfg, rng)
    oracle.post_call = injector
    return injector


@dataclass(frozen=True)
class SweepCell:
    """Empirical rates for one (c, p_err) grid cell.

    success_rate counts coherent verdicts from clean trajectories only;
    detect_rate counts every coherent verdict, spurious or not.
    """

    c: float
    p_err: float
    trials: int
    success_rate: float
    detect_rate: float
    mean_calls: float


def noisy_detect_sweep(
    c_values,
    p_err_values,
    trials: int,
    rng: RngStream,
    d: int = 4,
    channel: str = "depolarizing",
    budget: int = 10_000,
) -> list[SweepCell]:
    """Amplified detection under per-call noise over a (c, p_err) grid."""
    if trials < 1:
        raise ValueError("trials must be positive")
    cells = []
    cfg = DetectConfig(max_total_calls=budget)
    for c in c_values:
        for p_err in p_err_values:
            ncfg = NoiseConfig(p_err=p_err, channel=channel)
            streams = rng.spawn(trials)
            clean_hits = 0
            hits = 0
            calls = 0
            for tr in streams:
                state = state_with_coherence(d, c, tr)
                oracle = synthesize(state)
                injector = attach_noise(oracle, ncfg, tr)
                outcome = detect_amplified(oracle, cfg, tr)
                if outcome.verdict == "coherent":
                    hits += 1
                    if injector.events == 0:
                        clean_hits += 1
                calls += outcome.total_calls
            cells.append(
                SweepCell(
                    c=float(c),
                    p_err=float(p_err),
                    trials=trials,
                    success_rate=clean_hits / trials,
                    detect_rate=hits / trials,
                    mean_calls=calls / trials,
                )
            )
    return cells
