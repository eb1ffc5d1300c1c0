"""Experiment orchestration: seeded trials, CSV emission, scaling fits.

Experiments
-----------
baseline-scaling    For each c, run the repeated-measurement detector with
                    its sufficient copy budget m = ceil(ln(1/delta)/c) per
                    trial; the per-c mean copies give the 1/c trend and
                    the verdicts give the empirical failure rate.
amplified-scaling   For each c, single executions of the amplified
                    detector; mean oracle calls give the 1/sqrt(c) trend.
estimation-scaling  For each c, phase-estimation coherence estimates at
                    the grid size meeting the configured epsilon.
noise-sweep         Amplified detection under per-call noise over the
                    (c, p_err) grid; verdicts distinguish clean coherent
                    detections ("coherent") from noise-tainted ones
                    ("coherent_noisy").
verify-formulas     Closed-form identity suites (no CSV).

Determinism: one root seed, per-trial child streams spawned in a fixed
enumeration order, rows sorted by (experiment, c, p_err, trial) before
writing, floats formatted to 12 significant digits.  Reruns with the same
config are byte-identical, regardless of the worker count.
"""

from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import amplify, estimate, measures, noise
from .core import RngStream, state_with_coherence
from .detect import DetectConfig, baseline_detect, detect_amplified
from .estimate import QpeConfig, calls_for_accuracy, default_repetitions
from .measures import baseline_copy_budget, geometric_coherence, verify_appendix_norms
from .noise import NoiseConfig, attach_noise
from .oracle import synthesize

EXPERIMENTS = (
    "baseline-scaling",
    "amplified-scaling",
    "estimation-scaling",
    "noise-sweep",
    "verify-formulas",
)

SCHEMA_VERSION = 1

TRIAL_COLUMNS = (
    "experiment",
    "d",
    "c_true",
    "seed",
    "trial_id",
    "verdict",
    "calls_forward",
    "calls_inverse",
    "calls_controlled",
    "copies_consumed",
    "c_hat",
    "abs_error",
    "p_err",
)

DEFAULT_C_GRID = tuple(2.0 ** -i for i in range(2, 11))
DEFAULT_P_ERR_GRID = (0.0, 1e-3, 1e-2, 1e-1)


class ConfigError(ValueError):
    """Invalid experiment configuration; names the offending field."""

    def __init__(self, fieldname: str, message: str):
        super().__init__(f"config field '{fieldname}': {message}")
        self.field = fieldname


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    d: int = 4
    c_grid: tuple = DEFAULT_C_GRID
    delta: float = 0.05
    epsilon: float = 0.1
    trials: int = 200
    seed: int = 20260811
    budget: int = 100_000
    out: Optional[str] = None
    p_err_grid: tuple = DEFAULT_P_ERR_GRID
    channel: str = "depolarizing"
    workers: int = 1

    def validate(self) -> None:
        """Check every numeric range before any trial runs."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"must be one of {EXPERIMENTS}, got {self.experiment!r}")
        if not 2 <= self.d <= 64:
            raise ConfigError("d", f"must lie in [2, 64], got {self.d}")
        if len(self.c_grid) == 0:
            raise ConfigError("c-grid", "must contain at least one value")
        for c in self.c_grid:
            if not 0.0 < c <= 1.0 - 1.0 / self.d + 1e-15:
                raise ConfigError("c-grid", f"values must lie in (0, 1 - 1/d], got {c}")
        if not 0.0 < self.delta < 0.5:
            raise ConfigError("delta", f"must lie in (0, 1/2), got {self.delta}")
        if not 0.0 < self.epsilon < 1.0:
            raise ConfigError("epsilon", f"must lie in (0, 1), got {self.epsilon}")
        if self.trials < 1:
            raise ConfigError("trials", f"must be >= 1, got {self.trials}")
        if self.seed < 0:
            raise ConfigError("seed", f"must be nonnegative, got {self.seed}")
        if self.budget < 1:
            raise ConfigError("budget", f"must be >= 1, got {self.budget}")
        for p in self.p_err_grid:
            if not 0.0 <= p <= 1.0:
                raise ConfigError("p-err-grid", f"values must lie in [0, 1], got {p}")
        if self.channel not in noise.CHANNELS:
            raise ConfigError("channel", f"must be one of {noise.CHANNELS}, got {self.channel!r}")
        if self.workers < 1:
            raise ConfigError("workers", f"must be >= 1, got {self.workers}")


@dataclass(frozen=True)
class TrialRecord:
    """One benchmark row; columns are fixed by TRIAL_COLUMNS (schema v1)."""

    experiment: str
    d: int
    c_true: float
    seed: int
    trial_id: int
    verdict: str
    calls_forward: int
    calls_inverse: int
    calls_controlled: int
    copies_consumed: int
    c_hat: Optional[float] = None
    abs_error: Optional[float] = None
    p_err: Optional[float] = None

    def to_row(self) -> list[str]:
        return [
            self.experiment,
            str(self.d),
            _fmt(self.c_true),
            str(self.seed),
            str(self.trial_id),
            self.verdict,
            str(self.calls_forward),
            str(self.calls_inverse),
            str(self.calls_controlled),
            str(self.copies_consumed),
            _fmt(self.c_hat),
            _fmt(self.abs_error),
            _fmt(self.p_err),
        ]


def _fmt(x: Optional[float]) -> str:
    # 12 significant digits, decimal point, no locale.
    return "" if x is None else format(float(x), ".12g")


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    stderr: float


def fit_loglog(points) -> FitResult:
    """Ordinary least squares on (log x, log y) pairs."""
    pts = [(float(x), float(y)) for x, y in points]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points, got {len(pts)}")
    if any(x <= 0 or y <= 0 for x, y in pts):
        raise ValueError("all coordinates must be positive for a log-log fit")
    lx = np.log([x for x, _ in pts])
    ly = np.log([y for _, y in pts])
    n = len(pts)
    mx = lx.mean()
    sxx = float(np.sum((lx - mx) ** 2))
    slope = float(np.sum((lx - mx) * (ly - ly.mean())) / sxx)
    intercept = float(ly.mean() - slope * mx)
    resid = ly - (intercept + slope * lx)
    sigma2 = float(np.sum(resid ** 2) / max(n - 2, 1))
    return FitResult(slope=slope, intercept=intercept, stderr=math.sqrt(sigma2 / sxx))


# ---------------------------------------------------------------------------
# Trial runners.  Module-level functions so a process pool can pickle them.
# Each task is pure: (config fields, cell, trial id, child stream) -> row.


def _baseline_trial(task) -> TrialRecord:
    cfg, c, trial_id, stream = task
    state = state_with_coherence(cfg.d, c, stream)
    # Detection needs at least two outcomes to compare.
    m = max(2, baseline_copy_budget(c, cfg.delta))
    out = baseline_detect(state, m, stream)
    return TrialRecord(
        experiment=cfg.experiment,
        d=cfg.d,
        c_true=c,
        seed=cfg.seed,
        trial_id=trial_id,
        verdict=out.verdict,
        calls_forward=out.calls_forward,
        calls_inverse=0,
        calls_controlled=0,
        copies_consumed=m,
    )


def _amplified_trial(task) -> TrialRecord:
    cfg, c, trial_id, stream = task
    state = state_with_coherence(cfg.d, c, stream)
    oracle = synthesize(state)
    out = detect_amplified(oracle, DetectConfig(max_total_calls=cfg.budget), stream)
    return TrialRecord(
        experiment=cfg.experiment,
        d=cfg.d,
        c_true=c,
        seed=cfg.seed,
        trial_id=trial_id,
        verdict=out.verdict,
        calls_forward=out.calls_forward,
        calls_inverse=out.calls_inverse,
        calls_controlled=0,
        copies_consumed=0,
    )


def _estimation_trial(task) -> TrialRecord:
    cfg, c, trial_id, stream = task
    state = state_with_coherence(cfg.d, c, stream)
    oracle = synthesize(state)
    qcfg = QpeConfig.for_accuracy(cfg.epsilon, delta=cfg.delta)
    res = estimate.estimate_coherence(oracle, qcfg, stream)
    c_k = 1.0 - float(geometric_coherence(state).probs[res.k])
    return TrialRecord(
        experiment=cfg.experiment,
        d=cfg.d,
        c_true=c,
        seed=cfg.seed,
        trial_id=trial_id,
        verdict="estimated",
        calls_forward=res.calls.forward,
        calls_inverse=res.calls.inverse,
        calls_controlled=res.calls.controlled,
        copies_consumed=0,
        c_hat=res.c_hat,
        abs_error=abs(res.c_hat - c_k),
    )


def _noise_trial(task) -> TrialRecord:
    cfg, (c, p_err), trial_id, stream = task
    state = state_with_coherence(cfg.d, c, stream)
    oracle = synthesize(state)
    injector = attach_noise(oracle, NoiseConfig(p_err=p_err, channel=cfg.channel), stream)
    out = detect_amplified(oracle, DetectConfig(max_total_calls=cfg.budget), stream)
    if out.verdict == "coherent":
        verdict = "coherent" if injector.events == 0 else "coherent_noisy"
    else:
        verdict = "undecided"
    return TrialRecord(
        experiment=cfg.experiment,
        d=cfg.d,
        c_true=c,
        seed=cfg.seed,
        trial_id=trial_id,
        verdict=verdict,
        calls_forward=out.calls_forward,
        calls_inverse=out.calls_inverse,
        calls_controlled=0,
        copies_consumed=0,
        p_err=p_err,
    )


_RUNNERS = {
    "baseline-scaling": (_baseline_trial, lambda cfg: sorted(cfg.c_grid)),
    "amplified-scaling": (_amplified_trial, lambda cfg: sorted(cfg.c_grid)),
    "estimation-scaling": (_estimation_trial, lambda cfg: sorted(cfg.c_grid)),
    "noise-sweep": (
        _noise_trial,
        lambda cfg: [(c, p) for c in sorted(cfg.c_grid) for p in sorted(cfg.p_err_grid)],
    ),
}


def run_rows(cfg: ExperimentConfig) -> list[TrialRecord]:
    """Execute every trial of one experiment and return sorted rows."""
    cfg.validate()
    if cfg.experiment == "verify-formulas":
        raise ValueError("verify-formulas produces no trial rows; use verify_formulas()")
    runner, cell_fn = _RUNNERS[cfg.experiment]
    cells = cell_fn(cfg)
    streams = RngStream(cfg.seed).spawn(len(cells) * cfg.trials)
    tasks = []
    i = 0
    for cell in cells:
        for trial_id in range(cfg.trials):
            tasks.append((cfg, cell, trial_id, streams[i]))
            i += 1
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(runner, tasks, chunksize=64))
    else:
        rows = [runner(t) for t in tasks]
    rows.sort(key=lambda r: (r.experiment, r.c_true, -1.0 if r.p_err is None else r.p_err, r.trial_id))
    return rows


def write_csv(path: str, rows: list[TrialRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_COLUMNS)
        for r in rows:
            w.writerow(r.to_row())


def _cell_stats(rows: list[TrialRecord]):
    """Group rows by (c, p_err) and aggregate the quantities summaries use."""
    cells: dict = {}
    for r in rows:
        key = (r.c_true, r.p_err)
        cells.setdefault(key, []).append(r)
    out = []
    for (c, p_err), grp in sorted(cells.items(), key=lambda kv: (kv[0][0], kv[0][1] or 0.0)):
        n = len(grp)
        copies = float(np.mean([g.copies_consumed for g in grp]))
        calls = float(np.mean([g.calls_forward + g.calls_inverse for g in grp]))
        coherent = sum(g.verdict == "coherent" for g in grp) / n
        errors = [g.abs_error for g in grp if g.abs_error is not None]
        out.append(
            {
                "c": c,
                "p_err": p_err,
                "n": n,
                "mean_copies": copies,
                "mean_calls": calls,
                "coherent_rate": coherent,
                "mean_abs_error": float(np.mean(errors)) if errors else None,
            }
        )
    return out


def summarize(cfg: ExperimentConfig, rows: list[TrialRecord]) -> str:
    lines = [f"experiment={cfg.experiment} d={cfg.d} trials/cell={cfg.trials} seed={cfg.seed}"]
    stats = _cell_stats(rows)
    if cfg.experiment == "baseline-scaling":
        for s in stats:
            lines.append(
                f"  c={s['c']:.6g}  mean copies={s['mean_copies']:.6g}  "
                f"failure rate={1.0 - s['coherent_rate']:.4g}"
            )
        if len(stats) >= 3:
            fit = fit_loglog([(s["c"], s["mean_copies"]) for s in stats])
            lines.append(f"  log-log slope of copies vs c: {fit.slope:+.4f} +- {fit.stderr:.4f}")
    elif cfg.experiment == "amplified-scaling":
        for s in stats:
            lines.append(
                f"  c={s['c']:.6g}  mean oracle calls={s['mean_calls']:.6g}  "
                f"success rate={s['coherent_rate']:.4g}"
            )
        if len(stats) >= 3:
            fit = fit_loglog([(s["c"], s["mean_calls"]) for s in stats])
            lines.append(f"  log-log slope of calls vs c: {fit.slope:+.4f} +- {fit.stderr:.4f}")
    elif cfg.experiment == "estimation-scaling":
        m = calls_for_accuracy(cfg.epsilon)
        lines.append(f"  grid M={m} repetitions={default_repetitions(cfg.delta)} for epsilon={cfg.epsilon}")
        for s in stats:
            lines.append(f"  c={s['c']:.6g}  mean |c_hat - c_k|={s['mean_abs_error']:.6g}")
        eps_grid = [2.0 ** -i for i in range(2, 9)]
        fit = fit_loglog([(e, float(calls_for_accuracy(e))) for e in eps_grid])
        mc = fit_loglog([(e, 0.25 / e ** 2) for e in eps_grid])
        lines.append(
            f"  required-M vs epsilon slope: {fit.slope:+.4f} +- {fit.stderr:.4f}"
            f"  (Monte Carlo reference slope: {mc.slope:+.4f})"
        )
    elif cfg.experiment == "noise-sweep":
        for s in stats:
            lines.append(
                f"  c={s['c']:.6g} p_err={s['p_err']:.6g}  clean success={s['coherent_rate']:.4g}  "
                f"mean calls={s['mean_calls']:.6g}"
            )
    return "\n".join(lines)


@dataclass(frozen=True)
class BenchResult:
    rows: list[TrialRecord]
    summary: str
    csv_path: Optional[str]


def run(cfg: ExperimentConfig) -> BenchResult:
    """Run one experiment: execute trials, write the CSV, build the summary."""
    cfg.validate()
    rows = run_rows(cfg)
    path = cfg.out or f"{cfg.experiment}.csv"
    write_csv(path, rows)
    summary = summarize(cfg, rows)
    return BenchResult(rows=rows, summary=summary, csv_path=path)


# ---------------------------------------------------------------------------
# Closed-form identity suites (the `verify` subcommand).


def verify_formulas(seed: int = 20260811) -> list[tuple[str, bool, str]]:
    """Run every closed-form identity suite; all must pass for exit 0."""
    checks = []

    # Grover rotation closed form on random states.
    rng = RngStream(seed, 1)
    worst = 0.0
    from .core import random_pure_state  # local import to keep module top light

    for i in range(100):
        d = int(rng.gen.choice([2, 4, 8, 16]))
        state = random_pure_state(d, rng)
        k = int(rng.gen.integers(d))
        m = int(rng.gen.integers(0, 51))
        oracle = synthesize(state)
        theta = float(geometric_coherence(state).theta[k])
        s = amplify.grover_state(oracle, k, m)
        p_keep = float(abs(s.amps[k]) ** 2)
        worst = max(worst, abs(p_keep - math.cos((2 * m + 1) * theta) ** 2))
    checks.append(("grover-rotation-closed-form", worst < 1e-10, f"max deviation {worst:.3e}"))

    # Averaged-success identity against the direct sum, plus the 1/4 floor.
    thetas = np.linspace(0.01, math.pi / 2 - 0.01, 100)
    worst = 0.0
    floor_ok = True
    for theta in thetas:
        for M in range(1, 101):
            closed = amplify.averaged_success(float(theta), M)
            brute = float(np.mean(np.sin((2 * np.arange(M) + 1) * theta) ** 2))
            worst = max(worst, abs(closed - brute))
            if M >= 1.0 / math.sin(2 * theta) and closed < 0.25 - 1e-12:
                floor_ok = False
    checks.append(("averaged-success-identity", worst < 1e-12, f"max deviation {worst:.3e}"))
    checks.append(("averaged-success-floor", floor_ok, "P >= 1/4 whenever M >= 1/sin(2 theta)"))

    # Helstrom error against a tensor-power trace-distance computation.
    from .core import PureState
    from .measures import helstrom_error, pure_trace_distance

    worst = 0.0
    for p in np.linspace(0.05, 0.95, 10):
        a = PureState([math.sqrt(p), math.sqrt(1 - p)])
        for m in (1, 2, 3):
            amps = a.amps
            for _ in range(m - 1):
                amps = np.kron(amps, a.amps)
            big = PureState._wrap(amps)
            ref = np.zeros(2 ** m, dtype=np.complex128)
            ref[0] = 1.0
            dist = pure_trace_distance(big, PureState._wrap(ref))
            worst = max(worst, abs(helstrom_error(float(p), m) - 0.5 * (1 - dist)))
    checks.append(("helstrom-vs-trace-distance", worst < 1e-12, f"max deviation {worst:.3e}"))

    # Operator-norm identity on random states.
    rng = RngStream(seed, 2)
    all_pass = True
    worst = 0.0
    for i in range(1000):
        d = int(rng.gen.choice([2, 4, 8]))
        chk = verify_appendix_norms(random_pure_state(d, rng))
        worst = max(worst, abs(chk.lhs_opnorm - chk.closed_form))
        all_pass = all_pass and chk.passed
    checks.append(("operator-norm-identity", all_pass, f"max deviation {worst:.3e} over 1000 states"))

    return checks
