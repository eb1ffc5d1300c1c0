"""The headline separation: 1/c copies vs 1/sqrt(c) oracle calls.

Runs a reduced version of the scaling benchmark (the CLI runs the full
one) and fits both log-log trends.  The baseline detector needs
ceil(ln(1/delta)/c) copies for a delta guarantee; the amplified detector's
expected calls per execution grow only like 1/sqrt(c), so the gap at
small c is roughly sqrt(1/c).
"""

from ampcoh.bench import ExperimentConfig, fit_loglog, run_rows

GRID = tuple(2.0 ** -i for i in range(2, 9))
TRIALS = 150

series = {}
for experiment in ("baseline-scaling", "amplified-scaling"):
    cfg = ExperimentConfig(experiment=experiment, d=4, c_grid=GRID, trials=TRIALS, seed=42)
    rows = run_rows(cfg)
    cells = {}
    for r in rows:
        cost = r.copies_consumed if experiment == "baseline-scaling" else (
            r.calls_forward + r.calls_inverse
        )
        cells.setdefault(r.c_true, []).append(cost)
    series[experiment] = sorted((c, sum(v) / len(v)) for c, v in cells.items())

print(f"{TRIALS} trials per cell, d = 4")
print("  c          baseline copies   amplified calls   ratio")
for (c, base), (_, amp) in zip(*series.values()):
    print(f"  {c:<10.6g} {base:15.1f} {amp:17.1f} {base / amp:8.1f}")

for name, pts in series.items():
    fit = fit_loglog(pts)
    print(f"{name}: slope {fit.slope:+.3f} +- {fit.stderr:.3f}")

print("\nFull figure-quality data: ampcoh scaling --trials 1000 --out scaling.csv")
print("(then render with the companion plots package)")
