"""How much per-call noise the amplified detector tolerates.

After every oracle call the state suffers a sampled channel realization
with probability p_err (quantum-jump trajectories; the default channel
replaces the state with a Haar-random one, the most destructive choice).
A detection only counts as a success if its trajectory stayed clean: a
noise event can flip a measurement outcome and fire a spurious coherent
verdict, which certifies nothing.  Since a run at coherence c consumes
~1/sqrt(c) calls, clean success survives while p_err << sqrt(c) and
collapses beyond it.
"""

import math

from ampcoh import RngStream, noisy_detect_sweep

C_VALUES = (0.04, 0.01, 0.0025)
P_ERRS = (0.0, 1e-3, 1e-2, 3e-2, 1e-1, 3e-1)

cells = noisy_detect_sweep(C_VALUES, P_ERRS, trials=400, rng=RngStream(11), d=4)

by_c = {}
for cell in cells:
    by_c.setdefault(cell.c, []).append(cell)

header = "  p_err:" + "".join(f"{p:>9.4g}" for p in P_ERRS)
print("clean success rate (detections on noise-free trajectories)")
print(header)
for c, row in by_c.items():
    rates = "".join(f"{cell.success_rate:9.3f}" for cell in row)
    print(f"c={c:<7.4g}{rates}   sqrt(c)={math.sqrt(c):.3f}")

print()
print("raw coherent-verdict rate (including noise-triggered ones)")
print(header)
for c, row in by_c.items():
    rates = "".join(f"{cell.detect_rate:9.3f}" for cell in row)
    print(f"c={c:<7.4g}{rates}")

print()
print("mean oracle calls per run")
print(header)
for c, row in by_c.items():
    calls = "".join(f"{cell.mean_calls:9.1f}" for cell in row)
    print(f"c={c:<7.4g}{calls}")
