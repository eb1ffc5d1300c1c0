"""Coherence profiles, distances, and the closed-form detection bounds.

Walks through the quantities everything else is built on: the geometric
measure of coherence c = 1 - max_k |<k|psi>|^2, the per-index rotation
angles theta_k, the trace distance to the nearest basis state, the
Helstrom error for discriminating m copies, and the copy budget that
pushes the repeated-measurement detector's failure rate below delta.
"""

import math

import numpy as np

from ampcoh import (
    PureState,
    RngStream,
    baseline_copy_budget,
    basis_state,
    geometric_coherence,
    helstrom_error,
    pure_trace_distance,
    random_pure_state,
)

rng = RngStream(seed=1)

print("=== coherence profiles ===")
for label, state in [
    ("|0>            ", basis_state(2, 0)),
    ("|+>            ", PureState([math.sqrt(0.5), math.sqrt(0.5)])),
    ("sqrt(.75),sqrt(.25)", PureState([math.sqrt(0.75), math.sqrt(0.25)])),
    ("Haar random d=4", random_pure_state(4, rng)),
]:
    prof = geometric_coherence(state)
    print(
        f"{label}  c = {prof.c:.4f}  k_max = {prof.k_max}  "
        f"theta_kmax = {prof.theta[prof.k_max]:.4f} rad"
    )

print()
print("=== trace distance to the nearest basis state ===")
plus = PureState([math.sqrt(0.5), math.sqrt(0.5)])
print(f"D(|0>, |+>) = {pure_trace_distance(basis_state(2, 0), plus):.6f}  (sqrt(1/2))")

print()
print("=== Helstrom error vs copies, p_kmax = 0.9 ===")
for m in (1, 5, 10, 20, 40):
    print(f"  m = {m:3d}   P_err = {helstrom_error(0.9, m):.5f}")

print()
print("=== copies needed for failure <= delta (repeated measurement) ===")
for c in (0.25, 0.1, 0.01, 0.001):
    for delta in (0.05, 0.01):
        print(f"  c = {c:<6}  delta = {delta:<5}  m = {baseline_copy_budget(c, delta)}")

# The budget grows like 1/c: halving the coherence doubles the copies.
cs = np.array([2.0 ** -i for i in range(2, 11)])
ms = np.array([baseline_copy_budget(float(c), 0.05) for c in cs])
slope = np.polyfit(np.log(cs), np.log(ms), 1)[0]
print(f"\nlog-log slope of the budget across c = 2^-2..2^-10: {slope:+.3f}")
