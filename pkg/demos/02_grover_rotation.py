"""The Grover rotation picture behind amplitude-amplified detection.

Q_k = V_psi V_k rotates the prepared state by 2 theta_k per application in
the plane spanned by |k> and its in-state complement, so after m
applications a basis measurement escapes k with probability
sin^2((2m+1) theta_k).  The simulator charges every V_psi as one inverse
plus one forward oracle call, which is where the sqrt speedup's cost
accounting comes from.
"""

import math

from ampcoh import (
    PureState,
    averaged_success,
    detection_probability,
    geometric_coherence,
    grover_state,
    synthesize,
)

# p_0 = 0.9: weak coherence, theta ~ 0.32 rad.
state = PureState([math.sqrt(0.9), math.sqrt(0.1)])
prof = geometric_coherence(state)
theta = prof.theta[0]
print(f"state: p_0 = 0.9, theta_0 = {theta:.5f} rad, c = {prof.c}")
print()
print(" m   simulated P(escape)   sin^2((2m+1)theta)   oracle calls")
for m in range(0, 8):
    oracle = synthesize(state)
    out = grover_state(oracle, 0, m)
    p_sim = 1.0 - abs(out.amps[0]) ** 2
    p_formula = detection_probability(theta, m)
    t = oracle.tally()
    print(f"{m:2d}   {p_sim:18.12f}   {p_formula:18.12f}   {t.forward}+{t.inverse}")

best_m = math.floor(math.pi / (4 * theta) - 0.5)
print(f"\nbest fixed power: m = {best_m}, escape probability "
      f"{detection_probability(theta, best_m):.6f}")

# Without knowing theta, drawing the power uniformly from {0..M-1} still
# succeeds with probability >= 1/4 once M reaches 1/sin(2 theta).
M_crit = math.ceil(1.0 / math.sin(2 * theta))
print(f"critical schedule size 1/sin(2 theta) ~ {M_crit}")
for M in sorted({1, 2, 4, M_crit, 2 * M_crit}):
    print(f"  M = {M:3d}   mean escape probability = {averaged_success(theta, M):.4f}")
