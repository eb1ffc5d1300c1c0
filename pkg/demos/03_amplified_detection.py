"""Detecting coherence without knowing the state: the full protocol.

One execution measures a single copy, takes the observed index k as the
only candidate for "the state is just |k>", and runs the exponential
schedule search: each round prepares the state bare and amplified by a
random Grover power, and any measurement that escapes k certifies
coherence (there are no false positives by construction).  Incoherent
inputs keep returning k forever, so a call budget realizes the
non-terminating branch finitely.
"""

from ampcoh import (
    DetectConfig,
    RngStream,
    basis_state,
    coh_search,
    detect_amplified,
    detect_boosted,
    geometric_coherence,
    state_with_coherence,
    synthesize,
)

rng = RngStream(seed=2)

print("=== one verbose search on a c = 0.2 state (d = 4) ===")
state = state_with_coherence(4, 0.2, rng)
k = geometric_coherence(state).k_max
oracle = synthesize(state)
trace = coh_search(oracle, k, rng, max_total_calls=100_000)
for rec in trace.rounds:
    print(
        f"  round {rec.ell}: M = {rec.M:3d}  bare -> {rec.first_outcome}"
        + (f", power j = {rec.j_sampled} -> {rec.second_outcome}" if rec.j_sampled else "")
    )
print(f"verdict: {trace.verdict} after {trace.total_calls} oracle calls")

print()
print("=== amplified detection across coherence levels (200 runs each) ===")
print("  c        success   mean calls")
for c in (0.25, 0.0625, 0.015625, 0.00390625):
    hits, calls = 0, 0
    for tr in RngStream(3).spawn(200):
        s = state_with_coherence(4, c, tr)
        o = synthesize(s)
        out = detect_amplified(o, DetectConfig(), tr)
        hits += out.verdict == "coherent"
        calls += out.total_calls
    print(f"  {c:<9.6g} {hits/200:7.3f}   {calls/200:8.1f}")

print()
print("=== incoherent input: the budget is the only exit ===")
oracle = synthesize(basis_state(4, 2))
out = detect_amplified(oracle, DetectConfig(max_total_calls=300), RngStream(4))
print(f"verdict: {out.verdict} (budget 300, spent {out.total_calls})")

print()
print("=== boosting to failure probability <= delta ===")
cfg = DetectConfig(delta=0.01)
print(f"delta = 0.01 -> r = {cfg.replicas} parallel replicas")
s = state_with_coherence(4, 0.05, RngStream(5))
o = synthesize(s)
out = detect_boosted(o, cfg, RngStream(6))
print(f"verdict: {out.verdict} by {out.stage}, pooled calls {out.total_calls}")
