"""Coherence measures, state distances, and closed-form error bounds.

Also provides the numerical check that the operator-norm distance between
the state-preparation unitary and its nearest incoherent counterpart
matches the 2|sin(theta/2)| closed form and its sqrt(2)sqrt(1 - p) bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import DimensionMismatchError, PureState


class IncoherentInputError(ValueError):
    """A quantity is undefined for an incoherent (basis) state."""


@dataclass(frozen=True)
class CoherenceProfile:
    """Per-basis-index view of a state's coherence.

    probs[k] = |<k|psi>|^2, k_max is the argmax (ties broken toward the
    lowest index), c = 1 - probs[k_max] is the geometric coherence, and
    theta[k] = arccos sqrt(probs[k]) so cos^2(theta[k]) = probs[k].
    """

    probs: np.ndarray
    k_max: int
    c: float
    theta: np.ndarray


def geometric_coherence(state: PureState) -> CoherenceProfile:
    """Geometric measure of coherence: one minus the largest basis overlap."""
    p = state.probs()
    k_max = int(np.argmax(p))  # np.argmax returns the lowest index on ties
    c = float(1.0 - p[k_max])
    theta = np.arccos(np.clip(np.sqrt(p), 0.0, 1.0))
    return CoherenceProfile(probs=p, k_max=k_max, c=c, theta=theta)


def pure_trace_distance(a: PureState, b: PureState) -> float:
    """Trace distance between pure states: sqrt(1 - |<a|b>|^2)."""
    if a.dim != b.dim:
        raise DimensionMismatchError(f"dim {a.dim} vs {b.dim}")
    ov = abs(a.overlap(b)) ** 2
    return math.sqrt(max(0.0, 1.0 - min(ov, 1.0)))


def helstrom_error(p_kmax: float, m: int) -> float:
    """Minimal error probability for discriminating m copies of the state
    from m copies of its nearest basis state: (1 - sqrt(1 - p^m)) / 2."""
    if not 0.0 <= p_kmax <= 1.0:
        raise ValueError(f"p_kmax must lie in [0, 1], got {p_kmax}")
    if m < 1:
        raise ValueError(f"m must be a positive integer, got {m}")
    return 0.5 * (1.0 - math.sqrt(max(0.0, 1.0 - p_kmax ** m)))


def baseline_copy_budget(c: float, delta: float) -> int:
    """Copies sufficient for the repeated-measurement detector to fail with
    probability at most delta: ceil(ln(1/delta) / c)."""
    if not 0.0 < delta < 0.5:
        raise ValueError(f"delta must lie in (0, 1/2), got {delta}")
    if c == 0.0:
        raise IncoherentInputError("copy budget is undefined at c = 0")
    if not 0.0 < c <= 1.0:
        raise ValueError(f"c must lie in (0, 1], got {c}")
    return math.ceil(math.log(1.0 / delta) / c)


@dataclass(frozen=True)
class NormCheck:
    """Result of the operator-norm identity check."""

    lhs_opnorm: float
    closed_form: float
    upper_bound: float
    passed: bool


def _complete_onb(cols: list[np.ndarray], dim: int) -> list[np.ndarray]:
    # Gram-Schmidt over canonical vectors with pivot skipping: candidates
    # whose residual norm is <= 1e-10 are dropped.  Two projection passes
    # keep the result orthonormal to ~1e-14.
    basis = list(cols)
    added = []
    for j in range(dim):
        if len(basis) == dim:
            break
        v = np.zeros(dim, dtype=np.complex128)
        v[j] = 1.0
        for _ in range(2):
            for b in basis:
                v = v - b * np.vdot(b, v)
        n = float(np.linalg.norm(v))
        if n > 1e-10:
            v = v / n
            basis.append(v)
            added.append(v)
    if len(basis) != dim:
        raise RuntimeError("orthonormal completion failed")  # unreachable for valid input
    return added


def verify_appendix_norms(state: PureState) -> NormCheck:
    """Check ||U_kmax - U_psi|| = 2|sin(theta/2)| and <= sqrt(2)sqrt(1-p).

    Builds the two unitaries explicitly: both map |0> -> closest basis
    state resp. the state itself, |1> -> the matching orthogonal partner,
    and share one orthonormal completion on the remaining indices.  The
    left-hand side is computed numerically as the largest singular value.
    An incoherent input is allowed and passes trivially with value 0.
    """
    d = state.dim
    prof = geometric_coherence(state)
    k = prof.k_max
    p = float(prof.probs[k])
    cos_t = math.sqrt(min(p, 1.0))
    sin_t = math.sqrt(max(0.0, 1.0 - p))
    theta = math.atan2(sin_t, cos_t)

    # Fix the global phase so <k|psi> is real and nonnegative.
    amp_k = state.amps[k]
    phase = amp_k / abs(amp_k) if abs(amp_k) > 0 else 1.0
    psi = state.amps / phase

    e_k = np.zeros(d, dtype=np.complex128)
    e_k[k] = 1.0
    if sin_t > 1e-12:
        perp = (psi - cos_t * e_k) / sin_t
        perp = perp / np.linalg.norm(perp)
    else:
        # Incoherent input: any direction orthogonal to |k> will do.
        perp = np.zeros(d, dtype=np.complex128)
        perp[(k + 1) % d] = 1.0
        psi = e_k
    psi_perp = -sin_t * e_k + cos_t * perp

    completion = _complete_onb([psi, psi_perp], d)
    u_psi = np.column_stack([psi, psi_perp, *completion])
    u_k = np.column_stack([e_k, perp, *completion])

    lhs = float(np.linalg.svd(u_k - u_psi, compute_uv=False)[0])
    closed = 2.0 * abs(math.sin(theta / 2.0))
    bound = math.sqrt(2.0) * math.sqrt(max(0.0, 1.0 - p))
    passed = abs(lhs - closed) <= 1e-9 and lhs <= bound + 1e-12
    return NormCheck(lhs_opnorm=lhs, closed_form=closed, upper_bound=bound, passed=passed)
