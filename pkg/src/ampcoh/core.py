"""Dense complex statevector engine with reproducible sampling.

States are plain length-d amplitude vectors over the incoherent basis
{|0>, ..., |d-1>}; there is no qubit tensor structure for the system
register.  Design envelope: system dimension d <= 64, plus a flat
(ancilla x system) register of a few thousand amplitudes for phase
estimation.  All values are immutable after construction except
RngStream, which is single-owner mutable.
"""

from __future__ import annotations

import numpy as np

NORM_TOL = 1e-12
UNITARY_TOL = 1e-10

_MASK64 = (1 << 64) - 1


class DimensionMismatchError(ValueError):
    """Operands live in Hilbert spaces of different dimension."""


class RngStream:
    """Seeded random stream addressed by (seed, stream_id).

    Identical (seed, stream_id) pairs reproduce bit-identical sample
    sequences across runs.  ``spawn`` derives independent child streams;
    spawning is stateful, so the spawn order must itself be deterministic
    for reproducibility.  Not thread safe: one owner per stream.
    """

    def __init__(self, seed: int, stream_id: int = 0, _ss=None):
        self.seed = int(seed) & _MASK64
        self.stream_id = int(stream_id) & _MASK64
        if _ss is None:
            _ss = np.random.SeedSequence((self.seed, self.stream_id))
        self._ss = _ss
        self.gen = np.random.Generator(np.random.PCG64(_ss))

    def spawn(self, n: int) -> list["RngStream"]:
        return [RngStream(self.seed, self.stream_id, _ss=c) for c in self._ss.spawn(n)]

    def __repr__(self) -> str:
        return f"RngStream(seed={self.seed}, stream_id={self.stream_id})"


class PureState:
    """Normalized pure state over the incoherent basis.

    amps[k] carries the amplitude e^{i phi_k} sqrt(p_k) on basis index k.
    Treated as immutable: operations return new states.
    """

    __slots__ = ("amps",)

    def __init__(self, amps):
        a = np.array(amps, dtype=np.complex128)
        if a.ndim != 1:
            raise ValueError("amplitudes must form a 1-D vector")
        if a.size < 2:
            raise ValueError(f"state dimension must be >= 2, got {a.size}")
        norm2 = float(np.sum(a.real ** 2 + a.imag ** 2))
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized: sum |amps|^2 = {norm2!r}")
        self.amps = a

    @classmethod
    def _wrap(cls, amps: np.ndarray) -> "PureState":
        # Fast path for vectors already known to be normalized (the image
        # of a unitary); skips validation.  Internal use only.
        obj = object.__new__(cls)
        obj.amps = amps
        return obj

    @property
    def dim(self) -> int:
        return self.amps.size

    def probs(self) -> np.ndarray:
        a = self.amps
        return a.real ** 2 + a.imag ** 2

    def overlap(self, other: "PureState") -> complex:
        if other.dim != self.dim:
            raise DimensionMismatchError(f"dim {self.dim} vs {other.dim}")
        return complex(np.vdot(self.amps, other.amps))

    def __repr__(self) -> str:
        return f"PureState(dim={self.dim})"


def basis_state(dim: int, k: int) -> PureState:
    """The incoherent basis state |k> in dimension dim."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    if not 0 <= k < dim:
        raise ValueError(f"basis index {k} out of range for dim {dim}")
    a = np.zeros(dim, dtype=np.complex128)
    a[k] = 1.0
    return PureState._wrap(a)


class UnitaryMatrix:
    """Square complex matrix validated as unitary at construction."""

    __slots__ = ("entries",)

    def __init__(self, entries):
        m = np.array(entries, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {m.shape}")
        dev = float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))
        if dev > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary: max |U^dag U - I| = {dev:.3e}")
        self.entries = m

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def dagger(self) -> "UnitaryMatrix":
        obj = object.__new__(UnitaryMatrix)
        obj.entries = self.entries.conj().T.copy()
        return obj

    def __repr__(self) -> str:
        return f"UnitaryMatrix(dim={self.dim})"


def apply(u: UnitaryMatrix, state: PureState) -> PureState:
    """Apply a unitary to a state; norm is preserved to machine precision."""
    if u.dim != state.dim:
        raise DimensionMismatchError(f"unitary dim {u.dim} vs state dim {state.dim}")
    return PureState._wrap(u.entries @ state.amps)


def measure_basis(state: PureState, rng: RngStream) -> int:
    """Sample one incoherent-basis measurement outcome (Born rule).

    The state object is not mutated; the caller's accounting decides how
    many copies a measurement consumes.
    """
    cdf = np.cumsum(state.probs())
    u = rng.gen.random() * cdf[-1]
    k = int(np.searchsorted(cdf, u, side="right"))
    return min(k, state.dim - 1)


def measure_many(state: PureState, rng: RngStream, n: int) -> np.ndarray:
    """Vectorized i.i.d. batch of n basis measurements on copies of state.

    Distributionally identical to n measure_basis calls; one draw of n
    uniforms replaces n scalar draws.
    """
    cdf = np.cumsum(state.probs())
    u = rng.gen.random(n) * cdf[-1]
    ks = np.searchsorted(cdf, u, side="right")
    return np.minimum(ks, state.dim - 1)


def random_pure_state(dim: int, rng: RngStream) -> PureState:
    """Haar-random pure state: normalized vector of i.i.d. complex Gaussians."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    z = rng.gen.standard_normal(dim) + 1j * rng.gen.standard_normal(dim)
    return PureState._wrap(z / np.linalg.norm(z))


def state_with_coherence(dim: int, c_target: float, rng: RngStream) -> PureState:
    """State with geometric coherence exactly c_target.

    Puts probability 1 - c_target on a random basis index and spreads the
    remaining weight uniformly over the other indices, so no other
    probability exceeds 1 - c_target (it requires c_target <= 1 - 1/dim).
    Random phases on every component keep the instances generic.
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    if not 0.0 <= c_target <= 1.0 - 1.0 / dim + 1e-15:
        raise ValueError(
            f"c_target must lie in [0, 1 - 1/dim] = [0, {1.0 - 1.0 / dim}], got {c_target}"
        )
    k = int(rng.gen.integers(dim))
    phases = np.exp(2j * np.pi * rng.gen.random(dim))
    p = np.full(dim, c_target / (dim - 1))
    p[k] = 1.0 - c_target
    return PureState._wrap(np.sqrt(p) * phases)
