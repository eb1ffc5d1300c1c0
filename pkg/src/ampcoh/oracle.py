"""Counted black-box access to the state-preparation unitary.

synthesize() turns a target state into a unitary mapping |0> to it, and
wraps it in a CountedOracle that tallies forward, inverse, and controlled
applications separately.  Everything downstream (search, detection,
estimation) touches the unitary only through CountedOracle.call, so the
tallies are the ground truth for reported sample complexities.
"""

from __future__ import annotations

from typing import Callable, NamedTuple, Optional

import numpy as np

from .core import DimensionMismatchError, PureState, UnitaryMatrix, basis_state

MODES = ("forward", "inverse", "controlled-forward", "controlled-inverse")


class BudgetExceededError(RuntimeError):
    """The oracle's hard call budget would be exceeded."""


class CallTally(NamedTuple):
    forward: int
    inverse: int
    controlled: int

    @property
    def total(self) -> int:
        return self.forward + self.inverse + self.controlled


class CountedOracle:
    """Black-box state-preparation unitary with per-mode call tallies.

    Tallies only increase.  ``budget``, when set, caps the total number of
    calls; exceeding it raises BudgetExceededError.  ``post_call`` is an
    optional hook applied to the state after every call (used for
    per-call noise injection).  One oracle instance per trial: instances
    are independent and tallies are never shared across trials.
    """

    def __init__(self, u: UnitaryMatrix, budget: Optional[int] = None):
        self.u = u
        self.budget = budget
        self.calls_forward = 0
        self.calls_inverse = 0
        self.calls_controlled = 0
        self.post_call: Optional[Callable[[PureState], PureState]] = None
        self._mat = u.entries
        self._mat_dag = u.entries.conj().T.copy()

    @property
    def d(self) -> int:
        return self.u.dim

    @property
    def total_calls(self) -> int:
        return self.calls_forward + self.calls_inverse + self.calls_controlled

    def tally(self) -> CallTally:
        return CallTally(self.calls_forward, self.calls_inverse, self.calls_controlled)

    def target_state(self) -> PureState:
        """The state |psi> = U|0> (bookkeeping peek, not a counted call)."""
        return PureState._wrap(self._mat[:, 0].copy())

    def call(self, state: PureState, mode: str, control: Optional[np.ndarray] = None) -> PureState:
        """Apply the requested unitary and increment the matching tally.

        Plain modes act on a dim-d state.  Controlled modes act on a joint
        (ancilla x system) state of dimension a*d, applying the unitary to
        the system wherever the boolean mask ``control`` (length a,
        default: ancilla |1> for a = 2) selects the ancilla basis state.
        """
        if self.budget is not None and self.total_calls + 1 > self.budget:
            raise BudgetExceededError(f"oracle budget of {self.budget} calls exhausted")
        d = self.d
        if mode == "forward":
            if state.dim != d:
                raise DimensionMismatchError(f"state dim {state.dim} vs oracle dim {d}")
            out = self._mat @ state.amps
            self.calls_forward += 1
        elif mode == "inverse":
            if state.dim != d:
                raise DimensionMismatchError(f"state dim {state.dim} vs oracle dim {d}")
            out = self._mat_dag @ state.amps
            self.calls_inverse += 1
        elif mode in ("controlled-forward", "controlled-inverse"):
            if state.dim % d != 0 or state.dim < 2 * d:
                raise DimensionMismatchError(
                    f"joint state dim {state.dim} is not a multiple >= 2 of oracle dim {d}"
                )
            a = state.dim // d
            if control is None:
                if a != 2:
                    raise ValueError("control mask required for ancilla dimension > 2")
                control = np.array([False, True])
            mat = self._mat if mode == "controlled-forward" else self._mat_dag
            joint = state.amps.reshape(a, d).copy()
            joint[control] = joint[control] @ mat.T
            out = joint.reshape(a * d)
            self.calls_controlled += 1
        else:
            raise ValueError(f"unknown call mode {mode!r}")
        result = PureState._wrap(out)
        if self.post_call is not None:
            result = self.post_call(result)
        return result

    def prepare(self) -> PureState:
        """One forward call on |0>: prepares a fresh copy of the target."""
        return self.call(basis_state(self.d, 0), "forward")


def synthesize(target: PureState, budget: Optional[int] = None) -> CountedOracle:
    """Counted oracle whose unitary maps |0> exactly to the target state.

    The action on the orthogonal complement is fixed deterministically: a
    Householder reflection built for the phase-adjusted target (global
    phase chosen so <0|target> becomes real nonnegative), followed by the
    compensating phase on the |0> column.  Same target, same matrix.
    """
    t = target.amps
    d = target.dim
    t0 = t[0]
    phase = t0 / abs(t0) if abs(t0) > 1e-12 else 1.0 + 0.0j
    tp = t / phase  # now tp[0] is real and >= 0

    e0 = np.zeros(d, dtype=np.complex128)
    e0[0] = 1.0
    v = e0 - tp
    vv = float(np.real(np.vdot(v, v)))
    if vv < 1e-24:
        h = np.eye(d, dtype=np.complex128)
    else:
        h = np.eye(d, dtype=np.complex128) - (2.0 / vv) * np.outer(v, v.conj())
    u = h.copy()
    u[:, 0] *= phase  # U = H . diag(phase, 1, ..., 1)

    if float(np.max(np.abs(u[:, 0] - t))) > 1e-12:
        raise AssertionError("oracle synthesis failed to reproduce the target")
    return CountedOracle(UnitaryMatrix(u), budget=budget)
