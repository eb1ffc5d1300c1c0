"""Coherence detection and estimation for unknown pure states.

A dense-statevector toolkit around three protocols: repeated basis
measurements on state copies, amplitude-amplified detection through a
call-counted state-preparation oracle, and phase-estimation based
coherence estimates, plus a per-oracle-call trajectory noise model and a
seeded benchmark harness that reproduces the 1/c vs 1/sqrt(c) detection
cost separation and the O(1/epsilon) estimation scaling.
"""

from .amplify import (
    CohSearchTrace,
    GroverOp,
    averaged_success,
    coh_search,
    detection_probability,
    grover_state,
)
from .bench import ExperimentConfig, TrialRecord, fit_loglog, run, verify_formulas
from .core import (
    PureState,
    RngStream,
    UnitaryMatrix,
    apply,
    basis_state,
    measure_basis,
    random_pure_state,
    state_with_coherence,
)
from .detect import DetectConfig, DetectionOutcome, baseline_detect, detect_amplified, detect_boosted
from .estimate import (
    EstimationResult,
    QpeConfig,
    calls_for_accuracy,
    estimate_coherence,
    qpe_estimate_theta,
    qpe_outcome_distribution,
)
from .measures import (
    CoherenceProfile,
    baseline_copy_budget,
    geometric_coherence,
    helstrom_error,
    pure_trace_distance,
    verify_appendix_norms,
)
from .noise import NoiseConfig, apply_noise_trajectory, attach_noise, noisy_detect_sweep
from .oracle import BudgetExceededError, CallTally, CountedOracle, synthesize

__version__ = "0.1.0"
