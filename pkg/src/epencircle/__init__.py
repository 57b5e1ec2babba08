"""Driven non-Hermitian two-level system under chirped Gaussian pulses.

Survival-probability dynamics of a bound state coupled to a decaying
resonance, the complex-time singularity analysis behind its monotonic vs
oscillatory pulse-area dependence, and deterministic parameter sweeps.
"""

from .model import (
    PulseParams,
    StateVector,
    SystemParams,
    cw_exceptional_point,
    helium_preset,
    pulse_at,
    tau_for_area,
    with_area,
)
from .propagator import (
    BranchTrackingError,
    ConvergenceError,
    propagate_adiabatic,
    propagate_diabatic,
    survival_probability,
)
from .perturbation import PerturbativeSingularity, a_plus_first_order
from .complextime import (
    DynamicalEP,
    SeparatrixPoint,
    attach_sigmas,
    find_dynamical_eps,
    find_separatrix,
    residue_model_fit,
    sigma_k,
)
from .sweep import (
    SweepResult,
    SweepSpec,
    count_nodes,
    emit_contour,
    run_sweep,
    split_field,
)

__all__ = [
    "PulseParams", "StateVector", "SystemParams", "cw_exceptional_point",
    "helium_preset", "pulse_at", "tau_for_area", "with_area",
    "BranchTrackingError", "ConvergenceError", "propagate_adiabatic",
    "propagate_diabatic", "survival_probability",
    "PerturbativeSingularity", "a_plus_first_order",
    "DynamicalEP", "SeparatrixPoint", "attach_sigmas", "find_dynamical_eps",
    "find_separatrix", "residue_model_fit", "sigma_k",
    "SweepResult", "SweepSpec", "count_nodes", "emit_contour", "run_sweep",
    "split_field",
]

__version__ = "0.1.0"
