"""Anomalous weak values from pre-selection, post-selection and disturbance,
computed exactly and by simulation for a qubit and for a classical coin."""

from .analytic import (
    DisturbanceChannel,
    WeakSetup,
    apply_weak_operation,
    conditional_expectation_s,
    joint_prob,
    outcome_prob,
    quantum_disturbance_weak_value,
    total_expectation_identity,
    validate_admissible,
    weak_value,
    weak_value_via_conditioning,
)
from .coin import ClassicalModel, enumerate_oracle, exact_weak_value
from .meter import GaussianMeter
from .montecarlo import RunConfig, run_simulation
from .qubit import HermitianOperator, PureState, Z, make_state_pair

__version__ = "0.1.0"
