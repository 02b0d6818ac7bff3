"""Quadrature noise, slow-light delay and entanglement of a weak probe in a Lambda EIT medium."""

from .errors import (
    DegenerateConditioning,
    DegenerateDenominator,
    DegenerateSteadyState,
    EITError,
    GridMismatch,
    NoConvergence,
    NoRoot,
    StepUnderflow,
)
from .lambda_system import (
    AtomicParams,
    BlochState,
    ConsistencyReport,
    NoiseModel,
    Verdict,
    bloch_rhs,
    population_exchange_steady_bb,
    steady_state,
    weak_probe_consistency,
)
from .linear_response import (
    TransferFunction,
    group_delay,
    power_transmission,
    propagation_exponent,
    transparency_width,
)

__version__ = "0.1.0"
