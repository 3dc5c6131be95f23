"""Continuous-variable quantum secret sharing on Gaussian states."""

from .gaussian import (
    GaussianState,
    SymplecticTransform,
    apply,
    coherent,
    fidelity,
    fidelity_coherent,
    partial_trace,
    tensor,
    thermal,
    two_mode_squeezed,
    vacuum,
)
from .scheme import (
    EncodedSecret,
    NoCloningError,
    ReconstructionPlan,
    SchemeError,
    ThresholdSchemeSpec,
    encode,
    reconstruct,
    solve_T,
    validate,
)

__version__ = "0.1.0"
