"""Global tolerances and runtime knobs.

A single module-level :data:`TOL` instance is consulted throughout; tests or
callers that need different tolerances can replace individual attributes or
swap the instance.
"""

from __future__ import annotations

import os
from dataclasses import dataclass


@dataclass
class Tolerances:
    # Relative tolerance for closed-form identities (root residuals, trace
    # identities).
    identity_rel: float = 1e-12
    # Relative agreement demanded between closed-form profiles and adaptive
    # quadrature of the kernel integrals.
    quadrature_rel: float = 1e-8
    quadrature_abs: float = 1e-10
    # Residual pass level for the frequency-domain solution operator.
    residual_rel: float = 1e-8
    # Guard for near-vanishing response denominators.
    resonance_eps: float = 1e-10
    # Switch to the confluent x*exp(-omega*x) closed form below this relative
    # separation of the two decay exponents.
    confluent_rel: float = 1e-8
    # Direct linear solver acceptance for the time stepper.
    solver_tol: float = 1e-10
    # Self-convergence requirement for contour inversion (node doubling).
    contour_selfconv: float = 1e-8
    # Discrete summation-by-parts pairing between divergence data and plate
    # velocity (exact up to rounding for compatible data).
    compat_pairing_rel: float = 1e-10
    # Pointwise trace conditions of the initial data.
    trace_rel: float = 1e-10


TOL = Tolerances()


def thread_count() -> int:
    """Parallelism cap from the PLATE_FSI_THREADS environment variable."""
    raw = os.environ.get("PLATE_FSI_THREADS", "")
    try:
        n = int(raw)
    except ValueError:
        return 1
    return max(1, n)
