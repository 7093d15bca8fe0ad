"""Core parameter bundles shared by every module."""

from __future__ import annotations

from dataclasses import dataclass
from math import pi

import numpy as np


@dataclass(frozen=True)
class PlateParams:
    """Coefficients of the damped fourth-order plate law.

    The plate displacement obeys

        d_t^2 eta + alpha * Lap'^2 eta - beta * Lap' eta - gamma * d_t Lap' eta

    (fluid density and viscosity are normalized to 1).  ``alpha`` is the
    bending stiffness, ``beta`` a tension coefficient of either sign, and
    ``gamma`` the structural damping that makes the coupled problem
    parabolic.
    """

    alpha: float
    beta: float
    gamma: float

    def __post_init__(self) -> None:
        if not self.alpha > 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.gamma > 0:
            raise ValueError(f"gamma must be positive, got {self.gamma}")
        if not np.isfinite([self.alpha, self.beta, self.gamma]).all():
            raise ValueError("plate coefficients must be finite")


@dataclass(frozen=True)
class Freq:
    """A single point in the Laplace/Fourier covariable plane.

    ``lam`` is the time covariable (complex), ``z`` the tangential frequency
    modulus ``|xi'|`` (nonnegative real).  ``xi_prime`` optionally carries the
    full tangential covector; when present its modulus must equal ``z``.
    When absent, operations that need a direction use ``z * e_1``.
    """

    lam: complex
    z: float
    xi_prime: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.z < 0:
            raise ValueError(f"z must be nonnegative, got {self.z}")
        if self.xi_prime is not None:
            mod = float(np.hypot.reduce(np.asarray(self.xi_prime)))
            if abs(mod - self.z) > 1e-12 * max(1.0, self.z):
                raise ValueError(
                    f"|xi_prime| = {mod} does not match z = {self.z}"
                )

    def direction(self, n: int = 2) -> np.ndarray:
        """Tangential covector as an (n-1)-vector, defaulting to z * e_1."""
        if self.xi_prime is not None:
            return np.asarray(self.xi_prime, dtype=float)
        xi = np.zeros(n - 1)
        if n - 1 > 0:
            xi[0] = self.z
        return xi


@dataclass(frozen=True)
class Sector:
    """Open sector ``{zeta != 0 : |arg zeta| < vertex_angle}`` around R_+."""

    vertex_angle: float

    def __post_init__(self) -> None:
        if not 0 < self.vertex_angle <= pi:
            raise ValueError(
                f"vertex angle must lie in (0, pi], got {self.vertex_angle}"
            )

    def sample_args(self, count: int) -> np.ndarray:
        """Uniform argument grid strictly inside the sector."""
        # Shrink by half a step so the extreme rays are excluded.
        half = self.vertex_angle * (1.0 - 0.5 / max(count, 1))
        return np.linspace(-half, half, count)
