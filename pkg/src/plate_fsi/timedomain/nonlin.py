"""Quadratic correction terms produced by flattening the moving domain.

Rewriting the coupled system on the flat reference strip turns the
geometry of the moving plate graph into lower-order forcing terms that
are at least quadratic in the state.  This module evaluates those terms
on grid fields: a momentum correction, a divergence correction, and a
plate-load correction.  Tangential derivatives are spectral, vertical
derivatives use fourth-order one-sided-aware stencils.
"""

from __future__ import annotations

import numpy as np

from .grid import (
    Grid,
    State,
    tangential_derivative,
    tangential_gradient,
    tangential_laplacian,
    vertical_derivative,
)

__all__ = [
    "nonlinear_divergence",
    "nonlinear_momentum",
    "nonlinear_plate_load",
]

_ACC = 4


def _d_n(field: np.ndarray, grid: Grid, order: int = 1) -> np.ndarray:
    return vertical_derivative(field, grid.mesh, order=order, accuracy=_ACC)


def nonlinear_momentum(state: State, grid: Grid) -> np.ndarray:
    """Momentum correction, shape ``(n,) + tan_shape + (M + 1,)``.

    Collects every term the flattening moves out of the Stokes operator:
    vertical-stretch corrections proportional to derivatives of the
    displacement, the full convection term, and the pressure-gradient
    correction.  Vanishes to second order at the zero state; the only
    surviving term for a flat interface is the convection ``-(v . grad) v``.
    """
    v = state.v
    grad_eta = tangential_gradient(state.eta, grid)
    dn_v = _d_n(v, grid)
    dnn_v = _d_n(v, grid, order=2)
    dn_p = _d_n(state.p, grid)

    # (d_t eta - lap' eta) d_n v
    coef = (state.eta_t - tangential_laplacian(state.eta, grid))[..., np.newaxis]
    out = coef * dn_v

    # -2 (grad' eta . grad') d_n v  and  |grad' eta|^2 d_nn v
    for d in range(grid.n - 1):
        out -= 2.0 * grad_eta[d][..., np.newaxis] * tangential_derivative(
            dn_v, grid, direction=d
        )
    out += np.sum(grad_eta * grad_eta, axis=0)[..., np.newaxis] * dnn_v

    # -(v . grad) v
    for d in range(grid.n - 1):
        out -= v[d][np.newaxis] * tangential_derivative(v, grid, direction=d)
    out -= v[grid.n - 1][np.newaxis] * dn_v

    # (v' . grad' eta) d_n v
    slope_flux = np.zeros(grid.tan_shape + (grid.M + 1,))
    for d in range(grid.n - 1):
        slope_flux += v[d] * grad_eta[d][..., np.newaxis]
    out += slope_flux[np.newaxis] * dn_v

    # (grad' eta, 0)^T d_n p
    for d in range(grid.n - 1):
        out[d] += grad_eta[d][..., np.newaxis] * dn_p
    return out


def nonlinear_divergence(state: State, grid: Grid) -> np.ndarray:
    """Divergence correction ``grad' eta . d_n v'``, a bulk scalar field."""
    grad_eta = tangential_gradient(state.eta, grid)
    out = np.zeros(grid.tan_shape + (grid.M + 1,))
    for d in range(grid.n - 1):
        out += grad_eta[d][..., np.newaxis] * _d_n(state.v[d], grid)
    return out


def nonlinear_plate_load(state: State, grid: Grid) -> np.ndarray:
    """Plate-load correction evaluated on the interface, a tangential field.

    ``-grad' eta . d_n v'(0) - grad' eta . grad' v_n(0)``: the shear the
    tilted plate feels from the tangential flow plus the tilt correction
    of the normal-stress trace.
    """
    grad_eta = tangential_gradient(state.eta, grid)
    v_n_trace = state.v[grid.n - 1][..., 0]
    grad_vn = tangential_gradient(v_n_trace, grid)
    out = np.zeros(grid.tan_shape)
    for d in range(grid.n - 1):
        out -= grad_eta[d] * _d_n(state.v[d], grid)[..., 0]
        out -= grad_eta[d] * grad_vn[d]
    return out
