"""Graph transform between the moving domain and the flat reference strip.

The moving fluid domain is the region above the plate graph
``x_n = eta(t, x')``; composing fields with the vertical shift
``theta(x', x_n) = (x', x_n + eta(x'))`` flattens it onto the reference
strip.  The pullback maps a field on the moving domain to the strip, the
pushforward is its inverse, and both act by 1D interpolation along the
vertical mesh (linear inside, linearly extrapolated at the ends, so the
round trip is second-order accurate in the mesh spacing).
"""

from __future__ import annotations

import numpy as np

from .grid import Grid, tangential_gradient

__all__ = [
    "ShiftOutOfRange",
    "normal_from_gradient",
    "normal_vector",
    "pullback",
    "pushforward",
]


class ShiftOutOfRange(ValueError):
    """The displacement is too large for the truncated vertical mesh."""


def _interp_vertical(field: np.ndarray, grid: Grid, queries: np.ndarray) -> np.ndarray:
    """Linear interpolation of node values at query heights, per column.

    ``field`` has shape ``tan_shape + (M + 1,)`` and ``queries`` the same;
    query points outside ``[0, X]`` are linearly extrapolated from the
    nearest cell.
    """
    nodes = grid.mesh.nodes
    cell = np.clip(np.searchsorted(nodes, queries) - 1, 0, grid.M - 1)
    lo = np.take_along_axis(field, cell, axis=-1)
    hi = np.take_along_axis(field, cell + 1, axis=-1)
    x_lo = nodes[cell]
    h = grid.mesh.spacings[cell]
    t = (queries - x_lo) / h
    return lo + t * (hi - lo)


def _shifted(eta: np.ndarray, grid: Grid, sign: float) -> np.ndarray:
    eta = np.asarray(eta, dtype=float)
    if eta.shape != grid.tan_shape:
        raise ValueError(f"eta has shape {eta.shape}, expected {grid.tan_shape}")
    bound = float(np.abs(eta).max())
    if bound > grid.X / 4.0:
        raise ShiftOutOfRange(
            f"sup|eta| = {bound} exceeds X / 4 = {grid.X / 4.0}"
        )
    return grid.mesh.nodes + sign * eta[..., np.newaxis]


def _apply(field: np.ndarray, grid: Grid, queries: np.ndarray) -> np.ndarray:
    field = np.asarray(field, dtype=float)
    if field.shape[-grid.n:] == grid.tan_shape + (grid.M + 1,):
        if field.ndim == grid.n:
            return _interp_vertical(field, grid, queries)
        flat = field.reshape((-1,) + grid.tan_shape + (grid.M + 1,))
        out = np.stack([_interp_vertical(f, grid, queries) for f in flat])
        return out.reshape(field.shape)
    raise ValueError(f"field shape {field.shape} does not match the grid")


def pullback(eta: np.ndarray, physical_field: np.ndarray, grid: Grid) -> np.ndarray:
    """Sample a moving-domain field on the flat strip: ``v = u(., . + eta)``."""
    return _apply(physical_field, grid, _shifted(eta, grid, +1.0))


def pushforward(eta: np.ndarray, flat_field: np.ndarray, grid: Grid) -> np.ndarray:
    """Inverse of :func:`pullback`: ``u = v(., . - eta)``."""
    return _apply(flat_field, grid, _shifted(eta, grid, -1.0))


def normal_from_gradient(grad_eta: np.ndarray) -> np.ndarray:
    """Unit normal ``(grad' eta, -1) / sqrt(1 + |grad' eta|^2)``.

    ``grad_eta`` has a leading axis of length ``n - 1``; the result gains a
    final entry and is normalized pointwise.  The normal points out of the
    fluid (downward through the plate).
    """
    grad_eta = np.asarray(grad_eta, dtype=float)
    norm2 = np.sum(grad_eta * grad_eta, axis=0)
    scale = 1.0 / np.sqrt(1.0 + norm2)
    parts = [g * scale for g in grad_eta]
    parts.append(-scale)
    return np.stack(parts)


def normal_vector(eta: np.ndarray, grid: Grid) -> np.ndarray:
    """Unit normal field of the plate graph, shape ``(n,) + tan_shape``."""
    return normal_from_gradient(tangential_gradient(eta, grid))
