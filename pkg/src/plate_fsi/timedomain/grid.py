"""Discrete geometry and derivative operators for the time-domain layer.

The tangential directions form a periodic torus of period ``L`` sampled on
``N`` equispaced points per direction (``N`` a power of two), so tangential
derivatives are spectral and exact on band-limited fields.  The vertical
direction is a graded mesh on ``[0, X]`` refined toward the interface at
``x_n = 0``, where the exponential boundary layers live; vertical
derivatives are finite differences with Fornberg weights.

Array layout: tangential axes first, vertical axis last.  Plate fields have
shape ``(N,) * (n-1)``, bulk scalars ``(N,) * (n-1) + (M+1,)`` and velocity
fields carry a leading component axis of length ``n``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import expm1, pi

import numpy as np
import scipy.sparse as sp

__all__ = [
    "Grid",
    "ProblemData",
    "State",
    "VerticalMesh",
    "fornberg_weights",
    "tangential_derivative",
    "tangential_gradient",
    "tangential_laplacian",
    "vertical_derivative",
]


def fornberg_weights(x0: float, xs, m: int) -> np.ndarray:
    """Finite-difference weights for derivatives 0..m at ``x0`` on nodes ``xs``.

    Classic recursive construction; returns an array of shape
    ``(m + 1, len(xs))`` whose row ``k`` gives the weights of the k-th
    derivative.  Exact for polynomials up to degree ``len(xs) - 1``.
    """
    xs = np.asarray(xs, dtype=float)
    npts = xs.size
    if m >= npts:
        raise ValueError(f"need more than {m} nodes for derivative order {m}")
    c = np.zeros((m + 1, npts))
    c[0, 0] = 1.0
    c1 = 1.0
    c4 = xs[0] - x0
    for i in range(1, npts):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = xs[i] - x0
        for j in range(i):
            c3 = xs[i] - xs[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c


@dataclass(frozen=True, eq=False)
class VerticalMesh:
    """Graded mesh on ``[0, X]`` with ``M`` cells refined toward 0.

    Nodes follow ``x(s) = X (e^(g s) - 1) / (e^g - 1)`` on ``s = j / M``
    with fixed grading strength ``g``, so doubling ``M`` halves every local
    spacing asymptotically.  Cell midpoints carry the pressure in the
    staggered solver; the dual weights ``w_j = (h_(j-1) + h_j) / 2`` (halved
    at the ends) make the node-to-cell divergence and the cell-to-node
    gradient exact negative adjoints of each other, and double as the
    vertical quadrature rule.
    """

    X: float
    M: int
    grading: float = 2.0

    def __post_init__(self) -> None:
        if self.X <= 0:
            raise ValueError(f"X must be positive, got {self.X}")
        if self.M < 16:
            raise ValueError(f"M must be at least 16, got {self.M}")
        if self.grading < 0:
            raise ValueError(f"grading must be nonnegative, got {self.grading}")
        s = np.linspace(0.0, 1.0, self.M + 1)
        if self.grading == 0:
            nodes = self.X * s
        else:
            nodes = self.X * np.expm1(self.grading * s) / expm1(self.grading)
        nodes[0], nodes[-1] = 0.0, self.X
        spacings = np.diff(nodes)
        weights = np.empty(self.M + 1)
        weights[0] = spacings[0] / 2.0
        weights[-1] = spacings[-1] / 2.0
        weights[1:-1] = (spacings[:-1] + spacings[1:]) / 2.0
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "spacings", spacings)
        object.__setattr__(self, "midpoints", (nodes[:-1] + nodes[1:]) / 2.0)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_diff_cache", {})

    def diff_matrix(self, order: int = 1, accuracy: int = 4) -> sp.csr_matrix:
        """Sparse vertical derivative operator on node values.

        Each row uses a ``accuracy + order``-point Fornberg stencil centered
        as symmetrically as the boundaries allow, so the formal order of
        accuracy is uniform up to the ends.
        """
        key = (order, accuracy)
        cached = self._diff_cache.get(key)
        if cached is not None:
            return cached
        npts = order + accuracy
        if npts > self.M + 1:
            raise ValueError(
                f"stencil needs {npts} nodes but the mesh has {self.M + 1}"
            )
        rows, cols, vals = [], [], []
        for j in range(self.M + 1):
            lo = min(max(j - npts // 2, 0), self.M + 1 - npts)
            idx = np.arange(lo, lo + npts)
            w = fornberg_weights(self.nodes[j], self.nodes[idx], order)[order]
            rows.extend([j] * npts)
            cols.extend(idx.tolist())
            vals.extend(w.tolist())
        mat = sp.csr_matrix(
            (vals, (rows, cols)), shape=(self.M + 1, self.M + 1)
        )
        self._diff_cache[key] = mat
        return mat

    def sbp_derivative_matrix(self) -> sp.csr_matrix:
        """Second-order first derivative satisfying exact summation by parts.

        With the dual weights ``w`` of this mesh,
        ``sum_j w_j ((D f)_j g_j + f_j (D g)_j) = f_M g_M - f_0 g_0``
        holds exactly (to rounding) for arbitrary node vectors: interior
        rows are the wide centered difference over ``(x_(j+1) - x_(j-1))``
        and the end rows are one-sided two-point differences.
        """
        key = ("sbp", 1)
        cached = self._diff_cache.get(key)
        if cached is not None:
            return cached
        M = self.M
        rows, cols, vals = [0, 0], [0, 1], [-1.0 / self.spacings[0], 1.0 / self.spacings[0]]
        for j in range(1, M):
            gap = self.nodes[j + 1] - self.nodes[j - 1]
            rows.extend([j, j])
            cols.extend([j - 1, j + 1])
            vals.extend([-1.0 / gap, 1.0 / gap])
        rows.extend([M, M])
        cols.extend([M - 1, M])
        h_last = self.spacings[-1]
        vals.extend([-1.0 / h_last, 1.0 / h_last])
        mat = sp.csr_matrix((vals, (rows, cols)), shape=(M + 1, M + 1))
        self._diff_cache[key] = mat
        return mat

    def trace_stencil(self) -> np.ndarray:
        """Weights of the one-sided second-order first derivative at x = 0."""
        return fornberg_weights(0.0, self.nodes[:3], 1)[1]

    def pressure_trace_stencil(self) -> np.ndarray:
        """Linear extrapolation of the first two cell midpoints to x = 0."""
        x0, x1 = self.midpoints[0], self.midpoints[1]
        return np.array([x1 / (x1 - x0), -x0 / (x1 - x0)])

    def midpoints_to_nodes(self, field: np.ndarray) -> np.ndarray:
        """Linear interpolation of midpoint values to nodes (ends extrapolated).

        Acts on the last axis (length ``M``), returns length ``M + 1``.
        """
        field = np.asarray(field)
        h = self.spacings
        out_shape = field.shape[:-1] + (self.M + 1,)
        out = np.empty(out_shape, dtype=field.dtype)
        denom = h[:-1] + h[1:]
        out[..., 1:-1] = (
            h[1:] * field[..., :-1] + h[:-1] * field[..., 1:]
        ) / denom
        c = self.pressure_trace_stencil()
        out[..., 0] = c[0] * field[..., 0] + c[1] * field[..., 1]
        xm, xl = self.midpoints[-1], self.midpoints[-2]
        t = (self.X - xl) / (xm - xl)
        out[..., -1] = (1 - t) * field[..., -2] + t * field[..., -1]
        return out

    def integrate(self, field: np.ndarray) -> np.ndarray:
        """Quadrature along the last (vertical) axis with the dual weights."""
        return np.asarray(field) @ self.weights


def vertical_derivative(
    field: np.ndarray, mesh: VerticalMesh, order: int = 1, accuracy: int = 4
) -> np.ndarray:
    """Vertical derivative along the last axis via Fornberg stencils."""
    field = np.asarray(field)
    mat = mesh.diff_matrix(order, accuracy)
    flat = field.reshape(-1, field.shape[-1])
    return (mat @ flat.T).T.reshape(field.shape)


@dataclass(frozen=True, eq=False)
class Grid:
    """Full discrete domain: tangential torus x graded vertical mesh x time.

    ``n`` is the spatial dimension (2 or 3), so there are ``n - 1``
    tangential directions with period ``L`` and ``N`` points each.  ``X``
    defaults to ``8 L`` and must be at least ``4 L`` so the lid at
    ``x_n = X`` stays far from the interface.  ``T / dt`` must be integral.
    """

    n: int = 2
    L: float = 2.0 * pi
    N: int = 32
    M: int = 64
    X: float | None = None
    T: float = 1.0
    dt: float = 1.0 / 64.0
    grading: float = 2.0

    def __post_init__(self) -> None:
        if self.n not in (2, 3):
            raise ValueError(f"n must be 2 or 3, got {self.n}")
        if self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.N < 8 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two >= 8, got {self.N}")
        if self.X is None:
            object.__setattr__(self, "X", 8.0 * self.L)
        if self.X < 4.0 * self.L:
            raise ValueError(f"X = {self.X} is below the minimum 4 L = {4 * self.L}")
        if self.dt <= 0 or self.T <= 0:
            raise ValueError("T and dt must be positive")
        steps = round(self.T / self.dt)
        if steps < 1 or abs(steps * self.dt - self.T) > 1e-9 * self.T:
            raise ValueError(f"T / dt = {self.T / self.dt} is not integral")
        object.__setattr__(self, "steps", steps)
        object.__setattr__(self, "mesh", VerticalMesh(self.X, self.M, self.grading))

    @property
    def tan_shape(self) -> tuple[int, ...]:
        return (self.N,) * (self.n - 1)

    @property
    def tan_axes(self) -> tuple[int, ...]:
        return tuple(range(-(self.n - 1), 0))

    def tangential_coordinates(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of the tangential grid (open meshgrid)."""
        pts = np.arange(self.N) * (self.L / self.N)
        return tuple(np.meshgrid(*([pts] * (self.n - 1)), indexing="ij"))

    def wavenumbers(self) -> tuple[np.ndarray, ...]:
        """Spectral wavenumber arrays matching the rfftn layout.

        Returns one array per tangential direction, broadcastable against
        the spectral shape; entries are ``2 pi k / L``.
        """
        two_pi = 2.0 * pi / self.L
        if self.n == 2:
            return (two_pi * np.fft.rfftfreq(self.N, 1.0 / self.N),)
        full = two_pi * np.fft.fftfreq(self.N, 1.0 / self.N)
        half = two_pi * np.fft.rfftfreq(self.N, 1.0 / self.N)
        return (full[:, np.newaxis], half[np.newaxis, :])

    def nyquist_mask(self) -> np.ndarray:
        """True on spectral entries that carry a Nyquist mode in any direction."""
        if self.n == 2:
            mask = np.zeros(self.N // 2 + 1, dtype=bool)
            mask[-1] = True
            return mask
        mask = np.zeros((self.N, self.N // 2 + 1), dtype=bool)
        mask[self.N // 2, :] = True
        mask[:, -1] = True
        return mask


def _tan_axes(field: np.ndarray, grid: Grid) -> tuple[int, ...]:
    """Positions of the tangential axes inside ``field``.

    Plate fields end with the tangential axes; bulk fields carry one more
    trailing vertical axis.  Leading axes (vector components) are allowed.
    """
    k = grid.n - 1
    vert = grid.M + 1
    if (
        field.ndim >= k + 1
        and field.shape[-1] == vert
        and field.shape[-k - 1:-1] == grid.tan_shape
    ):
        return tuple(range(field.ndim - k - 1, field.ndim - 1))
    if field.ndim >= k and field.shape[-k:] == grid.tan_shape:
        return tuple(range(field.ndim - k, field.ndim))
    raise ValueError(
        f"field shape {field.shape} does not contain the tangential grid "
        f"{grid.tan_shape} in the expected axes"
    )


def _apply_multiplier(field: np.ndarray, grid: Grid, factor: np.ndarray) -> np.ndarray:
    """Multiply the tangential spectrum of a real field by ``factor``.

    ``factor`` must broadcast against the spectral tangential shape; a
    trailing vertical axis and leading component axes are handled by
    broadcasting.
    """
    field = np.asarray(field, dtype=float)
    axes = _tan_axes(field, grid)
    spec = np.fft.rfftn(field, axes=axes)
    if axes[-1] != field.ndim - 1:
        factor = np.asarray(factor)[..., np.newaxis]
    spec = spec * factor
    sizes = [field.shape[a] for a in axes]
    return np.fft.irfftn(spec, s=sizes, axes=axes)


def tangential_derivative(
    field: np.ndarray, grid: Grid, direction: int = 0, order: int = 1
) -> np.ndarray:
    """Spectral tangential derivative ``(d/dx_direction)^order``.

    Odd orders zero the Nyquist modes, so real fields stay exactly real and
    derivatives see the same truncation as the mode solver.
    """
    xi = grid.wavenumbers()[direction]
    factor = (1j * xi) ** order
    if order % 2:
        factor = np.where(grid.nyquist_mask(), 0.0, factor)
    return _apply_multiplier(field, grid, factor)


def tangential_gradient(field: np.ndarray, grid: Grid) -> np.ndarray:
    """Stack of all tangential derivatives; leading axis of length n - 1."""
    return np.stack(
        [tangential_derivative(field, grid, d) for d in range(grid.n - 1)]
    )


def tangential_laplacian(field: np.ndarray, grid: Grid) -> np.ndarray:
    """Spectral tangential Laplacian (sum of second derivatives)."""
    ws = grid.wavenumbers()
    # sum() broadcasts the per-direction arrays pairwise; np.add.reduce
    # would choke on their deliberately different broadcast shapes.
    factor = -sum(w * w for w in ws)
    return _apply_multiplier(field, grid, factor)


@dataclass(eq=False)
class State:
    """Unknowns of the transformed system on a :class:`Grid`.

    ``v`` has shape ``(n,) + tan_shape + (M + 1,)``, ``p`` lives on the
    nodes with shape ``tan_shape + (M + 1,)``, ``eta`` and ``eta_t`` on the
    tangential grid.  All fields are real in physical space.
    """

    v: np.ndarray
    p: np.ndarray
    eta: np.ndarray
    eta_t: np.ndarray

    def validate(self, grid: Grid) -> None:
        bulk = grid.tan_shape + (grid.M + 1,)
        if self.v.shape != (grid.n,) + bulk:
            raise ValueError(f"v has shape {self.v.shape}, expected {(grid.n,) + bulk}")
        if self.p.shape != bulk:
            raise ValueError(f"p has shape {self.p.shape}, expected {bulk}")
        for name in ("eta", "eta_t"):
            arr = getattr(self, name)
            if arr.shape != grid.tan_shape:
                raise ValueError(
                    f"{name} has shape {arr.shape}, expected {grid.tan_shape}"
                )
        for name in ("v", "p", "eta", "eta_t"):
            if not np.isfinite(getattr(self, name)).all():
                raise ValueError(f"{name} contains non-finite entries")

    @classmethod
    def zeros(cls, grid: Grid) -> "State":
        bulk = grid.tan_shape + (grid.M + 1,)
        return cls(
            v=np.zeros((grid.n,) + bulk),
            p=np.zeros(bulk),
            eta=np.zeros(grid.tan_shape),
            eta_t=np.zeros(grid.tan_shape),
        )

    def copy(self) -> "State":
        return State(
            v=self.v.copy(), p=self.p.copy(),
            eta=self.eta.copy(), eta_t=self.eta_t.copy(),
        )


@dataclass(eq=False)
class ProblemData:
    """Right-hand sides and initial data for the time-domain system.

    ``f_v`` forces the momentum equation, ``g`` is the divergence datum on
    the nodes, ``f_eta`` the plate forcing; ``v0``, ``eta0``, ``eta1`` are
    initial data.  ``p_exponent`` is the integrability exponent used only
    to gate the pointwise compatibility checks.  Missing fields default to
    zero.
    """

    f_v: np.ndarray | None = None
    g: np.ndarray | None = None
    f_eta: np.ndarray | None = None
    v0: np.ndarray | None = None
    eta0: np.ndarray | None = None
    eta1: np.ndarray | None = None
    p_exponent: float = 2.0

    def materialize(self, grid: Grid) -> "ProblemData":
        """Return a copy with every ``None`` replaced by zeros of right shape."""
        bulk = grid.tan_shape + (grid.M + 1,)
        return ProblemData(
            f_v=np.zeros((grid.n,) + bulk) if self.f_v is None else np.asarray(self.f_v, dtype=float),
            g=np.zeros(bulk) if self.g is None else np.asarray(self.g, dtype=float),
            f_eta=np.zeros(grid.tan_shape) if self.f_eta is None else np.asarray(self.f_eta, dtype=float),
            v0=np.zeros((grid.n,) + bulk) if self.v0 is None else np.asarray(self.v0, dtype=float),
            eta0=np.zeros(grid.tan_shape) if self.eta0 is None else np.asarray(self.eta0, dtype=float),
            eta1=np.zeros(grid.tan_shape) if self.eta1 is None else np.asarray(self.eta1, dtype=float),
            p_exponent=self.p_exponent,
        )
