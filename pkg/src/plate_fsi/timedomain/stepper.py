"""Implicit Euler time stepper for the linear coupled system.

The tangential torus diagonalizes the linear system into independent
tangential modes, so one step solves, per mode, a small sparse saddle
system on the vertical mesh: staggered velocity/pressure unknowns
(velocity on nodes, pressure on cell midpoints) plus the plate
displacement and velocity of the mode.  The staggering makes the
discrete pressure gradient the exact negative adjoint of the discrete
divergence under the dual mesh weights, so the pressure does no work on
discretely divergence-free fields and the implicit step inherits the
energy decay of the continuous system.

Boundary rows: no-slip for the tangential velocity at both ends, the
kinematic coupling ``v_n(0) = eta_t`` at the plate, a rigid lid at
``x_n = X``, and the plate balance driven by the shear trace
``2 d_n v_n(0)`` minus the pressure trace.
"""

from __future__ import annotations

from math import sqrt
from typing import Sequence

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import onenormest, splu

from ..params import PlateParams
from .grid import Grid, ProblemData, State, VerticalMesh

__all__ = [
    "LinearStepper",
    "ModeStepper",
    "SolverSingular",
    "staggered_divergence",
    "total_energy",
]


class SolverSingular(RuntimeError):
    """The saddle matrix of one tangential mode could not be factorized."""


class ModeStepper:
    """One implicit Euler step operator for a single tangential mode.

    ``xi`` is the tangential wavenumber covector (length ``n - 1``); the
    unknowns of the mode are the complex amplitudes of the ``n`` velocity
    components on the nodes, the pressure on the cell midpoints, and the
    plate displacement/velocity pair.  The sparse factorization is
    computed once and reused for every step.
    """

    def __init__(
        self,
        params: PlateParams,
        xi: Sequence[float],
        mesh: VerticalMesh,
        dt: float,
    ) -> None:
        if dt <= 0.0:
            raise ValueError(f"dt must be positive, got {dt}")
        self.params = params
        self.mesh = mesh
        self.dt = float(dt)
        self.xi = tuple(float(x) for x in xi)
        if not self.xi:
            raise ValueError("xi needs at least one tangential component")
        self.z2 = float(sum(x * x for x in self.xi))
        self.z = sqrt(self.z2)
        self._assemble()

    # unknown layout: tangential components, normal component, pressure,
    # then (eta, psi)
    def _iv(self, d: int, j: int) -> int:
        return d * (self.mesh.M + 1) + j

    def _ivn(self, j: int) -> int:
        return len(self.xi) * (self.mesh.M + 1) + j

    def _ip(self, j: int) -> int:
        return (len(self.xi) + 1) * (self.mesh.M + 1) + j

    @property
    def size(self) -> int:
        return (len(self.xi) + 1) * (self.mesh.M + 1) + self.mesh.M + 2

    def _assemble(self) -> None:
        mesh, dt, p = self.mesh, self.dt, self.params
        M = mesh.M
        h, w = mesh.spacings, mesh.weights
        c = len(self.xi)
        i_eta = self._ip(M)
        i_psi = i_eta + 1
        lap = mesh.diff_matrix(order=2, accuracy=1)
        rows: list[int] = []
        cols: list[int] = []
        vals: list[complex] = []

        def add(r: int, cl: int, v: complex) -> None:
            rows.append(r)
            cols.append(cl)
            vals.append(v)

        for d in range(c):
            add(self._iv(d, 0), self._iv(d, 0), 1.0)
            add(self._iv(d, M), self._iv(d, M), 1.0)
        add(self._ivn(0), self._ivn(0), 1.0)
        add(self._ivn(0), i_psi, -1.0)
        add(self._ivn(M), self._ivn(M), 1.0)

        for j in range(1, M):
            sten = lap.getrow(j)
            for d in range(c):
                r = self._iv(d, j)
                add(r, r, 1.0 / dt + self.z2)
                for k, lv in zip(sten.indices, sten.data):
                    add(r, self._iv(d, int(k)), -lv)
                # adjoint of the cell-average divergence: tangential
                # derivative of the dual-weighted midpoint mean
                add(r, self._ip(j - 1), 1j * self.xi[d] * h[j - 1] / (2.0 * w[j]))
                add(r, self._ip(j), 1j * self.xi[d] * h[j] / (2.0 * w[j]))
            r = self._ivn(j)
            add(r, r, 1.0 / dt + self.z2)
            for k, lv in zip(sten.indices, sten.data):
                add(r, self._ivn(int(k)), -lv)
            add(r, self._ip(j), 1.0 / w[j])
            add(r, self._ip(j - 1), -1.0 / w[j])

        for j in range(M):
            r = self._ip(j)
            for d in range(c):
                add(r, self._iv(d, j), 0.5j * self.xi[d])
                add(r, self._iv(d, j + 1), 0.5j * self.xi[d])
            add(r, self._ivn(j + 1), 1.0 / h[j])
            add(r, self._ivn(j), -1.0 / h[j])

        add(i_eta, i_eta, 1.0)
        add(i_eta, i_psi, -dt)

        add(i_psi, i_psi, 1.0 / dt + p.gamma * self.z2)
        add(i_psi, i_eta, p.alpha * self.z2**2 + p.beta * self.z2)
        for s, t_s in enumerate(mesh.trace_stencil()):
            add(i_psi, self._ivn(s), -2.0 * t_s)
        c0, c1 = mesh.pressure_trace_stencil()
        add(i_psi, self._ip(0), c0)
        add(i_psi, self._ip(1), c1)

        matrix = sp.coo_matrix(
            (vals, (rows, cols)), shape=(self.size, self.size), dtype=complex
        ).tocsc()
        try:
            self._lu = splu(matrix)
        except RuntimeError as exc:
            raise SolverSingular(
                f"mode xi={self.xi}: factorization failed ({exc}); "
                f"matrix 1-norm ~ {onenormest(matrix):.3e}"
            ) from exc

    def step(
        self,
        v_hat: np.ndarray,
        eta_hat: complex,
        psi_hat: complex,
        f_v_hat: np.ndarray | None = None,
        g_hat: np.ndarray | None = None,
        f_eta_hat: complex = 0.0,
    ) -> tuple[np.ndarray, np.ndarray, complex, complex]:
        """Advance the mode by one step.

        ``v_hat`` holds the ``n`` velocity component amplitudes on the
        nodes, shape ``(n, M + 1)``; ``g_hat`` is the divergence datum on
        the nodes (averaged onto cells internally).  Returns the new
        ``(v_hat, p_mid_hat, eta_hat, psi_hat)`` with the pressure on the
        ``M`` cell midpoints.
        """
        mesh, dt = self.mesh, self.dt
        M = mesh.M
        c = len(self.xi)
        v_hat = np.asarray(v_hat)
        if v_hat.shape != (c + 1, M + 1):
            raise ValueError(f"v_hat has shape {v_hat.shape}, expected {(c + 1, M + 1)}")
        b = np.zeros(self.size, dtype=complex)
        for d in range(c + 1):
            comp = slice(self._iv(d, 1), self._iv(d, M))
            b[comp] = v_hat[d, 1:M] / dt
            if f_v_hat is not None:
                b[comp] += f_v_hat[d, 1:M]
        if g_hat is not None:
            b[self._ip(0): self._ip(M)] = 0.5 * (g_hat[:-1] + g_hat[1:])
        b[self._ip(M)] = eta_hat
        b[self._ip(M) + 1] = psi_hat / dt - f_eta_hat
        sol = self._lu.solve(b)
        v_new = sol[: (c + 1) * (M + 1)].reshape(c + 1, M + 1)
        p_mid = sol[self._ip(0): self._ip(M)]
        return v_new, p_mid, complex(sol[self._ip(M)]), complex(sol[self._ip(M) + 1])


def _bulk_spectrum(field: np.ndarray, grid: Grid) -> np.ndarray:
    axes = tuple(range(field.ndim - grid.n, field.ndim - 1))
    return np.fft.rfftn(field, axes=axes)


def _plate_spectrum(field: np.ndarray, grid: Grid) -> np.ndarray:
    axes = tuple(range(field.ndim - (grid.n - 1), field.ndim))
    return np.fft.rfftn(field, axes=axes)


class LinearStepper:
    """Implicit Euler stepper for the full linear system on a :class:`Grid`.

    Transforms the state to tangential modes, advances each mode with a
    cached :class:`ModeStepper` (Nyquist modes are projected out), and
    transforms back.  The returned state carries the pressure interpolated
    from the staggered midpoints to the nodes.
    """

    def __init__(self, params: PlateParams, grid: Grid) -> None:
        self.params = params
        self.grid = grid
        self._cache: dict[tuple[int, ...], ModeStepper] = {}
        self._mask = grid.nyquist_mask()
        if grid.n == 2:
            (kx,) = grid.wavenumbers()
            self._xi_table = {(i,): (float(kx[i]),) for i in range(kx.size)}
        else:
            full, half = grid.wavenumbers()
            self._xi_table = {
                (i, j): (float(full[i, 0]), float(half[0, j]))
                for i in range(grid.N)
                for j in range(grid.N // 2 + 1)
            }

    @property
    def spectral_shape(self) -> tuple[int, ...]:
        if self.grid.n == 2:
            return (self.grid.N // 2 + 1,)
        return (self.grid.N, self.grid.N // 2 + 1)

    def _stepper(self, idx: tuple[int, ...]) -> ModeStepper:
        st = self._cache.get(idx)
        if st is None:
            st = ModeStepper(
                self.params, self._xi_table[idx], self.grid.mesh, self.grid.dt
            )
            self._cache[idx] = st
        return st

    def step(
        self,
        state: State,
        f_v: np.ndarray | None = None,
        g: np.ndarray | None = None,
        f_eta: np.ndarray | None = None,
    ) -> State:
        """One implicit Euler step under the given (already-evaluated) data."""
        grid = self.grid
        M = grid.M
        v_spec = _bulk_spectrum(state.v, grid)
        eta_spec = _plate_spectrum(state.eta, grid)
        psi_spec = _plate_spectrum(state.eta_t, grid)
        fv_spec = None if f_v is None else _bulk_spectrum(np.asarray(f_v, float), grid)
        g_spec = None if g is None else _bulk_spectrum(np.asarray(g, float), grid)
        fe_spec = None if f_eta is None else _plate_spectrum(np.asarray(f_eta, float), grid)

        shape = self.spectral_shape
        v_out = np.zeros((grid.n,) + shape + (M + 1,), dtype=complex)
        p_out = np.zeros(shape + (M,), dtype=complex)
        eta_out = np.zeros(shape, dtype=complex)
        psi_out = np.zeros(shape, dtype=complex)

        for idx in np.ndindex(shape):
            if self._mask[idx]:
                continue
            bulk = (slice(None),) + idx + (slice(None),)
            v_new, p_mid, eta_new, psi_new = self._stepper(idx).step(
                v_spec[bulk],
                complex(eta_spec[idx]),
                complex(psi_spec[idx]),
                None if fv_spec is None else fv_spec[bulk],
                None if g_spec is None else g_spec[idx + (slice(None),)],
                0.0 if fe_spec is None else complex(fe_spec[idx]),
            )
            v_out[bulk] = v_new
            p_out[idx + (slice(None),)] = p_mid
            eta_out[idx] = eta_new
            psi_out[idx] = psi_new

        tan = grid.tan_shape
        bulk_axes = tuple(range(1, grid.n))
        v = np.fft.irfftn(v_out, s=tan, axes=bulk_axes)
        p_mid_phys = np.fft.irfftn(p_out, s=tan, axes=tuple(range(grid.n - 1)))
        eta = np.fft.irfftn(eta_out, s=tan, axes=tuple(range(grid.n - 1)))
        psi = np.fft.irfftn(psi_out, s=tan, axes=tuple(range(grid.n - 1)))
        return State(v=v, p=grid.mesh.midpoints_to_nodes(p_mid_phys), eta=eta, eta_t=psi)

    def run(self, state: State, data: ProblemData) -> list[State]:
        """March constant-in-time data over the grid horizon.

        Returns the trajectory including the initial state,
        ``grid.steps + 1`` entries.
        """
        data = data.materialize(self.grid)
        out = [state.copy()]
        for _ in range(self.grid.steps):
            state = self.step(state, f_v=data.f_v, g=data.g, f_eta=data.f_eta)
            out.append(state)
        return out


def staggered_divergence(v: np.ndarray, grid: Grid) -> np.ndarray:
    """Cell divergence as the mode solver sees it, shape ``tan + (M,)``.

    Tangential derivatives act spectrally on the node-pair averages and
    the vertical part is the exact cell difference; the result is the
    residual field the pressure multiplier annihilates.
    """
    spec = _bulk_spectrum(np.asarray(v, dtype=float), grid)
    avg = 0.5 * (spec[..., :-1] + spec[..., 1:])
    ws = grid.wavenumbers()
    mask = grid.nyquist_mask()
    out = np.zeros(spec.shape[1:-1] + (grid.M,), dtype=complex)
    for d in range(grid.n - 1):
        out += (1j * ws[d] * np.ones(mask.shape))[..., np.newaxis] * avg[d]
    out += np.diff(spec[grid.n - 1], axis=-1) / grid.mesh.spacings
    out = np.where(mask[..., np.newaxis], 0.0, out)
    axes = tuple(range(grid.n - 1))
    return np.fft.irfftn(out, s=grid.tan_shape, axes=axes)


def total_energy(state: State, grid: Grid, params: PlateParams) -> float:
    """Quadratic energy: kinetic fluid part plus plate kinetic and elastic.

    ``(1/2) int |v|^2 + (1/2) int' eta_t^2 + alpha |lap' eta|^2
    + beta |grad' eta|^2``; meaningful as a Lyapunov diagnostic for
    ``beta >= 0``.
    """
    from .grid import tangential_gradient, tangential_laplacian

    cell = (grid.L / grid.N) ** (grid.n - 1)
    kinetic = 0.5 * float(np.sum(np.sum(state.v**2, axis=0) @ grid.mesh.weights)) * cell
    lap = tangential_laplacian(state.eta, grid)
    grad = tangential_gradient(state.eta, grid)
    plate = 0.5 * float(
        np.sum(
            state.eta_t**2
            + params.alpha * lap**2
            + params.beta * np.sum(grad**2, axis=0)
        )
    ) * cell
    return kinetic + plate
